"""Kernel selection: the compiled extension when importable, else pure Python.

Set UNITARY_NEWFORMS_PURE=1 to force the pure-Python kernels.
"""

from __future__ import annotations

import os

BACKEND = "python"
if os.environ.get("UNITARY_NEWFORMS_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import angle_sum, smith_valuations  # noqa: F401
        BACKEND = "cython"
    except ImportError:
        pass
if BACKEND == "python":
    from ._pykernels import angle_sum, smith_valuations  # noqa: F401

__all__ = ["BACKEND", "angle_sum", "smith_valuations"]
