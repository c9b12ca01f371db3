"""Newforms and oldforms for unramified U(2n+1) over p-adic fields, computed exactly."""

from ._accel import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
