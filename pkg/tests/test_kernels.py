import cmath
import math
import os
import subprocess
import sys

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from unitary_newforms import BACKEND, _accel, _pykernels
from unitary_newforms.exactnum import LocalField
from unitary_newforms.matgroups import elementary_divisors

try:
    from unitary_newforms import _kernels
except ImportError:  # pragma: no cover - extension not built
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
F = LocalField(3)


@st.composite
def int_matrices(draw, max_n=4):
    N = draw(st.integers(1, max_n))
    a = [draw(st.integers(-40, 40)) * 3 ** draw(st.integers(0, 3)) for _ in range(N * N)]
    b = [draw(st.integers(-40, 40)) * 3 ** draw(st.integers(0, 3)) for _ in range(N * N)]
    return N, a, b


def test_backend_reported():
    assert BACKEND in ("cython", "python")
    assert _accel.BACKEND == BACKEND


@given(int_matrices())
def test_smith_matches_exact_elementary_divisors(mat):
    N, a, b = mat
    M = 8
    rows = [[F(a[i * N + j], b[i * N + j]) for j in range(N)] for i in range(N)]
    try:
        exact = elementary_divisors(rows)
    except ZeroDivisionError:
        return
    if max(exact) >= M:
        return
    got = _pykernels.smith_valuations(a, b, N, 3, F.eps, M)
    assert got == sorted(exact)


@needs_ext
@given(int_matrices())
def test_smith_kernels_agree(mat):
    N, a, b = mat
    assert (_pykernels.smith_valuations(a, b, N, 3, 2, 6)
            == _kernels.smith_valuations(a, b, N, 3, 2, 6))


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=81), max_size=30),
       st.booleans())
def test_angle_sum_matches_cmath(angles, conj):
    angles = [mpq(x.numerator, x.denominator) for x in angles]
    sign = -1 if conj else 1
    want = sum((cmath.exp(sign * 2j * math.pi * float(a)) for a in angles), 0j)
    assert abs(_pykernels.angle_sum(angles, conj) - want) < 1e-9


@needs_ext
@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=81), max_size=30),
       st.booleans())
def test_angle_sum_kernels_agree(angles, conj):
    angles = [mpq(x.numerator, x.denominator) for x in angles]
    assert abs(_pykernels.angle_sum(angles, conj) - _kernels.angle_sum(angles, conj)) < 1e-12


def test_pure_fallback_selected_by_environment():
    env = dict(os.environ, UNITARY_NEWFORMS_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import unitary_newforms; print(unitary_newforms.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
