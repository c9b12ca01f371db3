import pytest
from hypothesis import given
from hypothesis import strategies as st

from unitary_newforms.dimension import (binom, dim_by_recursion, dim_gl_oldforms, dim_oldforms,
                                        dim_recursion_check, vandermonde_check)
from unitary_newforms.hecke import trace_count


def test_binom_conventions():
    assert binom(5, 2) == 10
    assert binom(2, 5) == 0
    assert binom(3, -1) == 0


@pytest.mark.parametrize("m,expected", [(0, 1), (1, 1), (2, 2), (3, 2), (8, 5)])
def test_dim_rank_one(m, expected):
    assert dim_oldforms(1, 0, m) == expected


def test_dim_frozen_values():
    # closed form at n = 2, 3 (binomial table)
    assert [dim_oldforms(2, 1, m) for m in range(1, 8)] == [1, 1, 3, 3, 6, 6, 10]
    assert dim_oldforms(3, 2, 8) == 20
    assert dim_oldforms(2, 3, 2) == 0


def test_dim_rejects_negative():
    with pytest.raises(ValueError):
        dim_oldforms(-1, 0, 0)


@given(st.integers(1, 3), st.integers(0, 4), st.integers(0, 8))
def test_dim_matches_trace(n, a, j):
    assert dim_oldforms(n, a, a + j) == trace_count(n, a, a + j)


@given(st.integers(0, 10), st.integers(1, 6), st.integers(0, 4))
def test_vandermonde(ell, n, dr):
    r = max(1, n - dr)
    assert vandermonde_check(ell, r, n)


def test_vandermonde_rejects():
    with pytest.raises(ValueError):
        vandermonde_check(2, 3, 2)


def test_dim_gl():
    assert dim_gl_oldforms(1, 0, 5) == 1
    assert dim_gl_oldforms(2, 1, 3) == 3
    assert dim_gl_oldforms(2, 3, 1) == 0
    with pytest.raises(ValueError):
        dim_gl_oldforms(0, 0, 0)


@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 3), st.integers(0, 10))
def test_recursion_one_block(n, a_tau, a0, m):
    assert dim_recursion_check(n, [1], [a_tau], a0, m)


@given(st.integers(2, 5), st.integers(0, 2), st.integers(0, 2), st.integers(0, 3),
       st.integers(0, 10))
def test_recursion_two_blocks(n, a1, a2, a0, m):
    assert dim_recursion_check(n, [1, 1], [a1, a2], a0, m)


def test_recursion_input_errors():
    with pytest.raises(ValueError):
        dim_by_recursion(2, [1], [], 0, 2)
    with pytest.raises(ValueError):
        dim_by_recursion(2, [2, 1], [0, 0], 0, 2)
