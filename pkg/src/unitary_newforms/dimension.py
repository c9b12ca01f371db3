"""Dimension formulas for spaces of K_{n,m}-fixed vectors and their identities."""

from __future__ import annotations

from math import comb
from typing import Sequence

from .lfactors import conductor_arith


def binom(a: int, b: int) -> int:
    """Binomial coefficient that is 0 when a < b or b < 0."""
    if b < 0 or a < b:
        return 0
    return comb(a, b)


def dim_oldforms(n: int, a: int, m: int) -> int:
    """dim V^{K_{n,m}} = binom(floor((m-a)/2) + n, n) for generic pi of conductor a."""
    if n < 0 or a < 0 or m < 0:
        raise ValueError("n, a, m must be nonnegative")
    if m < a:
        return 0
    return binom((m - a) // 2 + n, n)


def dim_gl_oldforms(r: int, a: int, m: int) -> int:
    """Dimension of the level-m fixed space of a generic GL_r rep of conductor a."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if m < a:
        return 0
    return binom(m - a + r - 1, r - 1)


def vandermonde_check(ell: int, r: int, n: int) -> bool:
    """Exact check of sum_d binom(l-d+r-1, r-1) binom(d+n-r, n-r) = binom(l+n, n)."""
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    lhs = sum(binom(ell - d + r - 1, r - 1) * binom(d + n - r, n - r) for d in range(ell + 1))
    return lhs == binom(ell + n, n)


def dim_by_recursion(n: int, rs: Sequence[int], a_taus: Sequence[int], a0: int, m: int) -> int:
    """Dimension of tau_1 x ... x tau_k x| pi_0 fixed vectors by peeling GL factors.

    Each step convolves the GL_r count at level l - d with the count for the
    smaller group at level e + 2d, where m = e + 2l.
    """
    if len(rs) != len(a_taus):
        raise ValueError("one conductor per GL factor")
    if sum(rs) > n:
        raise ValueError("GL factors exceed the rank")
    if not rs:
        return dim_oldforms(n, a0, m)
    r, a_tau = rs[0], a_taus[0]
    e, ell = m % 2, m // 2
    total = 0
    for d in range(ell + 1):
        gl = dim_gl_oldforms(r, a_tau, ell - d)
        if gl:
            total += gl * dim_by_recursion(n - r, rs[1:], a_taus[1:], a0, e + 2 * d)
    return total


def dim_recursion_check(n: int, rs: Sequence[int], a_taus: Sequence[int], a0: int,
                        m: int) -> bool:
    """Compare the recursive count with the closed form at the total conductor."""
    a = conductor_arith([("gl", x) for x in a_taus] + [("anchor", a0)])
    return dim_by_recursion(n, rs, a_taus, a0, m) == dim_oldforms(n, a, m)
