"""Pure-Python hot kernels. Same signatures and results as the compiled module."""

from __future__ import annotations

import cmath
import math
from typing import Sequence


def angle_sum(angles: Sequence, conj: bool = False) -> complex:
    """Sum of exp(+-2 pi i a) over rational angles a, accumulated in a fixed order."""
    sign = -1.0 if conj else 1.0
    re = 0.0
    im = 0.0
    for a in angles:
        t = sign * 2.0 * math.pi * float(a)
        re += math.cos(t)
        im += math.sin(t)
    return complex(re, im)


def _vp_int(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


def smith_valuations(a: list, b: list, N: int, p: int, eps: int, M: int) -> list:
    """Elementary-divisor valuations of an N x N matrix over o_E / p^M.

    Entries are a[i*N+j] + b[i*N+j] * delta with integer coordinates. The
    result is sorted ascending; valuations at or beyond M are reported as M.
    """
    mod = p ** M
    A = [x % mod for x in a]
    B = [x % mod for x in b]
    rows = list(range(N))
    cols = list(range(N))
    out = []
    for _ in range(N):
        best, bi, bj = M, -1, -1
        for i in rows:
            for j in cols:
                k = i * N + j
                v = min(_vp_int(A[k], p, M), _vp_int(B[k], p, M))
                if v < best:
                    best, bi, bj = v, i, j
                    if v == 0:
                        break
            if best == 0:
                break
        if bi < 0:
            out.extend([M] * len(rows))
            break
        out.append(best)
        pk = bi * N + bj
        pv = p ** best
        ua, ub = A[pk] // pv, B[pk] // pv
        nrm = (ua * ua - eps * ub * ub) % mod
        ninv = pow(nrm, -1, mod)
        ia, ib = (ua * ninv) % mod, (-ub * ninv) % mod
        for i in rows:
            if i == bi:
                continue
            k = i * N + bj
            if A[k] == 0 and B[k] == 0:
                continue
            # factor = (x_i / p^v) * u^{-1}
            xa, xb = A[k] // pv, B[k] // pv
            fa = (xa * ia + eps * xb * ib) % mod
            fb = (xa * ib + xb * ia) % mod
            for j in cols:
                s = bi * N + j
                t = i * N + j
                A[t] = (A[t] - (fa * A[s] + eps * fb * B[s])) % mod
                B[t] = (B[t] - (fa * B[s] + fb * A[s])) % mod
        rows.remove(bi)
        cols.remove(bj)
    return sorted(out)


def phase(angle: float) -> complex:
    return cmath.exp(2j * math.pi * angle)
