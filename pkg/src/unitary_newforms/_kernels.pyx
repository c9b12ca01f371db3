# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels. Mirrors _pykernels exactly."""

from libc.math cimport cos, sin, M_PI

cdef extern from *:
    ctypedef long long int128 "__int128"


def angle_sum(angles, bint conj=False):
    cdef double sign = -1.0 if conj else 1.0
    cdef double re = 0.0, im = 0.0, t
    for a in angles:
        t = sign * 2.0 * M_PI * float(a)
        re += cos(t)
        im += sin(t)
    return complex(re, im)


cdef inline long long _vp(long long x, long long p, int cap):
    cdef int v = 0
    if x == 0:
        return cap
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


cdef long long _powmod_inv(long long x, long long mod):
    # extended Euclid, x a unit mod p^M
    cdef long long t = 0, nt = 1, r = mod, nr = x % mod, qq, tmp
    while nr != 0:
        qq = r // nr
        tmp = t - qq * nt
        t = nt
        nt = tmp
        tmp = r - qq * nr
        r = nr
        nr = tmp
    if t < 0:
        t += mod
    return t


cdef inline long long _mm(long long x, long long y, long long mod):
    return <long long>((<int128>x * y) % mod)


def smith_valuations(a, b, int N, long long p, long long eps, int M):
    cdef long long mod = 1
    cdef int i, j, k, s, t, it, best, bi, bj, v
    for i in range(M):
        mod *= p
    cdef list A = [x % mod for x in a]
    cdef list B = [x % mod for x in b]
    cdef list rows = list(range(N))
    cdef list cols = list(range(N))
    cdef list out = []
    cdef long long pv, ua, ub, nrm, ninv, ia, ib, xa, xb, fa, fb, As, Bs
    for it in range(N):
        best = M
        bi = -1
        bj = -1
        for i in rows:
            for j in cols:
                k = i * N + j
                v = min(_vp(A[k], p, M), _vp(B[k], p, M))
                if v < best:
                    best = v
                    bi = i
                    bj = j
                    if v == 0:
                        break
            if best == 0:
                break
        if bi < 0:
            out.extend([M] * len(rows))
            break
        out.append(best)
        pv = 1
        for i in range(best):
            pv *= p
        k = bi * N + bj
        ua = A[k] // pv
        ub = B[k] // pv
        nrm = (_mm(ua, ua, mod) - _mm(eps, _mm(ub, ub, mod), mod)) % mod
        if nrm < 0:
            nrm += mod
        ninv = _powmod_inv(nrm, mod)
        ia = _mm(ua, ninv, mod)
        ib = (mod - _mm(ub, ninv, mod)) % mod
        for i in rows:
            if i == bi:
                continue
            k = i * N + bj
            if A[k] == 0 and B[k] == 0:
                continue
            xa = A[k] // pv
            xb = B[k] // pv
            fa = (_mm(xa, ia, mod) + _mm(eps, _mm(xb, ib, mod), mod)) % mod
            fb = (_mm(xa, ib, mod) + _mm(xb, ia, mod)) % mod
            for j in cols:
                s = bi * N + j
                t = i * N + j
                As = A[s]
                Bs = B[s]
                A[t] = (A[t] - _mm(fa, As, mod) - _mm(eps, _mm(fb, Bs, mod), mod)) % mod
                B[t] = (B[t] - _mm(fa, Bs, mod) - _mm(fb, As, mod)) % mod
        rows.remove(bi)
        cols.remove(bj)
    return sorted(out)
