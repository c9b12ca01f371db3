"""Spherical Hecke algebras: the GL-side monomial model and the H_n-side algebra.

On the H_n side everything is computed from single cosets. A coset g R of
R = R_{n,0} is identified with the o_E-lattice g o_E^{2n}, keyed by its
Hermite normal form. Level m is reduced to level 0 by conjugating with the
similitude diag(p^m I_n, I_n). Measures give every single coset volume 1.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import _accel
from .exactnum import INF, LocalField, QuadElt, frac_p, vp
from .matgroups import (GroupElement, build_root_element_h, diag, elementary_divisors,
                        iwasawa_decompose_h, torus)
from .polyalg import SymLaurentPoly
from .whittaker import WhittakerTable


class TruncationError(RuntimeError):
    """A count changed when the truncation was deepened."""


class BudgetError(RuntimeError):
    """Coset enumeration exceeded its budget."""


# ---------------------------------------------------------------------------
# GL side


@dataclass
class GLHeckeElement:
    """Rational combination of monomials f_0^{l_0} f_1^{l_1} ... f_{2n}^{l_{2n}}.

    Attributes:
        n: Half rank (the algebra has generators f_0..f_{2n}).
        q: Residue cardinality of F (q_E = q^2).
        terms: Map from exponent tuples to rational coefficients.
    """

    n: int
    q: int
    terms: dict = field(default_factory=dict)

    @classmethod
    def monomial(cls, n: int, q: int, exps: Sequence[int], c=1) -> "GLHeckeElement":
        exps = tuple(int(x) for x in exps)
        if len(exps) != 2 * n + 1:
            raise ValueError(f"need {2 * n + 1} exponents")
        if any(x < 0 for x in exps[1:]):
            raise ValueError("only f_0 may carry a negative exponent")
        return cls(n, q, {exps: mpq(c)})

    def _clean(self) -> "GLHeckeElement":
        self.terms = {k: v for k, v in self.terms.items() if v != 0}
        return self

    def __add__(self, other: "GLHeckeElement") -> "GLHeckeElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return GLHeckeElement(self.n, self.q, out)._clean()

    def __mul__(self, other) -> "GLHeckeElement":
        if not isinstance(other, GLHeckeElement):
            return GLHeckeElement(self.n, self.q,
                                  {k: v * mpq(other) for k, v in self.terms.items()})._clean()
        out: dict = {}
        for (a, c), (b, d) in itertools.product(self.terms.items(), other.terms.items()):
            k = tuple(x + y for x, y in zip(a, b))
            out[k] = out.get(k, 0) + c * d
        return GLHeckeElement(self.n, self.q, out)._clean()

    def __eq__(self, other) -> bool:
        return (isinstance(other, GLHeckeElement) and self.n == other.n
                and self.q == other.q and self.terms == other.terms)

    def degree(self) -> set[int]:
        return {sum(k) for k in self.terms}


def involution_iota(h: GLHeckeElement) -> GLHeckeElement:
    """The automorphism f_i -> q_E^{n-i} f_{2n-i}."""
    n, qE = h.n, h.q ** 2
    out: dict = {}
    for exps, c in h.terms.items():
        scale = mpq(qE) ** sum(l * (n - i) for i, l in enumerate(exps))
        k = tuple(reversed(exps))
        out[k] = out.get(k, 0) + c * scale
    return GLHeckeElement(n, h.q, out)._clean()


def random_gl_element(n: int, q: int, rng: random.Random, terms: int = 4,
                      max_exp: int = 3) -> GLHeckeElement:
    out = GLHeckeElement(n, q)
    for _ in range(terms):
        exps = [rng.randint(-max_exp, max_exp)] + [rng.randint(0, max_exp) for _ in range(2 * n)]
        c = mpq(rng.randint(-20, 20), rng.randint(1, 9))
        out = out + GLHeckeElement.monomial(n, q, exps, c)
    return out


def reeder_monomials(n: int, ell: int) -> Iterable[tuple[int, ...]]:
    """Exponent tuples (l_0..l_{2n}) of nonnegative integers with sum ell."""
    k = 2 * n + 1
    for cut in itertools.combinations(range(ell + k - 1), k - 1):
        prev = -1
        out = []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(ell + k - 1 - prev - 1)
        yield tuple(out)


def trace_count(n: int, a_pi: int, m: int, q: int = 3) -> int:
    """Trace of the involution on the degree m - a part of the monomial model.

    The involution sends a monomial to a rational multiple of the reversed
    monomial, so only fixed monomials reach the diagonal; each contributes
    its scale, which is 1 for palindromic exponents.
    """
    if m < a_pi:
        return 0
    total = mpq(0)
    for exps in reeder_monomials(n, m - a_pi):
        img = involution_iota(GLHeckeElement.monomial(n, q, exps))
        total += img.terms.get(exps, 0)
    if total.denominator != 1:
        raise ArithmeticError("trace is not an integer")
    return int(total)


# ---------------------------------------------------------------------------
# H side: lattices and cosets


def _canon(z: QuadElt, v: int) -> QuadElt:
    """Canonical representative of z modulo p^v o_E."""
    F = z.F
    s = mpq(F.p) ** v
    return F(s * frac_p(z.a / s, F.p), s * frac_p(z.b / s, F.p))


def hermite_form(cols: list[list[QuadElt]]) -> tuple:
    """Hermite normal form of the o_E-lattice spanned by the given columns.

    Returns the upper triangular basis with diagonal p^{v_i} and entries
    above the diagonal reduced modulo the pivot of their row, as a hashable
    tuple of (a, b) coordinate pairs, row-major.

    Raises:
        ZeroDivisionError: If the columns do not span a full lattice.
    """
    F = cols[0][0].F
    N = len(cols[0])
    rest = [list(c) for c in cols]
    piv: list = [None] * N
    for i in range(N - 1, -1, -1):
        best = None
        for idx, c in enumerate(rest):
            v = c[i].val()
            if v != INF and (best is None or v < best[0]):
                best = (v, idx)
        if best is None:
            raise ZeroDivisionError("columns do not span a lattice")
        v, idx = best
        c = rest.pop(idx)
        u = c[i] / F.uniformizer(v)
        uinv = u.inverse()
        c = [x * uinv for x in c]
        for other in rest:
            if other[i]:
                f = other[i] / c[i]
                for k in range(i + 1):
                    other[k] = other[k] - f * c[k]
        piv[i] = (v, c)
    H = [[F.zero] * N for _ in range(N)]
    basis = [piv[i][1] for i in range(N)]
    vals = [piv[i][0] for i in range(N)]
    for i in range(N):
        col = basis[i]
        for k in range(i - 1, -1, -1):
            red = _canon(col[k], vals[k])
            f = (col[k] - red) / F.uniformizer(vals[k])
            if f:
                col = [x - f * y for x, y in zip(col, basis[k])]
        basis[i] = col
    for i in range(N):
        for k in range(N):
            H[k][i] = basis[i][k]
    return tuple((x.a, x.b) for row in H for x in row)


def _key_to_cols(F: LocalField, key: tuple, N: int) -> list[list[QuadElt]]:
    rows = [[F(*key[i * N + j]) for j in range(N)] for i in range(N)]
    return [[rows[i][j] for i in range(N)] for j in range(N)]


def lattice_torus_part(key: tuple, p: int, N: int) -> tuple[int, ...]:
    """Valuations of the diagonal of a Hermite form (the Iwasawa torus part)."""
    return tuple(int(vp(key[i * N + i][0], p)) for i in range(N // 2))


def r_generators(F: LocalField, r: int) -> list[GroupElement]:
    """A finite set topologically generating R_{r,0} modulo any congruence subgroup."""
    gens = []
    labels = []
    for i in range(1, r + 1):
        labels += [f"2e{i}", f"-2e{i}"]
        for j in range(i + 1, r + 1):
            labels += [f"e{i}-e{j}", f"-e{i}+e{j}", f"e{i}+e{j}", f"-e{i}-e{j}"]
    for lab in labels:
        ys = [F.one] if lab.lstrip("-").startswith("2") else [F.one, F.delta]
        for y in ys:
            gens.append(build_root_element_h(F, r, lab, y))
    units = [u for u in F.residues_E() if u] + [F(1 + F.p), F(1, F.p)]
    for i in range(r):
        for u in units:
            ys = [F.one] * r
            ys[i] = u
            gens.append(torus(F, ys, odd=False))
    return gens


def _similitude(F: LocalField, r: int, m: int) -> tuple[GroupElement, GroupElement]:
    t = diag(F, [F.uniformizer(m)] * r + [F.one] * r)
    tinv = diag(F, [F.uniformizer(-m)] * r + [F.one] * r)
    return t, tinv


def _pi_lambda(F: LocalField, lam: Sequence[int]) -> GroupElement:
    return torus(F, [F.uniformizer(x) for x in lam], odd=False)


@dataclass
class CosetSet:
    """Left coset representatives g_i of R_m p^lam R_m / R_m in H_r.

    Attributes:
        r: Rank.
        m: Level.
        lam: Dominant weight.
        reps: Representatives (upper triangular, in H_r coordinates).
        torus_parts: Iwasawa torus exponents of each representative.
    """

    r: int
    m: int
    lam: tuple
    reps: list
    torus_parts: list

    def __len__(self) -> int:
        return len(self.reps)

    def counts(self) -> dict:
        out: dict = {}
        for mu in self.torus_parts:
            out[mu] = out.get(mu, 0) + 1
        return out


def enumerate_cosets(F: LocalField, r: int, lam: Sequence[int], m: int = 0,
                     budget: int = 100000) -> CosetSet:
    """Single cosets of R_m p^lam R_m by breadth-first closure under R-generators.

    Works at level 0, where a coset g R is keyed by the Hermite form of the
    lattice g o_E^{2r}, and conjugates back with diag(p^m I, I). Each coset
    keeps a unitary representative, replaced by its Iwasawa factor b.

    Raises:
        BudgetError: If more than ``budget`` cosets are found.
    """
    lam = tuple(int(x) for x in lam)
    if len(lam) != r or any(lam[i] < lam[i + 1] for i in range(r - 1)) or lam[-1] < 0:
        raise ValueError("lam must be a partition with r parts")
    N = 2 * r
    start = _pi_lambda(F, lam)
    key0 = _key(start)
    found = {key0: start}
    queue = deque([key0])
    gens = r_generators(F, r)
    while queue:
        g = found[queue.popleft()]
        for s in gens:
            h = s * g
            k = _key(h)
            if k not in found:
                b, _ = iwasawa_decompose_h(h, 0, 0)
                found[k] = b
                if len(found) > budget:
                    raise BudgetError(f"more than {budget} cosets")
                queue.append(k)
    t, tinv = _similitude(F, r, m)
    reps, parts = [], []
    for k in sorted(found):
        reps.append(tinv * found[k] * t)
        parts.append(lattice_torus_part(k, F.p, N))
    return CosetSet(r, m, lam, reps, parts)


def _key(g: GroupElement) -> tuple:
    N = g.N
    return hermite_form([[g.rows[i][j] for i in range(N)] for j in range(N)])


def cosets_rank_one(F: LocalField, lam: int, m: int = 0, window: int | None = None
                    ) -> CosetSet:
    """Cosets of R_m p^(lam) R_m / R_m in U(2) from the Iwasawa cells.

    Every coset has a unique representative diag(p^j, p^-j) chi_{2e1}(x)
    with x in F / p^{-m}; the candidates in a window are filtered by their
    elementary divisors after conjugating to level 0.
    """
    window = lam if window is None else window
    t, tinv = _similitude(F, 1, m)
    reps, parts = [], []
    p = F.p
    for j in range(-window, window + 1):
        depth = max(0, window + j)  # x ranges over p^{-m-depth} / p^{-m}
        for digits in itertools.product(range(p), repeat=depth):
            x = sum((mpq(d) * mpq(p) ** (-m - depth + i) for i, d in enumerate(digits)), mpq(0))
            g = torus(F, [F.uniformizer(j)], odd=False) * build_root_element_h(F, 1, "2e1", x)
            if elementary_divisors(t * g * tinv) == [lam, -lam]:
                reps.append(g)
                parts.append((j,))
    return CosetSet(1, m, (lam,), reps, parts)


# ---------------------------------------------------------------------------
# Satake transform


def delta_half_exponent(mu: Sequence[int]) -> int:
    """c with delta_{B_H}^{1/2}(p^mu) = Q^{-c}, Q = q_E^{1/2}, for H_r = U(2r)."""
    r = len(mu)
    return sum((2 * r - 2 * i - 1) * x for i, x in enumerate(mu))


def satake_from_counts(r: int, counts: dict) -> SymLaurentPoly:
    """sum over torus parts mu of count(mu) delta^{1/2}(p^mu) X^mu."""
    out = SymLaurentPoly.zero(r)
    for mu, c in counts.items():
        out = out + SymLaurentPoly.monomial(r, mu, mpq(c), -delta_half_exponent(mu))
    return out


def _count_rank_one(F: LocalField, lam: int, m: int, M: int) -> dict:
    """Lattice-point count: #{x in p^{-m-M} / p^{-m} : t_j chi(x) in R p^lam R} per j."""
    t, tinv = _similitude(F, 1, m)
    p = F.p
    counts = {}
    for j in range(-M, M + 1):
        c = 0
        for digits in itertools.product(range(p), repeat=M):
            x = sum((mpq(d) * mpq(p) ** (-m - M + i) for i, d in enumerate(digits)), mpq(0))
            g = torus(F, [F.uniformizer(j)], odd=False) * build_root_element_h(F, 1, "2e1", x)
            a = _int_matrix(t * g * tinv, p, 2 * lam + M + 4)
            if a is None:
                continue
            vals = _accel.smith_valuations(a[0], a[1], 2, p, F.eps, a[2])
            if [v - a[3] for v in vals] == [-lam, lam]:
                c += 1
        if c:
            counts[(j,)] = c
    return counts


def _int_matrix(g: GroupElement, p: int, M: int):
    """Integer coordinates of p^s g modulo p^(M+s), with s clearing negative valuations."""
    vals = [min(vp(x.a, p), vp(x.b, p)) for row in g.rows for x in row]
    s = max(0, -min(v for v in vals if v != INF))
    mod = p ** (M + s)
    A, B = [], []
    scale = mpq(p) ** s
    for row in g.rows:
        for x in row:
            for coord, out in ((x.a * scale, A), (x.b * scale, B)):
                num, den = int(coord.numerator), int(coord.denominator)
                out.append(num * pow(den, -1, mod) % mod)
    return A, B, M + s, s


def satake_transform(F: LocalField, lam: Sequence[int], n: int, m: int = 0,
                     M: int | None = None, method: str = "auto") -> SymLaurentPoly:
    """Satake image of phi_{lam,m} by counting, normalized so single cosets have volume 1.

    Args:
        F: Field context.
        lam: Partition with n parts.
        n: Rank of H_n.
        m: Level.
        M: Truncation depth for the rank-one lattice count (default 2 lam_1 + 1).
        method: ``"count"`` (rank one, lattice points at depth M and M+2),
            ``"cosets"`` (breadth-first coset enumeration) or ``"auto"``.

    Raises:
        TruncationError: If the rank-one count moves between M and M+2.
    """
    lam = tuple(int(x) for x in lam)
    if len(lam) != n:
        raise ValueError("lam must have n parts")
    if method == "auto":
        method = "count" if n == 1 else "cosets"
    if method == "count":
        if n != 1:
            raise ValueError("lattice counting is implemented for n = 1")
        M = 2 * lam[0] + 1 if M is None else M
        c1 = _count_rank_one(F, lam[0], m, M)
        c2 = _count_rank_one(F, lam[0], m, M + 2)
        if c1 != c2:
            raise TruncationError(f"counts changed between depth {M} and {M + 2}")
        counts = c1
    else:
        counts = enumerate_cosets(F, n, lam, m).counts()
    out = satake_from_counts(n, counts).qfree(F.q)
    if not out.is_hyperoctahedral_invariant():
        raise ArithmeticError("Satake image is not Weyl invariant")
    return out


# ---------------------------------------------------------------------------
# H side algebra


@dataclass
class HHeckeElement:
    """Rational combination of phi_{lam,m} for partitions lam with n parts."""

    n: int
    m: int
    terms: dict = field(default_factory=dict)

    @classmethod
    def basis(cls, n: int, m: int, lam: Sequence[int], c=1) -> "HHeckeElement":
        return cls(n, m, {tuple(int(x) for x in lam): mpq(c)})

    def __add__(self, other: "HHeckeElement") -> "HHeckeElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return HHeckeElement(self.n, self.m, {k: v for k, v in out.items() if v})

    def satake(self, F: LocalField) -> SymLaurentPoly:
        out = SymLaurentPoly.zero(self.n)
        for lam, c in self.terms.items():
            out = out + satake_transform(F, lam, self.n, self.m) * c
        return out


# ---------------------------------------------------------------------------
# table-level actions (n = 1)


def whittaker_at(table: WhittakerTable, h: GroupElement, level: int):
    """W_v(h) for h in H_1 and v fixed by R_{1,level}.

    Uses h = b k with k in R_{1,level}; the unipotent part of b lies in the
    long root group, on which the generic character is trivial, and the unit
    part of the torus lies in R_{1,level}.
    """
    b, _ = iwasawa_decompose_h(h, level % 2, level)
    k = int(b.rows[0][0].val())
    return table[(k,)]


def apply_hecke(table: WhittakerTable, cosets: CosetSet, kmin: int | None = None,
                kmax: int | None = None) -> WhittakerTable:
    """Table of phi * v: W(t_k) = sum_i W_v(t_k g_i) over left coset reps g_i.

    Entries are produced for every k whose inputs are all in the table.
    """
    if table.n != 1 or cosets.r != 1:
        raise ValueError("table-level Hecke action is implemented for n = 1")
    F = cosets.reps[0].F
    keys = [k[0] for k in table.keys()]
    lo = min(keys) if kmin is None else kmin
    hi = max(keys) if kmax is None else kmax
    ent, err = {}, {}
    for k in range(lo, hi + 1):
        tk = torus(F, [F.uniformizer(k)], odd=False)
        total, e = 0, 0.0
        try:
            for g in cosets.reps:
                total = total + whittaker_at(table, tk * g, cosets.m)
            for mu in cosets.torus_parts:
                e += table.errors.get((k + mu[0],), 0.0)
        except KeyError:
            continue
        ent[(k,)] = total
        err[(k,)] = e
    prov = dict(table.provenance)
    prov["hecke"] = prov.get("hecke", []) + [[list(cosets.lam), cosets.m]]
    return WhittakerTable(1, ent, err, table.normalization, prov, cosets.m)


def apply_level_raising(F: LocalField, lam: Sequence[int], m: int, m_new: int,
                        table: WhittakerTable) -> WhittakerTable:
    """Table of eta_{lam,m,m'}(v) = pi(p^{-mu_l'}) phi_{lam,e} * pi(p^{mu_l}) v at n = 1.

    Raises:
        ValueError: On a parity mismatch or a target level below m + 2 lam_1.
    """
    lam = tuple(int(x) for x in lam)
    if table.n != 1 or len(lam) != 1:
        raise ValueError("table-level level raising is implemented for n = 1")
    if (m_new - m) % 2:
        raise ValueError("levels must have the same parity")
    if m_new < m + 2 * lam[0]:
        raise ValueError("target level must be at least m + 2 lam_1")
    e, ell, ell_new = m % 2, m // 2, m_new // 2
    moved = table.shifted(ell)
    moved.level = e
    if lam[0] == 0:
        acted = moved
    else:
        acted = apply_hecke(moved, cosets_rank_one(F, lam[0], e))
    out = acted.shifted(-ell_new)
    out.level = m_new
    out.provenance["eta"] = [list(lam), m, m_new]
    return out


def level_one_up_reps(F: LocalField) -> list[GroupElement]:
    """Representatives of K_{1,1} / (K_{1,1} cap K_{1,0}), all inside H_1."""
    p = F.p
    reps = [build_root_element_h(F, 1, "2e1", mpq(u, p)) for u in range(p)]
    reps.append(build_weyl_rep_h(F, F.uniformizer(1)))
    return reps


def build_weyl_rep_h(F: LocalField, y: QuadElt) -> GroupElement:
    """w(y) = [[0, conj(y)^{-1}], [y, 0]] in H_1."""
    return GroupElement(F, [[F.zero, y.conj().inverse()], [y, F.zero]])


def apply_level_one_up(F: LocalField, table: WhittakerTable) -> WhittakerTable:
    """Table of v' = sum over K_{1,1} / (K_{1,1} cap K_{1,0}) of pi(k) v for v at level 0."""
    if table.n != 1 or table.level not in (0, None):
        raise ValueError("needs an n = 1 table at level 0")
    reps = level_one_up_reps(F)
    keys = [k[0] for k in table.keys()]
    ent, err = {}, {}
    for k in range(min(keys), max(keys) + 1):
        tk = torus(F, [F.uniformizer(k)], odd=False)
        try:
            vals = [whittaker_at(table, tk * g, 0) for g in reps]
        except KeyError:
            continue
        total = 0
        for v in vals:
            total = total + v
        ent[(k,)] = total
        err[(k,)] = sum(table.errors.get((k + d,), 0.0) for d in (-1, 0))
    prov = dict(table.provenance)
    prov["level_up"] = 1
    return WhittakerTable(1, ent, err, table.normalization, prov, 1)


# ---------------------------------------------------------------------------
# oldform bases


def partitions_bounded(n: int, top: int) -> list[tuple[int, ...]]:
    """Partitions with n parts (zeros allowed) and largest part at most top."""
    out = []
    for combo in itertools.combinations_with_replacement(range(top, -1, -1), n):
        out.append(tuple(combo))
    return sorted(out)


def conjectural_basis_partitions(n: int, a: int, m: int) -> list[tuple[int, ...]]:
    """Partitions lam with n parts and 2 lam_1 <= m - a (m - a - 1 for odd m - a).

    Raises:
        ValueError: If m < a.
    """
    if m < a:
        raise ValueError("need m >= a")
    return partitions_bounded(n, (m - a) // 2)
