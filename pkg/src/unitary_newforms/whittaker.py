"""Whittaker values: exact GL_r values, numerical Jacquet-integral oracles and tables.

The oracles integrate a spherical section against an additive character over
a unipotent group. The domain is cut into valuation shells; on each shell the
Iwasawa torus part of the integrand is constant and the character integral is
a finite exact sum over residues. Only the number of shells is truncated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from . import _accel
from .exactnum import INF, LocalField, QuadElt, additive_character, rat
from .matgroups import GroupElement, build_root_element, build_weyl_rep, iwasawa_decompose
from .polyalg import SymLaurentPoly, schur_poly


class OracleError(RuntimeError):
    """The truncated integral is not certified at the requested depth."""


@dataclass
class WhittakerTable:
    """Values W(t_mu) on torus elements, keyed by integer tuples.

    Attributes:
        n: Rank (length of the keys).
        entries: Map from mu to value (rational, float, complex or formal).
        errors: Map from mu to an absolute error bound.
        normalization: How the table was scaled.
        provenance: Parameters that produced the table.
        level: Level m at which the underlying vector is fixed, if known.
    """

    n: int
    entries: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    normalization: str = "raw"
    provenance: dict = field(default_factory=dict)
    level: int | None = None

    def __getitem__(self, mu) -> object:
        mu = tuple(mu)
        if mu not in self.entries:
            raise KeyError(f"table has no entry for {mu}")
        return self.entries[mu]

    def get(self, mu, default=0):
        return self.entries.get(tuple(mu), default)

    def keys(self):
        return sorted(self.entries)

    def support(self) -> list:
        return sorted(k for k, v in self.entries.items() if _nonzero(v))

    def shifted(self, j: int) -> "WhittakerTable":
        """Table of pi(p^{mu_j}) v: W'(t_mu) = W(t_{mu + j})."""
        ent = {tuple(x - j for x in k): v for k, v in self.entries.items()}
        err = {tuple(x - j for x in k): v for k, v in self.errors.items()}
        prov = dict(self.provenance)
        prov["shift"] = prov.get("shift", 0) + j
        return WhittakerTable(self.n, ent, err, self.normalization, prov, self.level)

    def scaled(self, c) -> "WhittakerTable":
        ent = {k: v * c for k, v in self.entries.items()}
        err = {k: v * abs(complex(c)) for k, v in self.errors.items()}
        return WhittakerTable(self.n, ent, err, self.normalization, dict(self.provenance),
                              self.level)

    def normalized(self, key=None) -> "WhittakerTable":
        """Divide by the entry at ``key`` (default: the origin)."""
        key = tuple([0] * self.n) if key is None else tuple(key)
        c = self.entries[key]
        out = self.scaled(1 / c)
        out.normalization = f"W{key}=1"
        return out

    def to_json(self) -> str:
        def enc(v):
            if isinstance(v, complex):
                return {"re": repr(v.real), "im": repr(v.imag)}
            if isinstance(v, float):
                return {"re": repr(v), "im": "0.0"}
            return {"exact": str(v)}
        data = {
            "n": self.n,
            "level": self.level,
            "normalization": self.normalization,
            "provenance": self.provenance,
            "entries": [[list(k), enc(self.entries[k]), repr(float(self.errors.get(k, 0.0)))]
                        for k in sorted(self.entries)],
        }
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "WhittakerTable":
        data = json.loads(text)
        ent, err = {}, {}
        for k, v, e in data["entries"]:
            key = tuple(k)
            if "exact" in v:
                ent[key] = mpq(v["exact"])
            else:
                ent[key] = complex(float(v["re"]), float(v["im"]))
            err[key] = float(e)
        return cls(data["n"], ent, err, data["normalization"], data["provenance"], data["level"])


def _nonzero(v) -> bool:
    try:
        return abs(complex(v)) > 0
    except TypeError:
        return bool(v)


# ---------------------------------------------------------------------------
# exact GL_r values


def is_dominant(mu: Sequence[int]) -> bool:
    return all(mu[i] >= mu[i + 1] for i in range(len(mu) - 1))


def delta_gl_exponent(mu: Sequence[int]) -> int:
    """Exponent c with delta_{B_GL_r}(p^mu) = q_E^{-c}: c = sum_{i<j} (mu_i - mu_j)."""
    r = len(mu)
    return sum(mu[i] - mu[j] for i in range(r) for j in range(i + 1, r))


def gl_whittaker_value(mu: Sequence[int], alphas: Sequence | None = None, q: int | None = None):
    """W(p^mu) = delta^{1/2}(p^mu) s_mu for the normalized unramified GL_r(E) vector.

    Args:
        mu: Integer vector of length r.
        alphas: Numeric Satake values; when None a ``SymLaurentPoly`` in
            X_1..X_r is returned with delta^{1/2} = Q^{-c} in the half-power slot.
        q: Residue cardinality of F, needed for numeric evaluation.

    Returns:
        0 for non-dominant mu, otherwise the polynomial or its value.
    """
    mu = tuple(int(x) for x in mu)
    r = len(mu)
    c = delta_gl_exponent(mu)
    if not is_dominant(mu):
        return 0 if alphas is not None else SymLaurentPoly.zero(r)
    s = schur_poly(mu, r)
    poly = s * SymLaurentPoly.monomial(r, [0] * r, 1, -c)
    if alphas is None:
        return poly
    if q is None:
        raise ValueError("q is required for numeric evaluation")
    return poly.evaluate(list(alphas), q)


# ---------------------------------------------------------------------------
# shell integrals


def shell_character_integral(F: LocalField, v: int, which: str = "E", scale: int = 0,
                             conj: bool = False) -> complex:
    """Integral of psi(p^scale y) over the shell val(y) = v (vol(o) = 1).

    Writing y = p^v (u0 + p w) with u0 a nonzero residue, the integral is
    vol(p^(v+1)) * sum_{u0} psi(p^(v+scale) u0) when psi(p^scale .) is
    trivial on p^(v+1), and zero otherwise. The residue sum is evaluated
    from exact character angles.
    """
    qq = F.qE if which == "E" else F.q
    j = v + scale
    if j + 1 < 0:
        return 0j
    vol_next = mpq(qq) ** (-(v + 1))
    if which == "E":
        res = [F(a, b) for a in range(F.p) for b in range(F.p) if a or b]
    else:
        res = [F(a) for a in range(1, F.p)]
    pj = F.uniformizer(j)
    total = _accel.angle_sum([additive_character(pj * u, which if which == "E" else "F")
                              for u in res], conj)
    return complex(float(vol_next)) * total


def _val_or(x, default):
    v = x.val()
    return default if v == INF else v


# ---------------------------------------------------------------------------
# GL_2 oracle


def _gl2_section(F: LocalField, g: list[list[QuadElt]], alphas) -> mpq:
    """Spherical vector f(b k) = alpha_1^{v1} alpha_2^{v2} |b1/b2|_E^{1/2} at g in GL_2(E)."""
    c, d = g[1]
    v2 = min(_val_or(c, INF), _val_or(d, INF))
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    v1 = det.val() - v2
    # |b1/b2|_E^{1/2} = q^{-(v1 - v2)}
    return alphas[0] ** v1 * alphas[1] ** v2 * mpq(F.q) ** (v2 - v1)


@dataclass
class OracleValue:
    value: complex
    bound: float
    shells: int


def jacquet_oracle_gl2(F: LocalField, mu: Sequence[int], alphas: Sequence, depth: int = 6
                       ) -> OracleValue:
    """Truncated Jacquet integral W(diag(p^mu1, p^mu2)) for the unramified GL_2(E) series.

    Computes int_E f(w n(x) t) psi(x) dx shell by shell for val(x) in
    [-depth, max(mu1 - mu2, 0)), plus the region where the integrand is
    constant. The returned bound is the sum over omitted shells of
    |f| * |shell integral|, which vanishes once depth >= 1 because the
    character integral over a shell val(x) = v is zero for v <= -2.

    Args:
        F: Field context.
        mu: Torus exponents.
        alphas: Exact Satake values with |alpha_1| <= |alpha_2|.
        depth: Number of negative shells.

    Raises:
        OracleError: If the Satake ordering makes the integral divergent.
    """
    a1, a2 = (rat(x) for x in alphas)
    if abs(a1) > abs(a2):
        raise OracleError("need |alpha_1| <= |alpha_2| for convergence")
    m1, m2 = int(mu[0]), int(mu[1])
    w = [[F.zero, F.one], [F.one, F.zero]]
    pm1, pm2 = F.uniformizer(m1), F.uniformizer(m2)

    def integrand(x: QuadElt) -> mpq:
        # w n(x) t = [[0, p^m2], [p^m1, x p^m2]]
        g = [[F.zero, pm2], [pm1, x * pm2]]
        return _gl2_section(F, g, (a1, a2))

    top = max(m1 - m2, 0)
    total = complex(float(integrand(F.zero))) * float(mpq(F.qE) ** (-top))
    shells = 0
    for v in range(-depth, top):
        I = shell_character_integral(F, v, "E")
        if I != 0:
            total += complex(float(integrand(F.uniformizer(v)))) * I
        shells += 1
    # omitted shells v < -depth contribute f(v) * I(v) with I(v) = 0 for v <= -2
    tail = 0.0
    if depth < 1:
        tail = float("inf")
    return OracleValue(total, tail, shells)


def gl2_oracle_table(F: LocalField, alphas: Sequence, max_weight: int = 3, depth: int = 6
                     ) -> WhittakerTable:
    """Normalized oracle values for all mu in [0, max_weight]^2 with mu1 + mu2 <= max_weight."""
    a = sorted((rat(x) for x in alphas), key=abs)
    base = jacquet_oracle_gl2(F, (0, 0), a, depth)
    ent, err = {}, {}
    for m1 in range(max_weight + 1):
        for m2 in range(max_weight + 1 - m1):
            o = jacquet_oracle_gl2(F, (m1, m2), a, depth)
            ent[(m1, m2)] = o.value / base.value
            err[(m1, m2)] = (o.bound + base.bound) / abs(base.value)
    return WhittakerTable(2, ent, err, "W(0,0)=1",
                          {"oracle": "gl2", "p": F.p, "alphas": [str(x) for x in a],
                           "depth": depth})


# ---------------------------------------------------------------------------
# U(3) oracle


def _u3_unipotent(F: LocalField, x, y) -> GroupElement:
    return build_root_element(F, 1, "e1", y) * build_root_element(F, 1, "2e1", x)


def u3_section_exponent(g: GroupElement) -> int:
    """val(b_11) in the Iwasawa factor of g in G_1 = U(3)."""
    b, _ = iwasawa_decompose(g, 0)
    return int(b.rows[0][0].val())


def jacquet_oracle_u3(F: LocalField, k: int, beta, depth: int = 8) -> OracleValue:
    """Truncated Jacquet integral W(t_k) for the unramified principal series of U(3).

    The section is f(b k) = (beta / q_E)^{val b_11} (normalized induction,
    delta_B^{1/2} = |b_11|_E). The unipotent radical is parametrized as
    chi_{e1}(y) chi_{2e1}(x) with x in F, y in E, self-dual measures, and the
    character is psibar_E(y). Shells run over val(x) >= -depth; the omitted
    part is bounded by a geometric tail with ratio |beta| / q.

    Args:
        F: Field context.
        k: Torus exponent, t_k = diag(p^k, 1, p^{-k}).
        beta: Exact Satake value with |beta| < q.
        depth: Number of negative x-shells.

    Raises:
        OracleError: If |beta| >= q or the tail is not geometric at this depth.
    """
    beta = rat(beta)
    q = F.q
    ratio = abs(beta) / q
    if ratio >= 1:
        raise OracleError("need |beta| < q for absolute convergence")
    w0 = build_weyl_rep(F, 1, None, [1], 1)
    t = GroupElement(F, [[F.uniformizer(k), F.zero, F.zero], [F.zero, F.one, F.zero],
                         [F.zero, F.zero, F.uniformizer(-k)]])
    Tx, Ty = max(2 * k, 0), max(k, 0)
    base = beta / F.qE

    def f(x, y) -> mpq:
        return base ** u3_section_exponent(w0 * _u3_unipotent(F, x, y) * t)

    # y-cells: (sample, character integral)
    ycells = [(F.zero, complex(float(mpq(F.qE) ** (-Ty))))]
    for b in range(-depth, Ty):
        I = shell_character_integral(F, b, "E", conj=True)
        if I != 0:
            ycells.append((F.uniformizer(b), I))
    xcells = [(F.zero, mpq(q) ** (-Tx))]
    for a in range(-depth, Tx):
        xcells.append((F.uniformizer(a), mpq(q) ** (-a) * (1 - mpq(1, q))))
    total = 0j
    cells = 0
    for x, vx in xcells:
        for y, Iy in ycells:
            total += complex(float(f(x, y) * vx)) * Iy
            cells += 1
    # tail over val(x) < -depth, shell by shell geometric with ratio |beta|/q
    tail = 0.0
    for y, Iy in ycells:
        a1, a2 = -depth - 1, -depth - 2
        t1 = abs(float(f(F.uniformizer(a1), y) * mpq(q) ** (-a1)))
        t2 = abs(float(f(F.uniformizer(a2), y) * mpq(q) ** (-a2)))
        if t1 and abs(t2 / t1 - float(ratio)) > 1e-12:
            raise OracleError("tail is not yet geometric; increase depth")
        tail += t1 * (1 - 1 / q) * abs(Iy) / (1 - float(ratio))
    return OracleValue(total, tail, cells)


def u3_oracle_table(F: LocalField, beta, kmin: int = -2, kmax: int = 8, depth: int = 8
                    ) -> WhittakerTable:
    """Oracle table k -> W(t_k) / W(t_0) for the spherical vector of U(3)."""
    vals = {k: jacquet_oracle_u3(F, k, beta, depth) for k in range(kmin, kmax + 1)}
    w0 = vals[0].value
    ent = {(k,): o.value / w0 for k, o in vals.items()}
    err = {(k,): (o.bound + abs(ent[(k,)]) * vals[0].bound) / abs(w0) for k, o in vals.items()}
    return WhittakerTable(1, ent, err, "W(0)=1",
                          {"oracle": "u3", "p": F.p, "beta": str(rat(beta)), "depth": depth,
                           "raw_W0": [w0.real, w0.imag]}, level=0)


# ---------------------------------------------------------------------------
# support


def support_predicates(x: Sequence[Sequence[QuadElt]], n: int, r: int) -> bool:
    """Whether W_v(a-hat x-tilde) is guaranteed to vanish.

    The value vanishes for every K_{n,m}-fixed v when some entry of the
    (n-r) x r matrix x has negative valuation.

    Raises:
        ValueError: If r >= n or the shape is wrong.
    """
    if not 1 <= r < n:
        raise ValueError("need 1 <= r < n")
    if len(x) != n - r or any(len(row) != r for row in x):
        raise ValueError("x must be (n-r) x r")
    return any(e.val() < 0 for row in x for e in row)


def dominant_support_ok(table: WhittakerTable, tol: float = 1e-9) -> bool:
    """All entries outside mu_1 >= ... >= mu_n >= 0 vanish within tolerance."""
    for k, v in table.entries.items():
        outside = not is_dominant(k) or k[-1] < 0
        if outside and abs(complex(v)) > tol + table.errors.get(k, 0.0):
            return False
    return True


def u3_spherical_table_exact(F: LocalField, beta, kmin: int = -2, kmax: int = 12
                             ) -> WhittakerTable:
    """Exact table W(t_k) / W(t_0) = q_E^{-k} h_k(beta, 1/beta) for k >= 0, else 0.

    h_k is the complete homogeneous symmetric polynomial of degree k. This
    closed form is the one the U(3) oracle reproduces (see the tests); it is
    used wherever an exact table is needed.
    """
    beta = rat(beta)
    ent, err = {}, {}
    for k in range(kmin, kmax + 1):
        if k < 0:
            ent[(k,)] = mpq(0)
        else:
            hk = sum((beta ** (k - 2 * i) for i in range(k + 1)), mpq(0))
            ent[(k,)] = hk / mpq(F.qE) ** k
        err[(k,)] = 0.0
    return WhittakerTable(1, ent, err, "W(0)=1", {"closed_form": "u3", "p": F.p,
                                                  "beta": str(beta)}, level=0)


def formal_table(n: int, keys) -> WhittakerTable:
    """Table whose entries are independent formal symbols W[mu]."""
    from .polyalg import FormalLinear
    ent = {tuple(k): FormalLinear.symbol("W" + str(list(k)).replace(" ", "")) for k in keys}
    return WhittakerTable(n, ent, {k: 0.0 for k in ent}, "formal", {"formal": True})
