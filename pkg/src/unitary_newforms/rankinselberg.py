"""The Xi-calculus: partial sums of the Rankin-Selberg integral, assembly, and checks.

Torus weights. The partial sum of degree l is

    Psi_l(X) = sum_mu W_v(mu) W_GL(mu; X) kappa(mu),
    kappa(mu) = delta_{B_GL_r}^{-1}(p^mu) q_E^{|mu| (n - r/2)},

over dominant mu with |mu| = l. With W_GL = delta^{1/2} s_mu this is
delta^{-1/2}(p^mu) q_E^{l (n - r/2)} s_mu(X). The exponent (n - r/2) was
calibrated against the rank-one oracle (see ``calibrate_kappa``).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .exactnum import LocalField, rat
from .lfactors import UnramParam, asai_l_value, asai_poly, rs_l_value, tensor_poly
from .matgroups import GroupElement, iwasawa_decompose_h
from .polyalg import (DEFAULT_T, FormalLinear, LaurentSeriesY, SymLaurentPoly, elem_sym,
                      yn_grade)
from .whittaker import (OracleError, WhittakerTable, delta_gl_exponent, gl_whittaker_value,
                        is_dominant)


class MissingEntryError(KeyError):
    """The table lacks an entry needed by a partial sum."""


class NonTerminatingError(ArithmeticError):
    """The assembled series has coefficients beyond its degree bound."""


# ---------------------------------------------------------------------------
# partial sums


def kappa_qh(mu: Sequence[int], n: int, r: int) -> int:
    """Exponent of Q = q_E^{1/2} in kappa(mu) = delta_GL^{-1}(p^mu) q_E^{|mu|(n - r/2)}."""
    return 2 * delta_gl_exponent(mu) + sum(mu) * (2 * n - r)


def dominant_weights(r: int, total: int, low: int = 0) -> list[tuple[int, ...]]:
    """Dominant mu in Z^r with entries >= low and sum equal to total."""
    out = []
    top = total - low * (r - 1)
    for mu in itertools.product(range(low, top + 1), repeat=r):
        if sum(mu) == total and is_dominant(mu):
            out.append(mu)
    return sorted(out, reverse=True)


def psi_partial_sum(table: WhittakerTable, n: int, r: int, ell: int, low: int = 0
                    ) -> SymLaurentPoly:
    """Homogeneous degree-ell part of Psi as a polynomial in X_1..X_r.

    Args:
        table: Whittaker values on the torus of H_n (keys of length n).
        n: Rank of the unitary group.
        r: Rank of the GL factor, r <= n.
        ell: Degree.
        low: Smallest entry allowed in mu; only meaningful for r = n, where
            vectors fixed by R_{n,m} alone may have torus support below 0.

    Raises:
        MissingEntryError: If a needed entry is absent from the table.
    """
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    if r < n and low < 0:
        raise ValueError("negative torus support only arises for r = n")
    out = SymLaurentPoly.zero(r)
    for mu in dominant_weights(r, ell, low):
        key = tuple(mu) + (0,) * (n - r)
        if key not in table.entries:
            raise MissingEntryError(f"table has no entry for {key}")
        w = table.entries[key]
        if isinstance(w, (int, float, complex)) and w == 0:
            continue
        term = gl_whittaker_value(mu) * SymLaurentPoly.monomial(r, [0] * r, 1,
                                                                kappa_qh(mu, n, r))
        out = out + term * w
    return out


def psi_series(table: WhittakerTable, n: int, r: int, T: int, low: int = 0
               ) -> LaurentSeriesY:
    """Psi(X; Y) = sum_l Psi_l(X) Y^l for l from the lowest support up to T."""
    lo = low * r
    coeffs = {}
    for ell in range(lo, T + 1):
        c = psi_partial_sum(table, n, r, ell, low)
        if c.terms:
            coeffs[ell] = c
    return LaurentSeriesY(r, coeffs, T=T, low=min(lo, 0))


# ---------------------------------------------------------------------------
# assembly


@dataclass
class XiObject:
    """The polynomial Xi^m_{n,r}(v; X) with its pre-specialization series.

    Attributes:
        poly: Polynomial in X_1..X_r after Y -> 1.
        series: Y-series before specialization.
        n, r: Ranks.
        m: Level.
        a: Conductor.
        normalization: Description of the table scaling.
        tail: Largest coefficient beyond the degree bound.
    """

    poly: SymLaurentPoly
    series: LaurentSeriesY
    n: int
    r: int
    m: int
    a: int
    normalization: str = ""
    tail: float = 0.0

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "m": self.m, "a": self.a,
                "normalization": self.normalization, "tail": self.tail,
                "poly": self.poly.to_json()}


def _specialize_series(S: LaurentSeriesY, upto: int, low: int) -> SymLaurentPoly:
    total = SymLaurentPoly.zero(S.nvars)
    for d, c in S.coeffs.items():
        if low <= d <= upto:
            total = total + c
    return total


def xi_assemble(table: WhittakerTable, n: int, r: int, m: int, a: int,
                param: UnramParam | None, T: int = DEFAULT_T, q: int | None = None,
                low: int = 0, degree_bound: int | None = None, tol: float = 1e-9
                ) -> XiObject:
    """Xi = P_phi_pi Psi / P_As, then Y -> 1.

    Args:
        table: Torus Whittaker values.
        n, r: Ranks.
        m, a: Level and conductor.
        param: Parameter of pi; None means P_phi_pi = 1 (pure Psi / P_As).
        T: Series truncation.
        q: Value of Q = q_E^{1/2} (= q_F) used to fold Q-powers for numeric
            tables and to measure tails.
        low: Lowest torus entry (see ``psi_partial_sum``).
        degree_bound: Highest Y-degree that may survive; defaults to
            r (m - a) + r max(0, -low).
        tol: Tolerance for the termination check.

    Raises:
        NonTerminatingError: If some coefficient above the bound exceeds tol.
    """
    psi = psi_series(table, n, r, T, low)
    series = psi * LaurentSeriesY.from_poly(asai_poly(r), T=T).inverse()
    if param is not None:
        series = series * LaurentSeriesY.from_poly(tensor_poly(param, r), T=T)
    bound = r * (m - a) + r * max(0, -low) if degree_bound is None else degree_bound
    if bound > series.T:
        raise ValueError(f"truncation T = {series.T} is below the degree bound {bound}")
    lo = min(low * r, 0)
    tail = series.tail_norm(bound, q)
    if tail > tol:
        raise NonTerminatingError(f"coefficients above degree {bound} reach {tail:.3e}")
    poly = _specialize_series(series, bound, lo)
    return XiObject(poly, series, n, r, m, a, table.normalization, tail)


def _fold(P: SymLaurentPoly, q) -> SymLaurentPoly:
    return P.qfree(q) if q is not None else P


def _residual(P: SymLaurentPoly, Q: SymLaurentPoly, q) -> float:
    return _fold(P - Q, q).max_abs_coeff()


def _clean(P: SymLaurentPoly, q, tol: float) -> SymLaurentPoly:
    """Fold Q and drop numerically zero coefficients."""
    P = _fold(P, q)
    keep = {}
    for k, c in P.terms.items():
        if isinstance(c, FormalLinear):
            if c:
                keep[k] = c
        elif abs(complex(c)) > tol:
            keep[k] = c
    return SymLaurentPoly(P.nvars, keep, P.names)


# ---------------------------------------------------------------------------
# properties


def fe_residual(x: XiObject, q=None) -> float:
    """Residual of Xi(X^{-1}) = (X_1...X_r)^{a-m} Xi(X)."""
    lhs = x.poly.invert_vars()
    rhs = x.poly * SymLaurentPoly.monomial(x.r, [x.a - x.m] * x.r)
    return _residual(lhs, rhs, q)


def restriction_residual(x_r: XiObject, x_rm1: XiObject, q=None) -> float:
    """Residual of Xi_{n,r}(X_1..X_{r-1}, 0) = Xi_{n,r-1}(X_1..X_{r-1})."""
    return _residual(x_r.poly.drop_var(x_r.r - 1), x_rm1.poly, q)


def hecke_residual(x_acted: XiObject, x_base: XiObject, satake: SymLaurentPoly, q=None
                   ) -> float:
    """Residual of Xi(phi * v) = S(phi) Xi(v)."""
    return _residual(x_acted.poly, satake * x_base.poly, q)


def nonconstant_norm(P: SymLaurentPoly, q=None) -> float:
    return _fold(P, q).max_abs_coeff(skip_constant=True)


@dataclass
class PropertyReport:
    results: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tol: float):
        self.results[name] = {"residual": float(residual), "tolerance": tol,
                              "status": "pass" if residual <= tol else "fail"}

    @property
    def ok(self) -> bool:
        return all(v["status"] == "pass" for v in self.results.values())


def xi_check_properties(x: XiObject, context: dict | None = None, q=None, tol: float = 0.0
                        ) -> PropertyReport:
    """Check the functional equation plus whatever the context enables.

    Context keys: ``lower`` (Xi for r - 1, restriction), ``acted`` and
    ``satake`` (Hecke equivariance), ``zero_table`` (a vanishing torus
    restriction must give zero), ``grading`` (nonnegative Y_n-grading for r = n).
    """
    context = context or {}
    rep = PropertyReport()
    rep.add("functional_equation", fe_residual(x, q), tol)
    if "lower" in context:
        rep.add("restriction", restriction_residual(x, context["lower"], q), tol)
    if "acted" in context:
        rep.add("hecke", hecke_residual(context["acted"], x, context["satake"], q), tol)
    if context.get("zero_table"):
        rep.add("kernel", _fold(x.poly, q).max_abs_coeff(), tol)
    if context.get("grading") and x.r == x.n:
        grades = yn_grade(_clean(x.poly, q, max(tol, 1e-12)))
        neg = min(grades) if grades else 0
        rep.add("grading", 0.0 if neg >= 0 else float(-neg), 0.0)
    return rep


def newform_constant(x: XiObject, q=None, tol: float = 1e-9):
    """The constant value of Xi at m = a, r = n.

    Raises:
        ArithmeticError: If some non-constant coefficient exceeds tol.
    """
    if x.r != x.n or x.m != x.a:
        raise ValueError("newform constancy needs r = n and m = a")
    P = _fold(x.poly, q)
    bad = P.max_abs_coeff(skip_constant=True)
    if bad > tol:
        raise ArithmeticError(f"Xi is not constant: largest non-constant coefficient {bad:.3e}")
    return P.coefficient([0] * x.r, 1 if q is not None else None)


def grading_constancy(x: XiObject, q=None, tol: float = 0.0) -> dict:
    """The grading argument at m = a: nonnegative grading plus FE forces a constant.

    The functional equation at m = a maps the Y_n-grade d to -d, so a
    polynomial supported in grades >= 0 is supported in grade 0 only, and
    grade 0 of a symmetric polynomial in the torus variables is constant.
    Returns the observed grades and both conclusions.
    """
    P = _clean(x.poly, q, max(tol, 1e-12))
    grades = sorted(yn_grade(P)) if P.terms else []
    return {"grades": grades, "nonnegative": all(g >= 0 for g in grades),
            "fe_residual": fe_residual(x, q),
            "constant": nonconstant_norm(P) <= tol}


# ---------------------------------------------------------------------------
# oracle-facing numerics


def specialize_psi(table: WhittakerTable, n: int, r: int, alphas: Sequence, s: complex,
                   qE: int, T: int, low: int = 0) -> complex:
    """Psi at X -> alpha, Y -> q_E^{-s+1/2}, truncated at degree T."""
    Y = qE ** (-s + 0.5)
    total = 0j
    q = math.isqrt(qE)
    for ell in range(low * r, T + 1):
        P = psi_partial_sum(table, n, r, ell, low)
        if P.terms:
            total += complex(P.evaluate(list(alphas), q)) * Y ** ell
    return total


def rs_ratio(table: WhittakerTable, param: UnramParam, alphas: Sequence, s: complex, qE: int,
             T: int) -> complex:
    """L(2s, As) Psi / L(s, pi x tau) for unramified tau; rank r = len(alphas)."""
    r = len(alphas)
    psi = specialize_psi(table, table.n, r, alphas, s, qE, T)
    return psi * asai_l_value(alphas, qE, s) / rs_l_value(param, alphas, qE, s)


def calibrate_kappa(table: WhittakerTable, beta, qE: int, kmax: int) -> list[float]:
    """Exponent c_k with kappa_k = q_E^{c_k k} making Xi constant, from an n = 1 table.

    Constancy of Xi at level 0 forces W_k kappa_k = W_0 q_E^{-k/2} h_k(beta, 1/beta)
    where h_k is the complete homogeneous polynomial; solving for kappa_k
    from oracle values gives the exponent directly.
    """
    out = []
    b = complex(rat(beta))
    w0 = complex(table[(0,)])
    for k in range(1, kmax + 1):
        hk = sum(b ** (k - 2 * i) for i in range(k + 1))
        wk = complex(table[(k,)])
        kappa = w0 * qE ** (-k / 2) * hk / wk
        out.append(math.log(abs(kappa)) / (k * math.log(qE)))
    return out


# ---------------------------------------------------------------------------
# oldforms


def eta_factor(n: int, steps: int, printed: bool = True) -> SymLaurentPoly:
    """Torus factor of Xi under `steps` applications of pi(p^{-mu_1}).

    Printed form: (q_E^{n(n-1)/2} X_1...X_n)^steps. Measured form (what the
    torus integral gives with the chosen measures): (q_E^{n^2/2} X_1...X_n)^steps.
    """
    qh = n * (n - 1) if printed else n * n
    return SymLaurentPoly.monomial(n, [steps] * n, 1, qh * steps)


def oldform_xi(base: SymLaurentPoly, n: int, a: int, m_new: int, satake: SymLaurentPoly,
               form: str = "printed") -> SymLaurentPoly:
    """Closed-form Xi of eta_{lam,a,m'}(v_0) from Xi of v_0 at level a.

    ``form = "printed"``: q_E^{(n(n-1) + (m'-a))/2} (X_1...X_n)^{(m'-a)/2} S(phi) base.
    ``form = "composed"``: the single-step eta factor applied (m'-a)/2 times, then Hecke equivariance.
    ``form = "measured"``: the same with the measured eta factor.

    Raises:
        ValueError: On a parity mismatch.
    """
    if (m_new - a) % 2:
        raise ValueError("m' - a must be even")
    steps = (m_new - a) // 2
    if form == "printed":
        pref = SymLaurentPoly.monomial(n, [steps] * n, 1, n * (n - 1) + (m_new - a))
    elif form == "composed":
        pref = eta_factor(n, steps, printed=True)
    elif form == "measured":
        pref = eta_factor(n, steps, printed=False)
    else:
        raise ValueError(f"unknown form {form!r}")
    return pref * satake * base


def level_one_up_xi(constant, n: int) -> SymLaurentPoly:
    """Lambda' (1 + e_1 + ... + e_n) for the level a+1 vector."""
    out = SymLaurentPoly.zero(n)
    for j in range(n + 1):
        out = out + elem_sym(j, n)
    return out * constant


# ---------------------------------------------------------------------------
# intertwining operator (rank one)


@dataclass
class GKReport:
    s: complex
    computed: complex
    predicted: complex
    bound: float

    @property
    def residual(self) -> float:
        return abs(self.computed - self.predicted)


def gk_integral(F: LocalField, alpha, m: int, s: complex, depth: int = 12) -> GKReport:
    """int_F xi^m_{tau,s}(w^{-1} chi_{2e1}(x)) dx for the unramified character alpha.

    The section is xi(b k) = (alpha q_E^{-s})^{val b_11} for k in R_{1,m}.
    Shells val(x) = a for -depth <= a < -m; on x in p^{-m} the integrand
    is constant. The omitted shells form a geometric tail.
    """
    q, qE = F.q, F.qE
    T = complex(qE) ** (-s)
    z = complex(rat(alpha)) * T
    w = GroupElement(F, [[F.zero, F.one], [F.one, F.zero]])

    def val_b(x) -> int:
        from .matgroups import build_root_element_h
        h = w * build_root_element_h(F, 1, "2e1", x)
        b, _ = iwasawa_decompose_h(h, m % 2, m)
        return int(b.rows[0][0].val())

    total = z ** val_b(F.zero) * float(mpq(q) ** m)
    for a in range(-depth, -m):
        vol = float(mpq(q) ** (-a) * (1 - mpq(1, q)))
        total += z ** val_b(F.uniformizer(a)) * vol
    a1, a2 = -depth - 1, -depth - 2
    t1 = abs(z ** val_b(F.uniformizer(a1))) * float(mpq(q) ** (-a1))
    t2 = abs(z ** val_b(F.uniformizer(a2))) * float(mpq(q) ** (-a2))
    ratio = t2 / t1 if t1 else 0.0
    if ratio >= 1:
        raise OracleError("intertwining integral diverges at this s")
    bound = t1 / (1 - ratio)
    pred = gk_formula(alpha, m, s, qE)
    return GKReport(s, total, pred, bound)


def gk_formula(alpha, m: int, s: complex, qE: int) -> complex:
    """(alpha q_E^{1/2-s})^m L(2s-1, As)/L(2s, As) at r = 1."""
    T = complex(qE) ** (-s)
    a = complex(rat(alpha))
    q = math.sqrt(qE)
    return (a * q * T) ** m * (1 - a * T) / (1 - a * q * T)
