"""Unramified L-parameters and the L/epsilon polynomial factories.

All polynomials live in variables ``(X_1, ..., X_r, Y)`` with ``Y`` last. The
specialization ``X_j -> alpha_j``, ``Y -> q_E^{-s+1/2}`` turns them into
inverse L-factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .exactnum import rat
from .polyalg import DEFAULT_T, LaurentSeriesY, SymLaurentPoly, elem_sym


def _names(r: int) -> tuple[str, ...]:
    return tuple(f"X{i + 1}" for i in range(r)) + ("Y",)


def _coerce_root(c):
    if isinstance(c, (float, complex)):
        return c
    return rat(c)


@dataclass(frozen=True)
class UnramParam:
    """Multiset of inverse roots of an L-factor plus a conductor exponent.

    Args:
        inverse_roots: Inverse roots c_i with L(s) = prod (1 - c_i q_E^{-s})^{-1}.
        a: Conductor exponent.
        conj_self_dual: Whether the parameter is conjugate self-dual.
    """

    inverse_roots: tuple = field(default_factory=tuple)
    a: int = 0
    conj_self_dual: bool = False

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("conductor must be nonnegative")
        object.__setattr__(self, "inverse_roots",
                           tuple(_coerce_root(c) for c in self.inverse_roots))
        if self.conj_self_dual and not self.is_self_dual():
            raise ValueError("inverse roots are not stable under c -> 1/c")

    @property
    def dim(self) -> int:
        return len(self.inverse_roots)

    @classmethod
    def u3_principal(cls, beta) -> "UnramParam":
        """Parameter (beta, 1, 1/beta) of an unramified U(3) principal series."""
        beta = _coerce_root(beta)
        return cls((beta, mpq(1) if not isinstance(beta, (float, complex)) else 1.0,
                    1 / beta), 0, True)

    def dual(self) -> "UnramParam":
        """The contragredient-conjugate parameter c -> 1/c (same conductor)."""
        return UnramParam(tuple(1 / c for c in self.inverse_roots), self.a,
                          self.conj_self_dual)

    def is_self_dual(self) -> bool:
        mine = sorted(self.inverse_roots, key=_sort_key)
        inv = sorted((1 / c for c in self.inverse_roots), key=_sort_key)
        return all(_close(x, y) for x, y in zip(mine, inv))

    def std_coeffs(self) -> list:
        """Coefficients of P(T) = prod (1 - c_i T), lowest degree first."""
        coeffs = [mpq(1)]
        for c in self.inverse_roots:
            nxt = coeffs + [0]
            for k in range(len(coeffs)):
                nxt[k + 1] = nxt[k + 1] - c * coeffs[k]
            coeffs = nxt
        return coeffs

    def L_value(self, T):
        """L-value prod (1 - c_i T)^{-1} at a number T."""
        out = 1
        for c in self.inverse_roots:
            out = out * (1 - c * T)
        return 1 / out


def _sort_key(c):
    z = complex(float(c.real), float(c.imag)) if isinstance(c, complex) else complex(float(c))
    return (round(z.real, 9), round(z.imag, 9))


def _close(x, y) -> bool:
    if isinstance(x, (float, complex)) or isinstance(y, (float, complex)):
        return abs(complex(x) - complex(y)) < 1e-12
    return x == y


def tensor_poly(pi: UnramParam, r: int) -> SymLaurentPoly:
    """P_pi(X;Y) = prod_j P_pi(q_E^{-1/2} X_j Y) in variables (X_1..X_r, Y)."""
    names = _names(r)
    coeffs = pi.std_coeffs()
    total = SymLaurentPoly.const(r + 1, 1, names=names)
    for j in range(r):
        factor = SymLaurentPoly.zero(r + 1, names)
        for k, c in enumerate(coeffs):
            exps = [0] * (r + 1)
            exps[j] = k
            exps[r] = k
            factor = factor + SymLaurentPoly.monomial(r + 1, exps, c, -k, names)
        total = total * factor
    return total


def asai_poly(r: int) -> SymLaurentPoly:
    """P_As(X;Y) = prod_{i<j} (1 - q_E^{-1} X_i X_j Y^2) prod_k (1 - q_E^{-1/2} X_k Y)."""
    if r < 1:
        raise ValueError("rank must be at least 1")
    names = _names(r)
    one = SymLaurentPoly.const(r + 1, 1, names=names)
    total = one
    for i in range(r):
        for j in range(i + 1, r):
            exps = [0] * (r + 1)
            exps[i] = exps[j] = 1
            exps[r] = 2
            total = total * (one - SymLaurentPoly.monomial(r + 1, exps, 1, -2, names))
    for k in range(r):
        exps = [0] * (r + 1)
        exps[k] = 1
        exps[r] = 1
        total = total * (one - SymLaurentPoly.monomial(r + 1, exps, 1, -1, names))
    return total


def asai_factor_count(r: int) -> int:
    return r * (r - 1) // 2 + r


def epsilon_poly(a: int, m: int, r: int) -> SymLaurentPoly:
    """The monomial (X_1...X_r)^{a-m} Y^{(a-m) r}."""
    exps = [a - m] * r + [(a - m) * r]
    return SymLaurentPoly.monomial(r + 1, exps, names=_names(r))


def conductor_arith(pieces: Sequence[tuple[str, int]]) -> int:
    """Conductor of tau_1 x ... x tau_k x| pi_0 from its pieces.

    Args:
        pieces: ``("gl", a_tau)`` for each GL factor and one ``("anchor", a_0)``.

    Raises:
        ValueError: For a negative conductor or an unknown kind.
    """
    total = 0
    for kind, a in pieces:
        if a < 0:
            raise ValueError("conductors must be nonnegative")
        if kind == "gl":
            total += 2 * a
        elif kind == "anchor":
            total += a
        else:
            raise ValueError(f"unknown piece kind {kind!r}")
    return total


def dual_conductor(a: int) -> int:
    """Conductor of the conjugate-dual parameter, which equals the original."""
    if a < 0:
        raise ValueError("conductors must be nonnegative")
    return a


def lfactor_eval(poly: SymLaurentPoly, specialization: dict | None = None,
                 T: int = DEFAULT_T, q=None) -> LaurentSeriesY:
    """Expand 1/poly as a series in its last variable Y.

    Args:
        poly: Polynomial in (X_1..X_r, Y) with constant term 1 in Y.
        specialization: Optional map from X-index to a number substituted
            before inversion (requires ``q`` to evaluate Q).
        T: Truncation degree.
        q: Value of Q = q_E^{1/2} used with ``specialization``.

    Raises:
        ZeroDivisionError: If the Y-constant term is not a nonzero rational.
    """
    if specialization:
        r = poly.nvars - 1
        keep = [i for i in range(r) if i not in specialization]
        names = tuple(poly.names[i] for i in keep) + ("Y",)
        out: dict = {}
        for (exps, qh), c in poly.qfree(q).terms.items():
            v = c
            for i, x in specialization.items():
                if exps[i]:
                    v = v * (x ** exps[i])
            key = (tuple(exps[i] for i in keep) + (exps[r],), 0)
            out[key] = out[key] + v if key in out else v
        poly = SymLaurentPoly(len(keep) + 1, out, names)
    return LaurentSeriesY.from_poly(poly, T=T).inverse()


def rs_l_value(pi: UnramParam, alphas: Sequence, qE, s) -> complex:
    """L(s, phi_pi x phi_tau) for unramified tau with Satake values ``alphas``."""
    out = 1
    for a in alphas:
        for c in pi.inverse_roots:
            out *= 1 - complex(c) * complex(a) * qE ** (-s)
    return 1 / out


def asai_l_value(alphas: Sequence, qE, s) -> complex:
    """L(2s, phi_tau, As) for unramified tau with Satake values ``alphas``."""
    out = 1
    r = len(alphas)
    for i in range(r):
        for j in range(i + 1, r):
            out *= 1 - complex(alphas[i]) * complex(alphas[j]) * qE ** (-2 * s)
        out *= 1 - complex(alphas[i]) * qE ** (-s)
    return 1 / out
