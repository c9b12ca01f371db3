"""Exact arithmetic in Q_p and its unramified quadratic extension.

Elements of F are exact rationals (``gmpy2.mpq``) read p-adically. Elements
of E = F(delta), delta = sqrt(eps) with eps the smallest quadratic non-residue
mod p, are pairs of rationals. The uniformizer of both fields is p, so
``val(a + b*delta) = min(v_p(a), v_p(b))``.
"""

from __future__ import annotations

import cmath
import math
import random
from typing import Union

import gmpy2
from gmpy2 import mpq, mpz

INF = math.inf

Rational = Union[int, mpq]


def rat(x, y=1) -> mpq:
    """Coerce ``x / y`` to an exact rational.

    Accepts ints, ``mpq``, ``fractions.Fraction`` and strings like ``"3/4"``.
    """
    if isinstance(x, str):
        x = mpq(x)
    elif not isinstance(x, (int, type(mpz(0)), type(mpq(0)))):
        num = getattr(x, "numerator", None)
        den = getattr(x, "denominator", None)
        if num is None or den is None:
            raise TypeError(f"cannot convert {x!r} to an exact rational")
        x = mpq(int(num), int(den))
    return mpq(x) / mpq(y) if y != 1 else mpq(x)


def vp(x: Rational, p: int) -> Union[int, float]:
    """p-adic valuation of a rational; ``INF`` for zero."""
    x = mpq(x)
    if x == 0:
        return INF
    _, a = gmpy2.remove(x.numerator, p)
    _, b = gmpy2.remove(x.denominator, p)
    return int(a) - int(b)


def frac_p(x: Rational, p: int) -> mpq:
    """p-adic fractional part of a rational, as a rational in [0, 1).

    The result has p-power denominator and ``x - frac_p(x)`` is p-integral.
    """
    x = mpq(x)
    if x == 0:
        return mpq(0)
    den = x.denominator
    rest, k = gmpy2.remove(den, p)
    if k == 0:
        return mpq(0)
    pk = mpz(p) ** k
    # x = num / (p^k * rest); the p-part is num * rest^{-1} mod p^k over p^k
    c = (x.numerator * gmpy2.invert(rest, pk)) % pk
    return mpq(c, pk)


def reduce_rational(x: Rational, p: int, M: int) -> mpq:
    """Canonical representative of a rational modulo p^M.

    The fractional part is kept exactly and the p-integral part is replaced
    by its residue in [0, p^M).
    """
    x = mpq(x)
    f = frac_p(x, p)
    whole = x - f
    if whole == 0:
        return f
    pM = mpz(p) ** M
    r = (whole.numerator * gmpy2.invert(whole.denominator, pM)) % pM
    return f + r


def smallest_nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue modulo an odd prime."""
    if p < 3 or not gmpy2.is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    for a in range(2, p):
        if pow(a, (p - 1) // 2, p) == p - 1:
            return a
    raise ValueError("no non-residue found")


class LocalField:
    """The pair F = Q_p, E = F(sqrt(eps)) with p odd.

    Args:
        p: Odd prime; also the residue cardinality q of F.
    """

    __slots__ = ("p", "eps", "q", "qE", "_zero", "_one")

    def __init__(self, p: int):
        self.p = int(p)
        self.eps = smallest_nonresidue(self.p)
        self.q = self.p
        self.qE = self.p * self.p
        self._zero = QuadElt(self, mpq(0), mpq(0))
        self._one = QuadElt(self, mpq(1), mpq(0))

    def __repr__(self) -> str:
        return f"LocalField(p={self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("LocalField", self.p))

    def __call__(self, a=0, b=0) -> "QuadElt":
        """Build ``a + b*delta`` (``a`` may already be a field element)."""
        if isinstance(a, QuadElt):
            return a
        return QuadElt(self, rat(a), rat(b))

    @property
    def zero(self) -> "QuadElt":
        return self._zero

    @property
    def one(self) -> "QuadElt":
        return self._one

    @property
    def delta(self) -> "QuadElt":
        return QuadElt(self, mpq(0), mpq(1))

    def uniformizer(self, k: int = 1) -> "QuadElt":
        """The element p^k."""
        return QuadElt(self, mpq(self.p) ** k, mpq(0))

    def residues_E(self) -> list["QuadElt"]:
        """Representatives of o_E / p_E (q_E elements)."""
        return [self(a, b) for a in range(self.p) for b in range(self.p)]

    def random_integer(self, rng: random.Random, M: int, val: int = 0) -> "QuadElt":
        """Random element of p^val o_E, reduced mod p^(val+M)."""
        pM = self.p ** M
        scale = mpq(self.p) ** val
        return QuadElt(self, scale * rng.randrange(pM), scale * rng.randrange(pM))

    def random_unit(self, rng: random.Random, M: int) -> "QuadElt":
        """Random element of o_E^x."""
        while True:
            x = self.random_integer(rng, M)
            if x.val() == 0:
                return x

    def random_norm_one(self, rng: random.Random, M: int) -> "QuadElt":
        """Random element of E^1 = {z : z zbar = 1}, of the form w / wbar."""
        w = self.random_unit(rng, M)
        return w / w.conj()


class QuadElt:
    """Immutable element ``a + b*delta`` of E with rational coordinates."""

    __slots__ = ("F", "a", "b")

    def __init__(self, F: LocalField, a: mpq, b: mpq):
        self.F = F
        self.a = a
        self.b = b

    def _coerce(self, y) -> "QuadElt":
        if isinstance(y, QuadElt):
            return y
        return QuadElt(self.F, rat(y), mpq(0))

    def __add__(self, y) -> "QuadElt":
        y = self._coerce(y)
        return QuadElt(self.F, self.a + y.a, self.b + y.b)

    __radd__ = __add__

    def __sub__(self, y) -> "QuadElt":
        y = self._coerce(y)
        return QuadElt(self.F, self.a - y.a, self.b - y.b)

    def __rsub__(self, y) -> "QuadElt":
        return self._coerce(y) - self

    def __neg__(self) -> "QuadElt":
        return QuadElt(self.F, -self.a, -self.b)

    def __mul__(self, y) -> "QuadElt":
        if not isinstance(y, QuadElt):
            y = rat(y)
            return QuadElt(self.F, self.a * y, self.b * y)
        a, b, c, d = self.a, self.b, y.a, y.b
        return QuadElt(self.F, a * c + self.F.eps * b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "QuadElt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in E")
        return QuadElt(self.F, self.a / n, -self.b / n)

    def __truediv__(self, y) -> "QuadElt":
        if not isinstance(y, QuadElt):
            y = rat(y)
            if y == 0:
                raise ZeroDivisionError("division by zero in E")
            return QuadElt(self.F, self.a / y, self.b / y)
        return self * y.inverse()

    def __rtruediv__(self, y) -> "QuadElt":
        return self._coerce(y) * self.inverse()

    def __pow__(self, k: int) -> "QuadElt":
        if k < 0:
            return self.inverse() ** (-k)
        out = self.F.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, y) -> bool:
        if isinstance(y, QuadElt):
            return self.a == y.a and self.b == y.b
        if isinstance(y, (int, type(mpq(0)), type(mpz(0)))):
            return self.b == 0 and self.a == y
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __repr__(self) -> str:
        if self.b == 0:
            return f"{self.a}"
        if self.a == 0:
            return f"{self.b}*d"
        return f"({self.a} + {self.b}*d)"

    def conj(self) -> "QuadElt":
        return QuadElt(self.F, self.a, -self.b)

    def norm(self) -> mpq:
        """x * conj(x), an element of F."""
        return self.a * self.a - self.F.eps * self.b * self.b

    def trace(self) -> mpq:
        return 2 * self.a

    def val(self) -> Union[int, float]:
        """Normalized valuation of E (val(p) = 1); ``INF`` for zero."""
        p = self.F.p
        return min(vp(self.a, p), vp(self.b, p))

    def in_F(self) -> bool:
        return self.b == 0

    def reduce(self, M: int) -> "QuadElt":
        """Canonical representative modulo p^M (see ``reduce_precision``)."""
        p = self.F.p
        return QuadElt(self.F, reduce_rational(self.a, p, M), reduce_rational(self.b, p, M))

    def to_json(self) -> list[str]:
        return [str(self.a), str(self.b)]


def field_ops(op: str, x: QuadElt, y: QuadElt | None = None):
    """Named dispatch over the field operations of E.

    Args:
        op: One of ``add``, ``sub``, ``mul``, ``div``, ``inv``, ``neg``,
            ``conj``, ``norm``, ``val``.
        x: First operand.
        y: Second operand for binary operations.

    Returns:
        A ``QuadElt`` or, for ``norm`` and ``val``, a rational or integer.

    Raises:
        ZeroDivisionError: For ``inv`` or ``div`` by zero.
        ValueError: For an unknown operation name.
    """
    unary = {
        "inv": QuadElt.inverse,
        "neg": QuadElt.__neg__,
        "conj": QuadElt.conj,
        "norm": QuadElt.norm,
        "val": QuadElt.val,
    }
    binary = {
        "add": QuadElt.__add__,
        "sub": QuadElt.__sub__,
        "mul": QuadElt.__mul__,
        "div": QuadElt.__truediv__,
    }
    if op in unary:
        return unary[op](x)
    if op in binary:
        if y is None:
            raise ValueError(f"operation {op} needs two operands")
        return binary[op](x, y)
    raise ValueError(f"unknown field operation {op!r}")


def additive_character(x, which: str = "E", p: int | None = None) -> mpq:
    """Angle t in [0, 1) with psi(x) = exp(2 pi i t).

    ``psi_F`` is the standard character of Q_p (conductor o_F) and
    ``psi_E(x) = psi_F((x - xbar) / (2 delta))``, which reads off the
    delta-coordinate.

    Args:
        x: A ``QuadElt``, or a rational when ``which == "F"`` (then ``p`` is
            required).
        which: ``"F"`` or ``"E"``.
        p: The prime, when ``x`` is a bare rational.

    Raises:
        ValueError: If the F-character is applied to an element outside F.
    """
    if which == "F":
        if isinstance(x, QuadElt):
            if not x.in_F():
                raise ValueError("psi_F is only defined on F")
            return frac_p(x.a, x.F.p)
        if p is None:
            raise ValueError("a prime is needed for a bare rational")
        return frac_p(rat(x), p)
    if which == "E":
        return frac_p(x.b, x.F.p)
    raise ValueError(f"unknown character {which!r}")


def character_value(angle: Rational) -> complex:
    """exp(2 pi i angle) as a complex float."""
    return cmath.exp(2j * math.pi * float(angle))


def reduce_precision(x: QuadElt, M: int) -> QuadElt:
    """Canonical representative of x modulo p^M on both coordinates.

    Raises:
        ValueError: If ``M < 1``.
    """
    if M < 1:
        raise ValueError("precision M must be at least 1")
    return x.reduce(M)
