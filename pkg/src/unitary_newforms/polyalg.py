"""Laurent polynomials with a formal half-power of q_E, and Y-graded series.

A ``SymLaurentPoly`` is a finite sum of terms ``c * Q^k * X_1^{e_1} ... X_r^{e_r}``
where ``Q`` stands for q_E^{1/2} (which equals q = p numerically). Keeping
``Q`` formal lets identities be checked for all primes at once.

Coefficients are exact rationals in the symbolic pipeline. Floats and complex
numbers are accepted so the same container can carry oracle data, and
``FormalLinear`` coefficients let table entries be independent unknowns.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

from .exactnum import rat

_FLOATS = (float, complex)


class FormalLinear:
    """Rational linear combination of named unknowns.

    Products of two ``FormalLinear`` values are not supported, which is all
    the table-linear computations here need.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[str, object] | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def symbol(cls, name: str) -> "FormalLinear":
        return cls({name: mpq(1)})

    def __add__(self, other) -> "FormalLinear":
        if not isinstance(other, FormalLinear):
            if other == 0:
                return self
            other = FormalLinear({"1": other})
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = _cadd(out.get(k, 0), v)
        return FormalLinear(out)

    __radd__ = __add__

    def __neg__(self) -> "FormalLinear":
        return FormalLinear({k: _cneg(v) for k, v in self.terms.items()})

    def __sub__(self, other) -> "FormalLinear":
        return self + (-other if isinstance(other, FormalLinear) else _cneg(other))

    def __rsub__(self, other) -> "FormalLinear":
        return (-self) + other

    def __mul__(self, other) -> "FormalLinear":
        if isinstance(other, FormalLinear):
            raise TypeError("product of two formal linear forms")
        return FormalLinear({k: _cmul(v, other) for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, FormalLinear):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == {"1": other}

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*{k}" for k, v in sorted(self.terms.items()))

    def evaluate(self, values: Mapping[str, object]):
        """Substitute numbers for every unknown (``"1"`` is the constant)."""
        total = 0
        for k, v in self.terms.items():
            total = _cadd(total, _cmul(v, 1 if k == "1" else values[k]))
        return total


def _is_float(x) -> bool:
    return isinstance(x, _FLOATS)


def _as_num(x):
    if isinstance(x, complex):
        return x
    return float(x)


def _cadd(a, b):
    if isinstance(a, FormalLinear):
        return a + b
    if isinstance(b, FormalLinear):
        return b + a
    if _is_float(a) or _is_float(b):
        return _as_num(a) + _as_num(b)
    return a + b


def _cmul(a, b):
    if isinstance(a, FormalLinear):
        return a * b
    if isinstance(b, FormalLinear):
        return b * a
    if _is_float(a) or _is_float(b):
        return _as_num(a) * _as_num(b)
    return a * b


def _cneg(a):
    return -a


def _is_zero(c) -> bool:
    if isinstance(c, FormalLinear):
        return not c
    return c == 0


def _coerce_coeff(c):
    if isinstance(c, (FormalLinear, float, complex)):
        return c
    return rat(c)


def _coeff_abs(c) -> float:
    if isinstance(c, FormalLinear):
        return float("inf") if c else 0.0
    return abs(complex(_as_num(c)))


Key = tuple  # ((e_1, ..., e_r), qh)


class SymLaurentPoly:
    """Laurent polynomial in ``nvars`` variables with a formal Q = q_E^{1/2}.

    Args:
        nvars: Number of variables.
        terms: Mapping from ``(exponent_tuple, qh)`` to coefficient.
        names: Optional variable names (default ``X1..Xr``).
    """

    __slots__ = ("nvars", "terms", "names")

    def __init__(self, nvars: int, terms: Mapping[Key, object] | None = None,
                 names: Sequence[str] | None = None):
        self.nvars = nvars
        self.names = tuple(names) if names else tuple(f"X{i + 1}" for i in range(nvars))
        clean: dict[Key, object] = {}
        for (exps, qh), c in (terms or {}).items():
            if len(exps) != nvars:
                raise ValueError("exponent vector has the wrong length")
            if _is_zero(c):
                continue
            clean[(tuple(int(e) for e in exps), int(qh))] = _coerce_coeff(c)
        self.terms = clean

    # constructors

    @classmethod
    def zero(cls, nvars: int, names=None) -> "SymLaurentPoly":
        return cls(nvars, {}, names)

    @classmethod
    def const(cls, nvars: int, c=1, qh: int = 0, names=None) -> "SymLaurentPoly":
        return cls(nvars, {((0,) * nvars, qh): c}, names)

    @classmethod
    def monomial(cls, nvars: int, exps: Sequence[int], c=1, qh: int = 0,
                 names=None) -> "SymLaurentPoly":
        return cls(nvars, {(tuple(exps), qh): c}, names)

    @classmethod
    def var(cls, nvars: int, i: int, names=None) -> "SymLaurentPoly":
        exps = [0] * nvars
        exps[i] = 1
        return cls.monomial(nvars, exps, names=names)

    def _new(self, terms) -> "SymLaurentPoly":
        return SymLaurentPoly(self.nvars, terms, self.names)

    # arithmetic

    def _lift(self, other) -> "SymLaurentPoly":
        if isinstance(other, SymLaurentPoly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return SymLaurentPoly.const(self.nvars, other, names=self.names)

    def __add__(self, other) -> "SymLaurentPoly":
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = _cadd(out[k], c) if k in out else c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self) -> "SymLaurentPoly":
        return self._new({k: _cneg(c) for k, c in self.terms.items()})

    def __sub__(self, other) -> "SymLaurentPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "SymLaurentPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "SymLaurentPoly":
        if not isinstance(other, SymLaurentPoly):
            other = _coerce_coeff(other)
            return self._new({k: _cmul(c, other) for k, c in self.terms.items()})
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        out: dict[Key, object] = {}
        for (e1, q1), c1 in self.terms.items():
            for (e2, q2), c2 in other.terms.items():
                k = (tuple(a + b for a, b in zip(e1, e2)), q1 + q2)
                prod = _cmul(c1, c2)
                out[k] = _cadd(out[k], prod) if k in out else prod
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SymLaurentPoly":
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have negative powers")
            ((exps, qh), c), = self.terms.items()
            return self._new({(tuple(k * e for e in exps), k * qh): 1 / c ** (-k)})
        out = SymLaurentPoly.const(self.nvars, 1, names=self.names)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymLaurentPoly):
            other = self._lift(other)
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (exps, qh), c in sorted(self.terms.items()):
            mono = "*".join(
                f"{n}^{e}" if e != 1 else n for n, e in zip(self.names, exps) if e
            )
            q = f"Q^{qh}" if qh else ""
            parts.append("*".join(s for s in (f"({c})", q, mono) if s))
        return " + ".join(parts)

    # structure

    def is_exact(self) -> bool:
        return all(not _is_float(c) for c in self.terms.values())

    def qfree(self, q) -> "SymLaurentPoly":
        """Replace Q by the number ``q`` (q_E^{1/2}), folding it into coefficients."""
        out: dict[Key, object] = {}
        for (exps, qh), c in self.terms.items():
            factor = rat(q) ** qh if not _is_float(q) else q ** qh
            v = _cmul(c, factor)
            k = (exps, 0)
            out[k] = _cadd(out[k], v) if k in out else v
        return self._new(out)

    def collect(self) -> dict[tuple, "SymLaurentPoly"]:
        """Group terms by X-exponent: map exps -> polynomial in Q alone."""
        out: dict[tuple, dict] = {}
        for (exps, qh), c in self.terms.items():
            out.setdefault(exps, {})[((), qh)] = c
        return {e: SymLaurentPoly(0, t) for e, t in out.items()}

    def coefficient(self, exps: Sequence[int], q=None):
        """Coefficient of a monomial; with ``q`` given, Q is evaluated."""
        exps = tuple(exps)
        if q is None:
            return {qh: c for (e, qh), c in self.terms.items() if e == exps}
        total = 0
        for (e, qh), c in self.terms.items():
            if e == exps:
                total = _cadd(total, _cmul(c, (rat(q) if not _is_float(q) else q) ** qh))
        return total

    def substitute(self, images: Sequence["SymLaurentPoly"]) -> "SymLaurentPoly":
        """Replace variable i by ``images[i]`` (monomials may be inverted)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0].nvars if images else 0
        names = images[0].names if images else ()
        total = SymLaurentPoly.zero(target, names)
        for (exps, qh), c in self.terms.items():
            term = SymLaurentPoly.const(target, c, qh, names)
            for img, e in zip(images, exps):
                if e:
                    term = term * img ** e
            total = total + term
        return total

    def map_exponents(self, f: Callable[[tuple], tuple], nvars: int | None = None,
                      names=None) -> "SymLaurentPoly":
        nv = self.nvars if nvars is None else nvars
        out: dict[Key, object] = {}
        for (exps, qh), c in self.terms.items():
            k = (tuple(f(exps)), qh)
            out[k] = _cadd(out[k], c) if k in out else c
        return SymLaurentPoly(nv, out, names if names else (self.names if nv == self.nvars else None))

    def invert_vars(self, which: Iterable[int] | None = None) -> "SymLaurentPoly":
        """Apply X_j -> X_j^{-1} for j in ``which`` (default all)."""
        idx = set(range(self.nvars) if which is None else which)
        return self.map_exponents(lambda e: tuple(-x if i in idx else x for i, x in enumerate(e)))

    def permute(self, perm: Sequence[int]) -> "SymLaurentPoly":
        """Rename X_i -> X_{perm[i]}."""
        def f(e):
            out = [0] * self.nvars
            for i, x in enumerate(e):
                out[perm[i]] = x
            return tuple(out)
        return self.map_exponents(f)

    def is_symmetric(self) -> bool:
        for i in range(self.nvars - 1):
            perm = list(range(self.nvars))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            if self.permute(perm) != self:
                return False
        return True

    def is_hyperoctahedral_invariant(self) -> bool:
        return self.is_symmetric() and (self.nvars == 0 or self.invert_vars([0]) == self)

    def total_degrees(self) -> set[int]:
        return {sum(e) for (e, _), _c in self.terms.items()}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = self.total_degrees()
        if not degs:
            return True
        return len(degs) == 1 and (degree is None or degs == {degree})

    def degree_in(self, i: int) -> tuple[int, int]:
        """(min, max) exponent of variable i; (0, 0) for the zero polynomial."""
        es = [e[i] for (e, _), _c in self.terms.items()]
        return (min(es), max(es)) if es else (0, 0)

    def drop_var(self, i: int) -> "SymLaurentPoly":
        """Set variable i to 0 (requires no negative powers of it)."""
        lo, _ = self.degree_in(i)
        if lo < 0:
            raise ValueError("cannot set a variable with negative powers to 0")
        names = self.names[:i] + self.names[i + 1:]
        out: dict[Key, object] = {}
        for (exps, qh), c in self.terms.items():
            if exps[i] == 0:
                k = (exps[:i] + exps[i + 1:], qh)
                out[k] = _cadd(out[k], c) if k in out else c
        return SymLaurentPoly(self.nvars - 1, out, names)

    def evaluate(self, point: Sequence, q):
        """Evaluate at numbers (exact or complex); ``q`` is the value of Q."""
        total = 0
        for (exps, qh), c in self.terms.items():
            v = _cmul(c, _power(q, qh))
            for x, e in zip(point, exps):
                if e:
                    v = _cmul(v, _power(x, e))
            total = _cadd(total, v)
        return total

    def max_abs_coeff(self, q=None, skip_constant: bool = False) -> float:
        poly = self.qfree(q) if q is not None else self
        best = 0.0
        for (exps, _qh), c in poly.terms.items():
            if skip_constant and not any(exps):
                continue
            best = max(best, _coeff_abs(c))
        return best

    def map_coeffs(self, f: Callable) -> "SymLaurentPoly":
        return self._new({k: f(c) for k, c in self.terms.items()})

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [
                {"exps": list(e), "qh": qh, "coeff": _coeff_json(c)}
                for (e, qh), c in sorted(self.terms.items())
            ],
        }


def _coeff_json(c):
    if isinstance(c, complex):
        return [repr(c.real), repr(c.imag)]
    if isinstance(c, float):
        return repr(c)
    if isinstance(c, FormalLinear):
        return {k: str(v) for k, v in sorted(c.terms.items())}
    return str(c)


def _power(x, e: int):
    if e == 0:
        return 1
    if _is_float(x):
        return x ** e
    if isinstance(x, SymLaurentPoly):
        return x ** e
    x = rat(x)
    return x ** e


def poly_arith(op: str, P: SymLaurentPoly, Q=None, **kwargs):
    """Named dispatch over polynomial and series operations.

    Args:
        op: ``add``, ``sub``, ``mul``, ``invert_vars``, ``substitute``,
            ``evaluate`` or ``series_div`` (P / Q as a Y-series).
        P: Left operand.
        Q: Right operand or argument.
        **kwargs: Passed through (for example ``q`` for ``evaluate``).
    """
    if op == "add":
        return P + Q
    if op == "sub":
        return P - Q
    if op == "mul":
        return P * Q
    if op == "invert_vars":
        return P.invert_vars(Q)
    if op == "substitute":
        return P.substitute(Q)
    if op == "evaluate":
        return P.evaluate(Q, kwargs["q"])
    if op == "series_div":
        T = kwargs.get("T", DEFAULT_T)
        return LaurentSeriesY.from_poly(P, T=T) / LaurentSeriesY.from_poly(Q, T=T)
    raise ValueError(f"unknown operation {op!r}")


def exact_divide(P: SymLaurentPoly, D: SymLaurentPoly, max_steps: int = 100000) -> SymLaurentPoly:
    """Exact quotient P / D by lexicographic long division.

    Raises:
        ArithmeticError: If D does not divide P.
    """
    if not D.terms:
        raise ZeroDivisionError("division by the zero polynomial")
    lead = max(D.terms)
    lc = D.terms[lead]
    rem = P
    quot = SymLaurentPoly.zero(P.nvars, P.names)
    for _ in range(max_steps):
        if not rem.terms:
            return quot
        top = max(rem.terms)
        exps = tuple(a - b for a, b in zip(top[0], lead[0]))
        qh = top[1] - lead[1]
        c = _cmul(rem.terms[top], 1 / lc if not _is_float(lc) else 1.0 / lc)
        t = SymLaurentPoly.monomial(P.nvars, exps, c, qh, P.names)
        quot = quot + t
        rem = rem - t * D
    raise ArithmeticError("polynomial does not divide exactly")


def elem_sym(j: int, r: int) -> SymLaurentPoly:
    """Elementary symmetric polynomial e_j(X_1..X_r).

    Raises:
        ValueError: If j is outside [0, r].
    """
    if not 0 <= j <= r:
        raise ValueError(f"need 0 <= j <= r, got j={j}, r={r}")
    terms = {}
    for S in itertools.combinations(range(r), j):
        exps = [0] * r
        for i in S:
            exps[i] = 1
        terms[(tuple(exps), 0)] = mpq(1)
    return SymLaurentPoly(r, terms)


def _check_partition(lam: Sequence[int], r: int) -> tuple:
    lam = tuple(int(x) for x in lam)
    if any(x < 0 for x in lam) or any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"not a partition: {lam}")
    lam = tuple(x for x in lam if x)
    if len(lam) > r:
        raise ValueError(f"partition {lam} has more than {r} parts")
    return lam + (0,) * (r - len(lam))


def _alternant(exps: Sequence[int], r: int) -> SymLaurentPoly:
    terms = {}
    for perm in itertools.permutations(range(r)):
        sign = _perm_sign(perm)
        e = [0] * r
        for i, j in enumerate(perm):
            e[j] = exps[i]
        terms[(tuple(e), 0)] = mpq(sign)
    return SymLaurentPoly(r, terms)


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


_SCHUR_CACHE: dict[tuple, SymLaurentPoly] = {}


def schur_poly(lam: Sequence[int], r: int) -> SymLaurentPoly:
    """Schur polynomial s_lam(X_1..X_r) as the bialternant ratio.

    Dominant weights with negative entries are handled by factoring out a
    power of X_1...X_r.

    Raises:
        ValueError: If ``lam`` is not weakly decreasing or too long.
    """
    lam = tuple(int(x) for x in lam) + (0,) * (r - len(lam))
    if len(lam) > r:
        raise ValueError(f"weight {lam} has more than {r} entries")
    if any(lam[i] < lam[i + 1] for i in range(r - 1)):
        raise ValueError(f"not dominant: {lam}")
    shift = lam[-1] if r else 0
    base = _check_partition([x - shift for x in lam], r)
    key = (base, r)
    if key not in _SCHUR_CACHE:
        rho = [r - 1 - i for i in range(r)]
        num = _alternant([b + c for b, c in zip(base, rho)], r)
        den = _alternant(rho, r)
        _SCHUR_CACHE[key] = exact_divide(num, den)
    s = _SCHUR_CACHE[key]
    if shift:
        s = s * SymLaurentPoly.monomial(r, [shift] * r)
    return s


def to_elementary(P: SymLaurentPoly) -> dict[tuple, SymLaurentPoly]:
    """Write a symmetric Laurent polynomial in e_1..e_{r-1}, e_r^{+-1}.

    Returns:
        Mapping from exponent vectors (k_1..k_r), k_r possibly negative, to
        coefficients (polynomials in Q only).

    Raises:
        ValueError: If P is not symmetric.
    """
    r = P.nvars
    if not P.is_symmetric():
        raise ValueError("polynomial is not symmetric")
    if r == 0 or not P.terms:
        return {(): SymLaurentPoly(0, {((), qh): c for (_, qh), c in P.terms.items()})} if P.terms else {}
    shift = -min(min(e) for (e, _), _c in P.terms.items())
    rem = P * SymLaurentPoly.monomial(r, [shift] * r) if shift else P
    out: dict[tuple, dict] = {}
    elem = [elem_sym(j, r) for j in range(r + 1)]
    while rem.terms:
        top = max(e for (e, _), _c in rem.terms.items())
        block = {qh: c for (e, qh), c in rem.terms.items() if e == top}
        ks = [top[i] - top[i + 1] for i in range(r - 1)] + [top[-1]]
        prod = SymLaurentPoly.const(r, 1)
        for j, k in enumerate(ks, start=1):
            if k:
                prod = prod * elem[j] ** k
        coeff = SymLaurentPoly(r, {((0,) * r, qh): c for qh, c in block.items()})
        rem = rem - coeff * prod
        key = tuple(ks[:-1]) + (ks[-1] - shift,)
        bucket = out.setdefault(key, {})
        for qh, c in block.items():
            bucket[((), qh)] = _cadd(bucket[((), qh)], c) if ((), qh) in bucket else c
    return {k: SymLaurentPoly(0, v) for k, v in out.items()}


def yn_grade(P: SymLaurentPoly, n: int | None = None) -> dict[int, SymLaurentPoly]:
    """Split a symmetric polynomial into Y_n = X_1...X_n graded components.

    P is rewritten as a polynomial in e_1..e_{n-1} and e_n^{+-1}; the grade of
    a term is its power of e_n. Reassembly is the sum of the components.
    """
    n = P.nvars if n is None else n
    if n != P.nvars:
        raise ValueError("grading variable count must match the polynomial")
    elem = [elem_sym(j, n) for j in range(n + 1)]
    out: dict[int, SymLaurentPoly] = {}
    for ks, coeff in to_elementary(P).items():
        term = SymLaurentPoly(n, {((0,) * n, qh): c for (_, qh), c in coeff.terms.items()},
                              P.names)
        for j, k in enumerate(ks, start=1):
            if k:
                term = term * elem[j] ** k
        g = ks[-1] if ks else 0
        out[g] = out[g] + term if g in out else term
    return {g: c for g, c in sorted(out.items()) if c.terms}


DEFAULT_T = 12


class LaurentSeriesY:
    """Truncated Laurent series in Y with ``SymLaurentPoly`` coefficients.

    Args:
        nvars: Number of X variables of the coefficients.
        coeffs: Mapping degree -> coefficient.
        T: Highest stored degree.
        low: Lowest degree that may be nonzero.
    """

    __slots__ = ("nvars", "coeffs", "T", "low")

    def __init__(self, nvars: int, coeffs: Mapping[int, SymLaurentPoly] | None = None,
                 T: int = DEFAULT_T, low: int = 0):
        self.nvars = nvars
        self.T = T
        self.low = low
        self.coeffs = {}
        for d, c in (coeffs or {}).items():
            if d < low:
                raise ValueError(f"degree {d} below the declared lowest degree {low}")
            if d <= T and c.terms:
                self.coeffs[d] = c

    @classmethod
    def from_poly(cls, P: SymLaurentPoly, y_index: int | None = None,
                  T: int = DEFAULT_T) -> "LaurentSeriesY":
        """Read variable ``y_index`` (default: last) of P as the series variable."""
        yi = P.nvars - 1 if y_index is None else y_index
        groups: dict[int, dict] = {}
        for (exps, qh), c in P.terms.items():
            d = exps[yi]
            rest = exps[:yi] + exps[yi + 1:]
            groups.setdefault(d, {})[(rest, qh)] = c
        low = min(groups) if groups else 0
        names = P.names[:yi] + P.names[yi + 1:]
        coeffs = {d: SymLaurentPoly(P.nvars - 1, t, names) for d, t in groups.items()}
        return cls(P.nvars - 1, coeffs, T=T, low=min(low, 0))

    def coeff(self, d: int) -> SymLaurentPoly:
        return self.coeffs.get(d, SymLaurentPoly.zero(self.nvars))

    def __add__(self, other: "LaurentSeriesY") -> "LaurentSeriesY":
        T = min(self.T, other.T)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out[d] + c if d in out else c
        return LaurentSeriesY(self.nvars, {d: c for d, c in out.items() if d <= T},
                              T=T, low=min(self.low, other.low))

    def __neg__(self) -> "LaurentSeriesY":
        return LaurentSeriesY(self.nvars, {d: -c for d, c in self.coeffs.items()},
                              T=self.T, low=self.low)

    def __sub__(self, other: "LaurentSeriesY") -> "LaurentSeriesY":
        return self + (-other)

    def __mul__(self, other) -> "LaurentSeriesY":
        if not isinstance(other, LaurentSeriesY):
            return LaurentSeriesY(self.nvars, {d: c * other for d, c in self.coeffs.items()},
                                  T=self.T, low=self.low)
        # each factor is only known up to its own T, shifted by the other's low
        T = min(self.T + other.low, other.T + self.low)
        out: dict[int, SymLaurentPoly] = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                d = d1 + d2
                if d > T:
                    continue
                out[d] = out[d] + c1 * c2 if d in out else c1 * c2
        return LaurentSeriesY(self.nvars, out, T=T, low=self.low + other.low)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeriesY":
        """Inverse of a series whose constant term is a nonzero rational.

        Raises:
            ZeroDivisionError: If the constant term is not a unit.
        """
        c0 = self.coeff(0)
        if self.low < 0 and any(d < 0 for d in self.coeffs):
            raise ZeroDivisionError("series with negative-degree terms is not invertible here")
        if len(c0.terms) != 1 or next(iter(c0.terms)) != ((0,) * self.nvars, 0):
            raise ZeroDivisionError("constant term must be a nonzero rational")
        inv0 = 1 / next(iter(c0.terms.values()))
        out: dict[int, SymLaurentPoly] = {0: SymLaurentPoly.const(self.nvars, inv0)}
        for d in range(1, self.T + 1):
            acc = SymLaurentPoly.zero(self.nvars)
            for k in range(1, d + 1):
                if k in self.coeffs and (d - k) in out:
                    acc = acc + self.coeffs[k] * out[d - k]
            if acc.terms:
                out[d] = acc * (-inv0)
        return LaurentSeriesY(self.nvars, out, T=self.T, low=0)

    def __truediv__(self, other: "LaurentSeriesY") -> "LaurentSeriesY":
        return self * other.inverse()

    def degrees(self) -> list[int]:
        return sorted(self.coeffs)

    def tail_norm(self, above: int, q=None) -> float:
        """Largest coefficient magnitude among degrees > ``above``."""
        best = 0.0
        for d, c in self.coeffs.items():
            if d > above:
                best = max(best, c.max_abs_coeff(q))
        return best

    def sum_to(self, upto: int | None = None) -> SymLaurentPoly:
        """Specialize Y -> 1 by summing the stored coefficients."""
        total = SymLaurentPoly.zero(self.nvars)
        for d, c in self.coeffs.items():
            if upto is None or d <= upto:
                total = total + c
        return total

    def as_poly(self, upto: int | None = None) -> SymLaurentPoly:
        """Return the series as a polynomial with Y as the last variable."""
        names = self.coeff(0).names + ("Y",) if self.coeffs else None
        total = SymLaurentPoly.zero(self.nvars + 1, names)
        for d, c in self.coeffs.items():
            if upto is None or d <= upto:
                total = total + c.map_exponents(lambda e, d=d: e + (d,), self.nvars + 1,
                                                names)
        return total
