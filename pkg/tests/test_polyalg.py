import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from unitary_newforms.polyalg import (FormalLinear, LaurentSeriesY, SymLaurentPoly, elem_sym,
                                      exact_divide, poly_arith, schur_poly, to_elementary,
                                      yn_grade)

R = 2


@st.composite
def polys(draw, nvars=R, lo=-2, hi=2, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.integers(lo, hi)) for _ in range(nvars))
        qh = draw(st.integers(-2, 2))
        terms[(exps, qh)] = mpq(draw(st.integers(-9, 9)), draw(st.integers(1, 5)))
    return SymLaurentPoly(nvars, terms)


@st.composite
def partitions(draw, r=3, top=4):
    xs = sorted((draw(st.integers(0, top)) for _ in range(r)), reverse=True)
    return tuple(xs)


def sym(P):
    return P + P.permute([1, 0])


@given(polys(), polys(), polys())
def test_ring_axioms(P, Q, S):
    assert P * (Q + S) == P * Q + P * S
    assert (P * Q) * S == P * (Q * S)
    assert P * Q == Q * P
    assert P - P == SymLaurentPoly.zero(R)


@given(polys())
def test_invert_vars_is_an_involution(P):
    assert P.invert_vars().invert_vars() == P


@given(polys(), polys())
def test_invert_vars_is_multiplicative(P, Q):
    assert (P * Q).invert_vars() == P.invert_vars() * Q.invert_vars()


@given(polys())
def test_qfree_evaluates_q(P):
    x = [mpq(2, 3), mpq(-5, 7)]
    assert P.qfree(3).evaluate(x, 1) == P.evaluate(x, 3)


def test_schur_small_cases():
    X1, X2 = SymLaurentPoly.var(2, 0), SymLaurentPoly.var(2, 1)
    assert schur_poly((1, 0), 2) == X1 + X2
    assert schur_poly((2, 0), 2) == X1 * X1 + X1 * X2 + X2 * X2
    assert schur_poly((1, 1), 2) == X1 * X2
    # s_{21}(1,1,1) counts the 8 semistandard tableaux
    assert schur_poly((2, 1, 0), 3).evaluate([1, 1, 1], 1) == 8


def test_schur_negative_dominant_weight():
    P = schur_poly((1, -1), 2)
    assert P == schur_poly((2, 0), 2) * SymLaurentPoly.monomial(2, [-1, -1])


@given(partitions())
def test_schur_is_symmetric_and_homogeneous(lam):
    P = schur_poly(lam, 3)
    assert P.is_symmetric()
    assert P.is_homogeneous(sum(lam))


@given(partitions(r=2), partitions(r=2))
def test_schur_products_stay_symmetric(a, b):
    P = schur_poly(a, 2) * schur_poly(b, 2)
    assert P.is_symmetric()


def test_schur_rejects_bad_weights():
    with pytest.raises(ValueError):
        schur_poly((0, 1), 2)
    with pytest.raises(ValueError):
        schur_poly((1, 1, 1), 2)


def test_elem_sym():
    assert elem_sym(0, 3) == SymLaurentPoly.const(3, 1)
    assert len(elem_sym(2, 4).terms) == 6
    with pytest.raises(ValueError):
        elem_sym(4, 3)


@given(polys(nvars=2, lo=-2, hi=2))
def test_to_elementary_round_trip(P):
    S = sym(P)
    elem = [elem_sym(j, 2) for j in range(3)]
    total = SymLaurentPoly.zero(2)
    for ks, coeff in to_elementary(S).items():
        term = SymLaurentPoly(2, {((0, 0), qh): c for (_, qh), c in coeff.terms.items()})
        term = term * elem[1] ** ks[0] * elem[2] ** ks[1]
        total = total + term
    assert total == S


@given(polys(nvars=2))
def test_yn_grade_reassembles(P):
    S = sym(P)
    parts = yn_grade(S)
    total = SymLaurentPoly.zero(2)
    for c in parts.values():
        total = total + c
    assert total == S


def test_yn_grade_of_monomials():
    Y = SymLaurentPoly.monomial(2, [1, 1])
    assert sorted(yn_grade(Y * elem_sym(1, 2))) == [1]
    assert sorted(yn_grade(Y.invert_vars())) == [-1]


def test_to_elementary_rejects_asymmetric():
    with pytest.raises(ValueError):
        to_elementary(SymLaurentPoly.var(2, 0))


@given(polys(), polys())
def test_exact_divide_recovers_factor(P, D):
    if not D.terms:
        return
    assert exact_divide(P * D, D) == P


def test_exact_divide_errors():
    X = SymLaurentPoly.var(1, 0)
    with pytest.raises(ZeroDivisionError):
        exact_divide(X, SymLaurentPoly.zero(1))
    with pytest.raises(ArithmeticError):
        exact_divide(X + 1, X - 1, max_steps=50)


def test_drop_var_sets_variable_to_zero():
    X1, X2 = SymLaurentPoly.var(2, 0), SymLaurentPoly.var(2, 1)
    assert (X1 * X2 + X1 + 3).drop_var(1) == SymLaurentPoly.var(1, 0) + 3


def test_hyperoctahedral_invariance():
    X = SymLaurentPoly.var(1, 0)
    assert (X + X.invert_vars()).is_hyperoctahedral_invariant()
    assert not X.is_hyperoctahedral_invariant()


@given(polys(nvars=1, lo=0, hi=3))
def test_series_inverse(P):
    one = SymLaurentPoly.const(2, 1)
    D = one - SymLaurentPoly.monomial(2, [1, 1], mpq(1, 3))
    if P.terms:
        D = D + P.map_exponents(lambda e: e + (2,), nvars=2)
    S = LaurentSeriesY.from_poly(D, T=6)
    prod = S * S.inverse()
    assert prod.coeff(0) == SymLaurentPoly.const(1, 1)
    assert all(prod.coeff(d) == SymLaurentPoly.zero(1) for d in range(1, 7))


def test_series_inverse_needs_unit_constant():
    S = LaurentSeriesY.from_poly(SymLaurentPoly.monomial(2, [0, 1]), T=4)
    with pytest.raises(ZeroDivisionError):
        S.inverse()


def test_poly_arith_dispatch():
    X = SymLaurentPoly.var(1, 0)
    assert poly_arith("add", X, X) == X * 2
    assert poly_arith("evaluate", X, [mpq(2)], q=1) == 2
    with pytest.raises(ValueError):
        poly_arith("pow", X, X)


def test_formal_linear_arithmetic():
    a, b = FormalLinear.symbol("a"), FormalLinear.symbol("b")
    c = a * 2 + b - a
    assert c == a + b
    assert not (a - a)
    assert c.evaluate({"a": 1, "b": 5}) == 6
    P = SymLaurentPoly.monomial(1, [1], a)
    assert (P * 3).coefficient([1]) == {0: a * 3}
