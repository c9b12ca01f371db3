import random

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from unitary_newforms.dimension import dim_oldforms
from unitary_newforms.exactnum import LocalField
from unitary_newforms.hecke import (BudgetError, GLHeckeElement, HHeckeElement, apply_hecke,
                                    apply_level_one_up, apply_level_raising,
                                    conjectural_basis_partitions, cosets_rank_one,
                                    delta_half_exponent, enumerate_cosets, hermite_form,
                                    involution_iota, level_one_up_reps, partitions_bounded,
                                    random_gl_element, reeder_monomials, satake_from_counts,
                                    satake_transform, trace_count)
from unitary_newforms.matgroups import Sampler, torus
from unitary_newforms.polyalg import SymLaurentPoly
from unitary_newforms.whittaker import WhittakerTable, u3_spherical_table_exact

F3, F5 = LocalField(3), LocalField(5)
X = SymLaurentPoly.var(1, 0)


@st.composite
def gl_elements(draw, n=None):
    n = draw(st.integers(1, 3)) if n is None else n
    return random_gl_element(n, 3, random.Random(draw(st.integers(0, 10 ** 9))))


@given(gl_elements())
def test_iota_is_an_involution(h):
    assert involution_iota(involution_iota(h)) == h


@given(st.integers(0, 10 ** 9), st.integers(1, 3))
def test_iota_is_multiplicative(seed, n):
    rng = random.Random(seed)
    a, b = random_gl_element(n, 3, rng, 3), random_gl_element(n, 3, rng, 3)
    assert involution_iota(a * b) == involution_iota(a) * involution_iota(b)
    assert involution_iota(a + b) == involution_iota(a) + involution_iota(b)


def test_gl_element_validation():
    with pytest.raises(ValueError):
        GLHeckeElement.monomial(1, 3, [0, 1])
    with pytest.raises(ValueError):
        GLHeckeElement.monomial(1, 3, [0, -1, 0])
    h = GLHeckeElement.monomial(1, 3, [-2, 1, 0], 5)
    assert h.degree() == {-1}


@pytest.mark.parametrize("n,ell", [(1, 3), (2, 2), (3, 4)])
def test_monomial_count(n, ell):
    from math import comb
    mons = list(reeder_monomials(n, ell))
    assert len(mons) == len(set(mons)) == comb(ell + 2 * n, 2 * n)
    assert all(sum(x) == ell for x in mons)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trace_equals_binomial(n):
    for a in range(5):
        for j in range(9):
            assert trace_count(n, a, a + j) == dim_oldforms(n, a, a + j)
    assert trace_count(n, 3, 1) == 0


def test_hermite_form_is_a_lattice_invariant():
    S = Sampler(F3, 2, seed=4)
    g = torus(F3, [F3.uniformizer(2), F3.uniformizer(1)], odd=False)
    cols = lambda h: [[h.rows[i][j] for i in range(4)] for j in range(4)]
    key = hermite_form(cols(g))
    for _ in range(5):
        assert hermite_form(cols(g * S.r_element(2, 0))) == key
    with pytest.raises(ZeroDivisionError):
        hermite_form([[F3.zero, F3.zero], [F3.zero, F3.one]])


@pytest.mark.parametrize("lam,size", [(1, 12), (2, 108)])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_rank_one_coset_count_matches_sl2_index(lam, size, m):
    # the index q^(2 lam) + q^(2 lam - 1) of SL_2 agrees with U(1,1)
    assert len(cosets_rank_one(F3, lam, m)) == size


@pytest.mark.parametrize("m", [0, 1, 2])
def test_coset_methods_agree(m):
    a = cosets_rank_one(F3, 1, m).counts()
    b = enumerate_cosets(F3, 1, (1,), m).counts()
    assert a == b == {(1,): 9, (0,): 2, (-1,): 1}


def test_enumerate_cosets_budget_and_validation():
    with pytest.raises(BudgetError):
        enumerate_cosets(F3, 1, (2,), budget=20)
    with pytest.raises(ValueError):
        enumerate_cosets(F3, 2, (0, 1))


@pytest.mark.parametrize("F,lam,m,expected", [
    (F3, (1,), 0, 3 * X.invert_vars() + 2 + 3 * X),
    (F3, (1,), 2, 3 * X.invert_vars() + 2 + 3 * X),
    (F5, (1,), 0, 5 * X.invert_vars() + 4 + 5 * X),
    (F3, (2,), 0, 9 * X.invert_vars() ** 2 + 6 * X.invert_vars() + 6 + 6 * X + 9 * X ** 2),
    (F3, (0,), 3, SymLaurentPoly.const(1, 1)),
])
def test_satake_fixtures(F, lam, m, expected):
    assert satake_transform(F, lam, 1, m) == expected


def test_satake_method_validation():
    with pytest.raises(ValueError):
        satake_transform(F3, (1, 0), 2, 0, method="count")
    with pytest.raises(ValueError):
        satake_transform(F3, (1,), 2)


def test_delta_half_exponent():
    assert delta_half_exponent((1,)) == 1
    assert delta_half_exponent((1, 0)) == 3
    assert satake_from_counts(1, {(1,): 9}).qfree(3) == 3 * X


@pytest.mark.slow
def test_rank_two_satake_fixture():
    c = enumerate_cosets(F3, 2, (1, 0), 0)
    assert len(c) == 840
    assert c.counts() == {(1, 0): 729, (0, 1): 81, (0, 0): 20, (0, -1): 9, (-1, 0): 1}
    S = satake_transform(F3, (1, 0), 2, 0)
    X1, X2 = SymLaurentPoly.var(2, 0), SymLaurentPoly.var(2, 1)
    assert S == 27 * (X1 + X1.invert_vars() + X2 + X2.invert_vars()) + 20


def test_hecke_element_satake_is_linear():
    h = HHeckeElement.basis(1, 0, (1,), 2) + HHeckeElement.basis(1, 0, (0,), -1)
    assert h.satake(F3) == 2 * (3 * X.invert_vars() + 2 + 3 * X) - 1


@pytest.fixture(scope="module")
def table():
    return u3_spherical_table_exact(F3, mpq(1, 2), -4, 16)


def test_hecke_action_commutes(table):
    c1, c2 = cosets_rank_one(F3, 1, 0), cosets_rank_one(F3, 2, 0)
    A = apply_hecke(apply_hecke(table, c1), c2)
    B = apply_hecke(apply_hecke(table, c2), c1)
    common = set(A.keys()) & set(B.keys())
    assert len(common) > 5
    assert all(A[k] == B[k] for k in common)


def test_hecke_action_on_zero_table_is_zero():
    z = WhittakerTable(1, {(k,): mpq(0) for k in range(-3, 6)})
    out = apply_hecke(z, cosets_rank_one(F3, 1, 0))
    assert all(v == 0 for v in out.entries.values())


def test_hecke_action_rank_check(table):
    with pytest.raises(ValueError):
        apply_hecke(WhittakerTable(2, {(0, 0): 1}), cosets_rank_one(F3, 1, 0))


def test_level_raising_validation(table):
    with pytest.raises(ValueError):
        apply_level_raising(F3, (1,), 0, 3, table)
    with pytest.raises(ValueError):
        apply_level_raising(F3, (2,), 0, 2, table)
    same = apply_level_raising(F3, (0,), 0, 0, table)
    assert same.entries == table.entries


def test_level_one_up(table):
    assert len(level_one_up_reps(F3)) == F3.p + 1
    up = apply_level_one_up(F3, table)
    assert up.level == 1
    # the spherical vector is fixed by the coset sum, so v' = (p + 1) v on the torus of level 0
    with pytest.raises(ValueError):
        apply_level_one_up(F3, up)


@pytest.mark.parametrize("n,a,m", [(1, 0, 4), (2, 1, 7), (3, 0, 6)])
def test_conjectural_basis_size_is_the_dimension(n, a, m):
    assert len(conjectural_basis_partitions(n, a, m)) == dim_oldforms(n, a, m)
    with pytest.raises(ValueError):
        conjectural_basis_partitions(n, a + 5, a)


def test_partitions_bounded():
    assert partitions_bounded(2, 1) == [(0, 0), (1, 0), (1, 1)]
