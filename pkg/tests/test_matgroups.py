import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from unitary_newforms.exactnum import LocalField
from unitary_newforms.matgroups import (LevelSpec, Sampler, build_root_element,
                                        build_weyl_rep, classify_by_invariant, coset_classify,
                                        decompose_compact, elementary_divisors, group_membership,
                                        hensel_solve, identity, identity_residual,
                                        iwasawa_decompose, levi_membership, mat_sub,
                                        sample_levi_intersection, torus)

F = LocalField(3)
LABELS = {1: ["e1", "-e1", "2e1", "-2e1"],
          2: ["e1", "-e1", "2e1", "-2e1", "e2", "-e2", "e1-e2", "-e1+e2", "e1+e2", "-e1-e2"]}


@pytest.mark.parametrize("n", [1, 2])
def test_root_elements_are_unitary_one_parameter_groups(n):
    for lab in LABELS[n]:
        y = F(5) if "2e" in lab else F(2, 1)
        g = build_root_element(F, n, lab, y)
        assert g.is_unitary(), lab
        assert (g * build_root_element(F, n, lab, -y)).rows == identity(F, 2 * n + 1).rows


def test_long_root_needs_trace_zero_parameter():
    with pytest.raises(ValueError):
        build_root_element(F, 1, "2e1", F(1, 1))


@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2]), st.sampled_from([0, 1]))
@settings(max_examples=25)
def test_iwasawa_round_trip(seed, n, e):
    S = Sampler(F, n, seed=seed)
    g = S.g_element(n)
    b, k = iwasawa_decompose(g, e)
    assert (b * k).rows == g.rows
    assert b.is_upper_triangular()
    assert group_membership(k, "K", n, e)


@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2]), st.integers(1, 4))
@settings(max_examples=20)
def test_compact_decomposition(seed, n, m):
    S = Sampler(F, n, seed=seed)
    g = S.k_element(m, n)
    dec = decompose_compact(g, LevelSpec(n, m))
    diff = mat_sub(dec.product().rows, g.rows)
    assert all(x.val() >= dec.M for row in diff for x in row)
    assert all(y.val() >= m for _, y, _ in dec.minus)
    assert all(y.val() >= 0 for _, y, _ in dec.plus)
    assert group_membership(dec.k, "R", n, m)


def test_hensel_solve_converges():
    a, b, c = F(1), F(1, 1), F(2)
    w, steps = hensel_solve(F, a, b, c, 2, 10)
    res = c - b * w - F(mpq(1, 2)) * F.uniformizer(2) * a * w * w.conj()
    assert res.val() >= 10
    assert steps >= 1


def test_hensel_solve_needs_unit():
    with pytest.raises(ArithmeticError):
        hensel_solve(F, F(1), F(3), F(1), 2, 8)


@pytest.mark.parametrize("n,r", [(1, 1), (2, 1), (2, 2)])
@pytest.mark.parametrize("m", [0, 1, 2, 3, 4])
def test_coset_representatives_distinct(n, r, m):
    spec = LevelSpec(n, m)
    pbar = [build_root_element(F, n, "e1", F.uniformizer(d)) for d in range(spec.ell + 1)]
    p = [build_root_element(F, n, "-e1", F.uniformizer(spec.e + d)) for d in range(spec.ell + 1)]
    assert [coset_classify(g, n, r, spec, "Pbar") for g in pbar] == list(range(spec.ell + 1))
    assert [coset_classify(g, n, r, spec, "P") for g in p] == list(range(spec.ell + 1))
    assert [classify_by_invariant(g, n, r, spec) for g in pbar] == list(range(spec.ell + 1))


@given(st.integers(0, 10 ** 6), st.sampled_from([(1, 1), (2, 1), (2, 2)]), st.integers(0, 4))
@settings(max_examples=15)
def test_classifier_invariance(seed, nr, m):
    n, r = nr
    spec = LevelSpec(n, m)
    S = Sampler(F, n, seed=seed, word_length=8)
    for d in range(spec.ell + 1):
        g = build_root_element(F, n, "e1", F.uniformizer(d))
        gg = S.pbar_element(n, r, 1) * g * S.k0_element(m, n)
        assert coset_classify(gg, n, r, spec) == d
        assert classify_by_invariant(gg, n, r, spec) == d


def test_classifier_validates_arguments():
    g = identity(F, 3)
    with pytest.raises(ValueError):
        coset_classify(g, 1, 2, LevelSpec(1, 2))
    with pytest.raises(ValueError):
        coset_classify(g, 1, 1, LevelSpec(1, 2), side="Q")


@pytest.mark.parametrize("side", ["Pbar", "P"])
@pytest.mark.parametrize("n,r,m", [(1, 1, 2), (1, 1, 3), (2, 1, 4), (2, 2, 3)])
def test_levi_membership(side, n, r, m):
    spec = LevelSpec(n, m)
    S = Sampler(F, n, seed=11, word_length=10)
    for d in range(spec.ell + 1):
        for _ in range(4):
            h = sample_levi_intersection(S, n, r, spec, d, side)
            assert all(levi_membership(h, n, r, spec, d, side))


@pytest.mark.parametrize("lam", [(0, 0), (2, 1), (3, 0), (1, 1)])
def test_elementary_divisors_of_torus(lam):
    S = Sampler(F, 2, seed=2)
    t = torus(F, [F.uniformizer(x) for x in lam], odd=False)
    want = sorted(list(lam) + [-x for x in lam], reverse=True)
    assert elementary_divisors(t) == want
    for _ in range(5):
        assert elementary_divisors(S.r_element(2, 0) * t * S.r_element(2, 0)) == want


def test_elementary_divisors_singular():
    with pytest.raises(ZeroDivisionError):
        elementary_divisors([[F.zero, F.zero], [F.zero, F.one]])


@pytest.mark.parametrize("n,k", [(2, 2), (3, 2), (3, 3)])
def test_commutation_identity(n, k):
    for d in range(3):
        for dp in range(d + 1):
            assert identity_residual(F, n, k, d, dp) == []
    # the opposite sign on the last factor leaves a nonzero residual
    assert identity_residual(F, n, k, 1, 0, printed=True)


def test_group_membership_basics():
    g = build_root_element(F, 1, "-e1", F.uniformizer(2))
    assert group_membership(g, "K", 1, 2)
    assert not group_membership(g, "K", 1, 3)
    w = build_weyl_rep(F, 1, None, [1], F.uniformizer(1))
    assert w.is_unitary()
    assert group_membership(F(1), "E1")
    with pytest.raises(ValueError):
        group_membership(g, "Q")
    with pytest.raises(ValueError):
        group_membership(g, "K", 2, 0)


def test_level_spec():
    s = LevelSpec(2, 7)
    assert (s.e, s.ell) == (1, 3)
    with pytest.raises(ValueError):
        LevelSpec(1, -1)
