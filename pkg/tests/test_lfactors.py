import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from unitary_newforms.lfactors import (UnramParam, asai_factor_count, asai_l_value, asai_poly,
                                       conductor_arith, dual_conductor, epsilon_poly,
                                       lfactor_eval, rs_l_value, tensor_poly)

QE = 9
betas = st.sampled_from([mpq(1, 2), mpq(2, 3), mpq(-1, 2), mpq(3), mpq(1)])
alphas = st.sampled_from([mpq(1), mpq(1, 2), mpq(-1, 3), mpq(2)])


def test_u3_principal_is_conjugate_self_dual():
    par = UnramParam.u3_principal(mpq(1, 2))
    assert par.dim == 3
    assert par.is_self_dual()
    assert par.dual().inverse_roots == tuple(sorted(par.inverse_roots, reverse=False)) or \
        sorted(par.dual().inverse_roots) == sorted(par.inverse_roots)


def test_param_validation():
    with pytest.raises(ValueError):
        UnramParam((mpq(2),), a=-1)
    with pytest.raises(ValueError):
        UnramParam((mpq(2),), conj_self_dual=True)


def test_std_coeffs():
    par = UnramParam((mpq(2), mpq(3)))
    assert par.std_coeffs() == [1, -5, 6]


@given(betas, alphas, st.sampled_from([1.0, 1.5, 2.5]))
def test_tensor_poly_specializes_to_rs_factor(beta, alpha, s):
    par = UnramParam.u3_principal(beta)
    P = tensor_poly(par, 1)
    # X -> alpha, Y -> q_E^{1/2 - s}
    val = P.evaluate([alpha, QE ** (0.5 - s)], 3)
    assert abs(complex(val) * rs_l_value(par, [alpha], QE, s) - 1) < 1e-12


@given(alphas, alphas, st.sampled_from([1.0, 1.5, 2.5]))
def test_asai_poly_specializes_to_asai_factor(a1, a2, s):
    P = asai_poly(2)
    val = P.evaluate([a1, a2, QE ** (0.5 - s)], 3)
    assert abs(complex(val) * asai_l_value([a1, a2], QE, s) - 1) < 1e-12


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_asai_factor_count(r):
    assert asai_factor_count(r) == r * (r + 1) // 2
    assert max(e[-1] for (e, _qh) in asai_poly(r).terms) == r * r


def test_asai_rank_must_be_positive():
    with pytest.raises(ValueError):
        asai_poly(0)


def test_epsilon_poly_monomial():
    P = epsilon_poly(1, 3, 2)
    assert list(P.terms) == [((-2, -2, -4), 0)]


@given(st.lists(st.integers(0, 3), max_size=3), st.integers(0, 3))
def test_conductor_arith(a_taus, a0):
    a = conductor_arith([("gl", x) for x in a_taus] + [("anchor", a0)])
    assert a == a0 + sum(x + dual_conductor(x) for x in a_taus)


def test_conductor_errors():
    with pytest.raises(ValueError):
        conductor_arith([("gl", -1)])
    with pytest.raises(ValueError):
        conductor_arith([("ramified", 1)])
    with pytest.raises(ValueError):
        dual_conductor(-2)


def test_lfactor_eval_inverts():
    par = UnramParam.u3_principal(mpq(1, 2))
    P = tensor_poly(par, 1)
    S = lfactor_eval(P, T=6)
    prod = S * type(S).from_poly(P, T=6)
    assert prod.coeff(0).coefficient([0]) == {0: 1}
    assert all(not prod.coeff(d).terms for d in range(1, 7))


def test_lfactor_eval_specialization():
    par = UnramParam.u3_principal(mpq(1, 2))
    P = tensor_poly(par, 1)
    S = lfactor_eval(P, {0: mpq(1, 2)}, T=8, q=3)
    y = 0.1
    approx = sum(complex(S.coeff(d).evaluate([], 1)) * y ** d for d in range(9))
    exact = 1 / complex(P.evaluate([mpq(1, 2), y], 3))
    assert abs(approx - exact) < 1e-6
