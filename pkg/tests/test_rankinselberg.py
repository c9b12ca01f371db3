import dataclasses

import pytest
from gmpy2 import mpq

from unitary_newforms.exactnum import LocalField
from unitary_newforms.hecke import (apply_hecke, apply_level_one_up, apply_level_raising,
                                    cosets_rank_one, satake_transform)
from unitary_newforms.lfactors import UnramParam
from unitary_newforms.polyalg import SymLaurentPoly
from unitary_newforms.rankinselberg import (NonTerminatingError, calibrate_kappa,
                                            dominant_weights, fe_residual, gk_formula,
                                            gk_integral, grading_constancy, hecke_residual,
                                            kappa_qh, level_one_up_xi, newform_constant,
                                            oldform_xi, restriction_residual, rs_ratio,
                                            xi_assemble, xi_check_properties)
from unitary_newforms.whittaker import (WhittakerTable, formal_table, u3_oracle_table,
                                        u3_spherical_table_exact)

F3 = LocalField(3)
BETA = mpq(1, 2)
PAR = UnramParam.u3_principal(BETA)
X = SymLaurentPoly.var(1, 0)


@pytest.fixture(scope="module")
def exact():
    return u3_spherical_table_exact(F3, BETA, -4, 20)


@pytest.fixture(scope="module")
def oracle():
    return u3_oracle_table(F3, BETA, -2, 14, 6)


def test_kappa_exponent():
    # kappa(mu) = delta^{-1}(p^mu) q_E^{|mu|(n - r/2)}, stored as a power of q_E^{1/2}
    assert kappa_qh((0,), 1, 1) == 0
    assert kappa_qh((1,), 1, 1) == 1
    assert kappa_qh((2,), 1, 1) == 2
    assert kappa_qh((1, 0), 2, 2) - kappa_qh((0, 0), 2, 2) > 0


def test_dominant_weights():
    assert dominant_weights(2, 2) == [(2, 0), (1, 1)]
    assert dominant_weights(1, 3) == [(3,)]
    assert dominant_weights(2, 0, low=-1) == [(1, -1), (0, 0)]


def test_newform_xi_is_one(exact):
    x = xi_assemble(exact, 1, 1, 0, 0, PAR, T=14, q=3, tol=0.0)
    assert x.poly.qfree(3) == SymLaurentPoly.const(1, 1)
    assert newform_constant(x, 3) == 1
    assert fe_residual(x, 3) == 0
    g = grading_constancy(x, 3)
    assert g["nonnegative"] and g["constant"]


def test_oracle_newform_xi_is_one(oracle):
    x = xi_assemble(oracle, 1, 1, 0, 0, PAR, T=14, q=3, tol=1e-3)
    assert abs(complex(newform_constant(x, 3, 1e-3)) - 1) < 1e-3


def test_properties_report(exact):
    x = xi_assemble(exact, 1, 1, 0, 0, PAR, T=14, q=3, tol=0.0)
    rep = xi_check_properties(x, {"grading": True}, q=3)
    assert rep.ok and set(rep.results) == {"functional_equation", "grading"}


def test_zero_table_gives_zero():
    z = WhittakerTable(1, {(k,): 0 for k in range(-2, 15)})
    x = xi_assemble(z, 1, 1, 0, 0, PAR, T=14, q=3, tol=0.0)
    assert xi_check_properties(x, {"zero_table": True}, q=3).ok


def test_without_asai_division_the_series_does_not_terminate(exact):
    # dropping the tensor factor leaves an infinite geometric tail
    with pytest.raises(NonTerminatingError):
        xi_assemble(exact, 1, 1, 0, 0, None, T=14, q=3, tol=0.0)


def test_truncation_below_degree_bound(exact):
    with pytest.raises(ValueError):
        xi_assemble(exact, 1, 1, 0, 0, PAR, T=2, q=3, degree_bound=4)


def test_formal_restriction():
    keys = [(i, j) for i in range(7) for j in range(7) if i >= j]
    ft = formal_table(2, keys)
    x2 = xi_assemble(ft, 2, 2, 0, 0, None, T=4, degree_bound=4)
    x1 = xi_assemble(ft, 2, 1, 0, 0, None, T=4, degree_bound=4)
    assert x1.poly.terms
    assert restriction_residual(x2, x1) == 0


@pytest.mark.parametrize("lam", [1, 2])
def test_hecke_equivariance_of_xi(exact, lam):
    acted = apply_hecke(exact, cosets_rank_one(F3, lam, 0))
    x = xi_assemble(exact, 1, 1, 0, 0, PAR, T=14, q=3, tol=0.0)
    xa = xi_assemble(acted, 1, 1, 0, 0, PAR, T=14, q=3, low=-lam, tol=0.0)
    S = satake_transform(F3, (lam,), 1, 0)
    assert hecke_residual(xa, x, S, 3) == 0


def test_newform_constant_validation(exact):
    up = apply_level_one_up(F3, exact)
    x1 = xi_assemble(up, 1, 1, 1, 0, PAR, T=14, q=3, tol=0.0)
    with pytest.raises(ValueError):
        newform_constant(x1, 3)
    with pytest.raises(ArithmeticError):
        newform_constant(dataclasses.replace(x1, a=1), 3)


def test_level_one_up_shape(exact):
    up = apply_level_one_up(F3, exact)
    x1 = xi_assemble(up, 1, 1, 1, 0, PAR, T=14, q=3, tol=0.0)
    lam1 = x1.poly.coefficient([0], 3)
    assert lam1 == 3
    assert x1.poly.qfree(3) == level_one_up_xi(lam1, 1)
    assert level_one_up_xi(1, 2) == (SymLaurentPoly.const(2, 1) + SymLaurentPoly.var(2, 0)
                                     + SymLaurentPoly.var(2, 1)
                                     + SymLaurentPoly.var(2, 0) * SymLaurentPoly.var(2, 1))


@pytest.fixture(scope="module")
def raised(exact):
    x0 = xi_assemble(exact, 1, 1, 0, 0, PAR, T=14, q=3, tol=0.0)
    t2 = apply_level_raising(F3, (1,), 0, 2, exact)
    x2 = xi_assemble(t2, 1, 1, 2, 0, PAR, T=14, q=3, tol=0.0)
    return x0, x2, satake_transform(F3, (1,), 1, 0)


def test_level_raised_xi_frozen(raised):
    _, x2, _ = raised
    assert x2.poly.qfree(3) == 9 + 6 * X + 9 * X ** 2


def test_level_raised_xi_measured_form(raised):
    x0, x2, S = raised
    pred = oldform_xi(x0.poly, 1, 0, 2, S, "measured")
    assert (x2.poly - pred).qfree(3).max_abs_coeff() == 0


def test_level_raised_xi_printed_form(raised):
    x0, x2, S = raised
    pred = oldform_xi(x0.poly, 1, 0, 2, S, "printed")
    assert (x2.poly - pred).qfree(3).max_abs_coeff() == 0


def test_oldform_xi_validation():
    one = SymLaurentPoly.const(1, 1)
    with pytest.raises(ValueError):
        oldform_xi(one, 1, 0, 3, one)
    with pytest.raises(ValueError):
        oldform_xi(one, 1, 0, 2, one, "other")
    assert oldform_xi(one, 1, 0, 0, one) == one
    assert oldform_xi(one, 1, 0, 2, X + 1, "composed").qfree(3) == X + X ** 2


@pytest.mark.parametrize("m", [0, 1, 2, 3])
@pytest.mark.parametrize("alpha", [mpq(1), mpq(-2, 3)])
@pytest.mark.parametrize("s", [0.75, complex(0.75, 1.3), 2.0])
def test_intertwining_integral(m, alpha, s):
    rep = gk_integral(F3, alpha, m, s, depth=20)
    assert rep.residual < 1e-3
    assert rep.residual <= rep.bound + 1e-12
    assert rep.predicted == gk_formula(alpha, m, s, 9)


def test_rs_ratio_is_constant_in_s(oracle):
    vals = [rs_ratio(oracle, PAR, [mpq(1, 2)], s, 9, 14) for s in (1.0, complex(1.5, 0.3), 2.2)]
    assert max(abs(v - vals[0]) for v in vals) < 1e-3 * abs(vals[0])


def test_kappa_calibration(oracle):
    assert all(abs(c - 0.5) < 1e-3 for c in calibrate_kappa(oracle, BETA, 9, 8))
