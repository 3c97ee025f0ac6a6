"""Planar shear vs exact twisting: the oracle-equivalence harness."""

import pytest

from spinmag.crosscheck import (
    MEAN_TOL,
    SECOND_MOMENT_TOL,
    dicke_sheared_tangent,
    gaussian_sheared,
    shear_case,
    suite,
)


def test_tolerances_are_the_published_ones():
    assert MEAN_TOL == 0.02
    assert SECOND_MOMENT_TOL == 0.05


def test_single_case_moments_agree():
    gauss = gaussian_sheared(100, 1.0)
    exact = dicke_sheared_tangent(100, 1.0)
    assert exact.var_jy == pytest.approx(gauss.var_jy, rel=0.05)
    assert exact.cov == pytest.approx(gauss.cov, rel=0.05)
    assert exact.var_jz == pytest.approx(gauss.var_jz, rel=0.05)


def test_shear_case_normalizes_errors():
    case = shear_case(100, 1.0)
    assert case.n_atoms == 100 and case.m == 1.0
    assert 0.0 < case.contrast <= 1.0
    assert case.passed
    assert case.worst_err == max(case.mean_jy_err, case.mean_jz_err,
                                 case.var_jy_err, case.var_jz_err, case.cov_err)


def test_errors_shrink_with_atom_number():
    # sphere-curvature corrections scale as 1/N at fixed shear
    errs = [shear_case(n, 2.0).worst_err for n in (50, 100, 200, 400)]
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < errs[0] / 4.0


def test_suite_defaults_pass():
    cases, passed, worst = suite()
    assert passed
    assert len(cases) == 12
    assert worst.worst_err == max(c.worst_err for c in cases)
    # small-N strong-shear corner is the hardest case
    assert worst.n_atoms == 50 and worst.m == 2.0


def test_suite_subset():
    cases, passed, worst = suite(n_values=(200,), m_values=(0.5, 1.0))
    assert passed and len(cases) == 2
    assert worst in cases
