"""Units, dB conversions, and the core state/parameter types."""

import math

import pytest

from spinmag import (
    ApparatusParams,
    DbValue,
    SpinGaussianState,
    broadened_linewidth,
    css_noise,
    db_above_sql,
    noise_from_db,
)


def test_css_noise_is_sqrt_n_over_two():
    assert css_noise(4) == 1.0
    assert css_noise(40_000) == 100.0
    assert css_noise(500_000) == pytest.approx(353.5533905932738, rel=1e-14)


@pytest.mark.parametrize("bad", [0, -1, -1e5])
def test_css_noise_rejects_nonpositive_n(bad):
    with pytest.raises(ValueError):
        css_noise(bad)


def test_db_value_conventions():
    # 20 log10 on std ratios, 10 log10 on variance ratios: same dB number
    assert DbValue.from_std_ratio(10.0).db == pytest.approx(20.0)
    assert DbValue.from_variance_ratio(100.0).db == pytest.approx(20.0)
    level = DbValue(-8.0)
    assert level.std_ratio == pytest.approx(10.0 ** (-0.4))
    assert level.variance_ratio == pytest.approx(level.std_ratio**2)


def test_db_value_rejects_nonpositive_ratios():
    with pytest.raises(ValueError):
        DbValue.from_std_ratio(0.0)
    with pytest.raises(ValueError):
        DbValue.from_variance_ratio(-1.0)


def test_db_above_sql_round_trip():
    for noise in (1.0, 223.60679, 1200.0, 4.7e4):
        level = db_above_sql(noise, 2e5)
        assert noise_from_db(level, 2e5) == pytest.approx(noise, rel=1e-12)
    # the CSS itself sits at 0 dB by definition
    assert db_above_sql(css_noise(12345), 12345).db == pytest.approx(0.0, abs=1e-12)


def test_detection_noise_relative_to_sql():
    assert db_above_sql(1200.0, 2e5).db == pytest.approx(14.593924877592308, rel=1e-12)
    assert db_above_sql(1200.0, 5e5).db == pytest.approx(10.614524790871931, rel=1e-12)


def test_apparatus_defaults_and_gamma_ratio():
    p = ApparatusParams()
    assert p.gamma == 6.0666e6
    assert p.omega_hf == 6834.7e6
    assert p.delta_c == 5.5
    assert p.kappa0 == 8.0e3
    assert p.cooperativity == 0.78
    assert p.gamma_ratio == pytest.approx(8.876175984315332e-4, rel=1e-15)


def test_apparatus_rejects_nonpositive_frequencies():
    with pytest.raises(ValueError):
        ApparatusParams(gamma=0.0)
    with pytest.raises(ValueError):
        ApparatusParams(kappa0=-1.0)
    with pytest.raises(ValueError):
        ApparatusParams(fluor_noise=-5.0)


def test_apparatus_from_cooperativity_consistency():
    p = ApparatusParams.from_cooperativity()
    # derived shift satisfies delta_c = kappa0 C gamma/omega_hf exactly
    assert p.delta_c == pytest.approx(p.kappa0 * p.cooperativity * p.gamma_ratio,
                                      rel=1e-15)
    # within a few percent of the independently quoted value
    assert p.delta_c == pytest.approx(5.5, rel=0.02)
    with pytest.raises(ValueError):
        ApparatusParams.from_cooperativity(delta_c=5.0)


def test_broadened_linewidth_values():
    p = ApparatusParams()
    assert broadened_linewidth(p, 0) == 8.0e3
    assert broadened_linewidth(p, 2e5) == pytest.approx(8976.379358274686, rel=1e-12)
    assert broadened_linewidth(p, 5e5) == pytest.approx(10440.948395686715, rel=1e-12)
    with pytest.raises(ValueError):
        broadened_linewidth(p, -1)


def test_broadened_linewidth_is_linear_in_n():
    p = ApparatusParams()
    k0 = broadened_linewidth(p, 0)
    k1 = broadened_linewidth(p, 1e5)
    k2 = broadened_linewidth(p, 2e5)
    assert k2 - k1 == pytest.approx(k1 - k0, rel=1e-12)


def test_css_state_moments():
    state = SpinGaussianState.css(100)
    assert state.var_jy == state.var_jz == 25.0
    assert state.cov == 0.0
    assert state.contrast == 1.0
    assert state.jz_noise_db().db == pytest.approx(0.0, abs=1e-12)
    assert state.jy_noise_db().db == pytest.approx(0.0, abs=1e-12)
    # CSS is minimum-uncertainty: slack exactly zero
    assert state.uncertainty_slack() == pytest.approx(0.0, abs=1e-9)


def test_state_validation():
    with pytest.raises(ValueError):
        SpinGaussianState(n_atoms=0)
    with pytest.raises(ValueError):
        SpinGaussianState(n_atoms=100, var_jy=-1.0)
    # covariance bounded by the variances (Cauchy-Schwarz)
    with pytest.raises(ValueError):
        SpinGaussianState(n_atoms=100, var_jy=1.0, var_jz=1.0, cov=2.0)
    with pytest.raises(ValueError):
        SpinGaussianState(n_atoms=100, contrast=1.5)


def test_uncertainty_slack_scales_with_antisqueezing():
    n = 10_000
    q = n / 4.0
    squeezed = SpinGaussianState(n_atoms=n, var_jy=100.0 * q, var_jz=0.02 * q)
    # var product beyond the Heisenberg floor
    assert squeezed.uncertainty_slack() == pytest.approx(q * q, rel=1e-12)
