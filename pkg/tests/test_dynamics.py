"""Shear, rotation, refocusing, and diffusion maps on planar states."""

import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinmag import (
    ApparatusParams,
    PlanarValidityWarning,
    SpinGaussianState,
    ValidityError,
    apply_axis_rotation,
    apply_shear,
    apply_spin_flip_diffusion,
    css_noise,
    magnification_factor,
    optimal_refocus_magnification,
    phi_for_magnification,
    refocused_noise,
    refocused_noise_exact,
    required_magnification,
    spin_flip_variance,
    spin_flip_variance_from_magnification,
    variance_minimizing_angle,
)
from spinmag.dynamics import MAX_ROTATION_ANGLE

PARAMS = ApparatusParams()


def test_magnification_factor_reference_values():
    # N delta_c delta0 / (delta0^2 + (kappa/2)^2) per radian of pulse area
    assert magnification_factor(PARAMS, 5e5, 36e3, 0.6) == pytest.approx(
        44.889362994492636, rel=1e-12)
    assert magnification_factor(PARAMS, 2e5, 36e3, 0.6) == pytest.approx(
        18.052737974996468, rel=1e-12)


def test_magnification_factor_sign_follows_detuning():
    plus = magnification_factor(PARAMS, 2e5, 36e3, 0.6)
    minus = magnification_factor(PARAMS, 2e5, -36e3, 0.6)
    assert minus == pytest.approx(-plus, rel=1e-12)


def test_magnification_peaks_at_half_linewidth():
    from spinmag import broadened_linewidth

    half = broadened_linewidth(PARAMS, 2e5) / 2.0
    peak = magnification_factor(PARAMS, 2e5, half, 0.6)
    for delta0 in (0.5 * half, 0.8 * half, 1.3 * half, 3.0 * half):
        assert magnification_factor(PARAMS, 2e5, delta0, 0.6) < peak


@given(m=st.floats(5.0, 60.0))
@settings(max_examples=30, deadline=None)
def test_phi_for_magnification_inverts_magnification(m):
    phi = phi_for_magnification(PARAMS, 2e5, 36e3, m)
    assert magnification_factor(PARAMS, 2e5, 36e3, phi) == pytest.approx(m, rel=1e-12)


def test_shear_of_css_moments():
    state = SpinGaussianState.css(100)
    # N=100 at m=3 sits just past the planar patch; the warning is part of
    # the contract and the moments stay exact
    with pytest.warns(PlanarValidityWarning):
        out = apply_shear(state, 3.0)
    assert out.var_jy == pytest.approx(250.0)
    assert out.cov == pytest.approx(75.0)
    assert out.var_jz == pytest.approx(25.0)
    assert out.mean_jy == out.mean_jz == 0.0


def test_shear_decay_backaction():
    # kappa/delta0 = 0.3 adds (N/4) m (kappa/delta0) to var_jy
    with pytest.warns(PlanarValidityWarning):
        out = apply_shear(SpinGaussianState.css(100), 3.0, kappa_over_delta0=0.3)
    assert out.var_jy == pytest.approx(272.5)
    assert out.var_jz == pytest.approx(25.0)


def test_shear_zero_is_identity():
    state = SpinGaussianState.css(200)
    out = apply_shear(state, 0.0)
    assert out == state


def test_shear_moves_the_mean():
    state = SpinGaussianState(n_atoms=400, mean_jz=5.0, var_jy=100.0, var_jz=100.0)
    out = apply_shear(state, 2.0)
    assert out.mean_jy == pytest.approx(10.0)
    assert out.mean_jz == pytest.approx(5.0)


def test_shear_rejects_negative_decay_variance():
    # m and kappa/delta0 of opposite sign would subtract noise
    with pytest.raises(ValidityError):
        apply_shear(SpinGaussianState.css(100), -2.0, kappa_over_delta0=0.3)


def test_shear_warns_outside_planar_patch():
    with pytest.warns(PlanarValidityWarning):
        apply_shear(SpinGaussianState.css(100), 50.0)


@given(m1=st.floats(0.0, 5.0), m2=st.floats(0.0, 5.0))
@settings(max_examples=30, deadline=None)
def test_shear_composition_is_additive(m1, m2):
    state = SpinGaussianState.css(100_000)
    once = apply_shear(state, m1 + m2)
    twice = apply_shear(apply_shear(state, m1), m2)
    assert twice.var_jy == pytest.approx(once.var_jy, rel=1e-12)
    assert twice.cov == pytest.approx(once.cov, rel=1e-12)
    assert twice.var_jz == pytest.approx(once.var_jz, rel=1e-12)


def test_rotation_identity_and_swap():
    state = SpinGaussianState(n_atoms=100, var_jy=40.0, var_jz=10.0)
    assert apply_axis_rotation(state, 0.0) == state
    swapped = apply_axis_rotation(state, math.pi / 2.0, enforce_validity=False)
    assert swapped.var_jy == pytest.approx(10.0, abs=1e-9)
    assert swapped.var_jz == pytest.approx(40.0, abs=1e-9)


def test_rotation_reference_covariances():
    # strongly anti-squeezed input rotated by 29 mrad
    n = 5e5
    d = css_noise(n)
    state = SpinGaussianState(n_atoms=int(n), var_jy=(39.81 * d) ** 2,
                              var_jz=(0.3981 * d) ** 2)
    out = apply_axis_rotation(state, 0.029)
    assert out.cov == pytest.approx(-5.741e6, rel=2e-3)
    assert out.var_jz == pytest.approx(1.864e5, rel=2e-3)


def test_rotation_bound_is_enforced():
    state = SpinGaussianState.css(100)
    with pytest.raises(ValidityError):
        apply_axis_rotation(state, MAX_ROTATION_ANGLE + 0.01)
    # explicit opt-out for exact maps about the mean-spin axis
    apply_axis_rotation(state, MAX_ROTATION_ANGLE + 0.01, enforce_validity=False)


@given(theta=st.floats(-0.29, 0.29))
@settings(max_examples=40, deadline=None)
def test_rotation_preserves_trace_and_determinant(theta):
    state = SpinGaussianState(n_atoms=1000, var_jy=900.0, var_jz=30.0, cov=25.0)
    out = apply_axis_rotation(state, theta)
    assert out.var_jy + out.var_jz == pytest.approx(930.0, rel=1e-12)
    det_in = state.var_jy * state.var_jz - state.cov**2
    det_out = out.var_jy * out.var_jz - out.cov**2
    assert det_out == pytest.approx(det_in, rel=1e-9)


def test_variance_minimizing_angle_diagonalizes():
    state = apply_shear(SpinGaussianState.css(100_000), 8.0)
    theta = variance_minimizing_angle(state)
    best = apply_axis_rotation(state, theta)
    assert best.cov == pytest.approx(0.0, abs=1e-6 * state.var_jy)
    for delta in (-0.01, 0.01):
        other = apply_axis_rotation(state, theta + delta)
        assert best.var_jz < other.var_jz
    # for a strong shear the angle approaches 1/m
    assert theta == pytest.approx(1.0 / 8.0, rel=0.05)


def test_refocused_noise_closed_form():
    d = css_noise(5e5)
    # theta = 0: plain quadrature sum of anti-squeezed and magnified noise
    assert refocused_noise(0.3981, 39.81, 5e5, 30.0, 0.0) == pytest.approx(
        math.hypot(39.81 * d, 30.0 * 0.3981 * d), rel=1e-12)
    # m = 1/theta: anti-squeezed term cancels exactly
    theta = 0.029
    assert refocused_noise(0.3981, 39.81, 5e5, 1 / theta, theta) == pytest.approx(
        (1 / theta) * 0.3981 * d, rel=1e-12)
    assert refocused_noise(0.3981, 39.81, 5e5, 30.0, 0.029) == pytest.approx(
        4601.887915437533, rel=1e-12)


def test_refocused_noise_exact_map_agrees_to_theta_squared():
    closed = refocused_noise(0.3981, 39.81, 5e5, 30.0, 0.029)
    exact = refocused_noise_exact(0.3981, 39.81, 5e5, 30.0, 0.029)
    assert abs(exact / closed - 1.0) < 0.029**2


def test_refocused_noise_rejects_unphysical_inputs():
    with pytest.raises(ValueError):
        refocused_noise(0.1, 0.1, 5e5, 10.0, 0.01)  # xi xi' < 1
    with pytest.raises(ValueError):
        refocused_noise(0.5, 2.0, 5e5, -1.0, 0.01)


def test_optimal_refocus_magnification():
    m_star = optimal_refocus_magnification(0.3981, 39.81, 0.029)
    assert m_star == pytest.approx(30.8182784272051, rel=1e-12)
    # sits below 1/theta by the squeezing-dependent factor
    assert m_star < 1.0 / 0.029
    # and is the actual argmin of the closed form
    at_min = refocused_noise(0.3981, 39.81, 5e5, m_star, 0.029)
    for m in (0.95 * m_star, 1.05 * m_star):
        assert at_min < refocused_noise(0.3981, 39.81, 5e5, m, 0.029)
    assert optimal_refocus_magnification(0.3981, 39.81, 0.0) == 0.0


def test_required_magnification():
    assert required_magnification(1.0, 100.0, 0.05) == pytest.approx(
        316.2277660168379, rel=1e-12)
    # epsilon = 1/2 reduces to the bare noise ratio
    assert required_magnification(1.0, 2.0, 0.5) == pytest.approx(2.0, rel=1e-12)
    assert required_magnification(1.0, 1.0, 0.05) == pytest.approx(
        3.162277660168379, rel=1e-12)
    with pytest.raises(ValueError):
        required_magnification(1.0, 100.0, 0.0)
    with pytest.raises(ValueError):
        required_magnification(1.0, 100.0, 1.0)
    with pytest.raises(ValueError):
        required_magnification(-1.0, 100.0, 0.1)


def test_spin_flip_variance():
    value = spin_flip_variance(5e5, PARAMS.gamma_ratio, 0.6)
    assert value == pytest.approx(44.38087992157666, rel=1e-12)
    # linear in both atom number and pulse area
    assert spin_flip_variance(1e6, PARAMS.gamma_ratio, 0.6) == pytest.approx(
        2 * value, rel=1e-12)
    assert spin_flip_variance(5e5, PARAMS.gamma_ratio, 1.2) == pytest.approx(
        2 * value, rel=1e-12)
    with pytest.raises(ValueError):
        spin_flip_variance(0, PARAMS.gamma_ratio, 0.6)


def test_spin_flip_variance_paths_agree():
    # reaching a target m via the pulse area gives the same diffusion as
    # the cooperativity shortcut evaluated at the same operating point
    n, delta0, m = 2e5, 36e3, 20.0
    phi = phi_for_magnification(PARAMS, n, delta0, m)
    direct = spin_flip_variance(n, PARAMS.gamma_ratio, phi)
    shortcut = spin_flip_variance_from_magnification(
        PARAMS.cooperativity, m, delta0, PARAMS.kappa0)
    assert direct == pytest.approx(shortcut, rel=0.05)


def test_apply_spin_flip_diffusion():
    state = SpinGaussianState.css(100)
    out = apply_spin_flip_diffusion(state, 7.0)
    assert out.var_jz == pytest.approx(32.0)
    assert out.var_jy == pytest.approx(25.0)
    with pytest.raises(ValueError):
        apply_spin_flip_diffusion(state, -1.0)
