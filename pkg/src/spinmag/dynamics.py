"""Moment propagation for shearing, rotations and decoherence.

The cavity-mediated twisting interaction displaces the precession
quadrature in proportion to the population difference, J_y <- J_y + M J_z,
with the magnification factor M set by atom number, probe detuning and
pulse area.  On Gaussian states the whole protocol is linear algebra on
the 2x2 covariance matrix plus additive noise terms for cavity decay
back-action and free-space spin flips, which is what this module
implements.
"""

from __future__ import annotations

import math
import warnings

from .core import (
    ApparatusParams,
    PlanarValidityWarning,
    SpinGaussianState,
    ValidityError,
    broadened_linewidth,
    css_noise,
)

# Fraction of the Bloch radius N/2 inside which the planar model is trusted.
PLANAR_PATCH_FRACTION = 0.2

# Rotations are linearized around the mean spin axis; beyond this angle the
# small-angle treatment of the refocusing step is no longer meaningful.
MAX_ROTATION_ANGLE = 0.3


def magnification_factor(
    params: ApparatusParams,
    n_atoms: int | float,
    delta0: float,
    phi_ac: float,
) -> float:
    """Magnification M of a shearing pulse.

    M = N * delta_c * delta0 / (delta0^2 + (kappa/2)^2) * phi_ac with the
    broadened linewidth kappa(N).  Odd in delta0: red and blue probe
    detunings shear in opposite directions.

    Parameters
    ----------
    params : apparatus constants.
    n_atoms : ensemble size.
    delta0 : probe detuning from the dressed cavity resonance, Hz (not 0).
    phi_ac : accumulated ac-Stark phase of the pulse, radians.
    """
    if n_atoms <= 0:
        raise ValueError(f"atom number must be positive, got {n_atoms}")
    if delta0 == 0:
        raise ValueError("probe detuning must be non-zero")
    kappa = broadened_linewidth(params, n_atoms)
    lorentz = delta0 / (delta0**2 + (kappa / 2.0) ** 2)
    return n_atoms * params.delta_c * lorentz * phi_ac


def phi_for_magnification(
    params: ApparatusParams,
    n_atoms: int | float,
    delta0: float,
    m: float,
) -> float:
    """Pulse area phi_ac that yields magnification m at fixed detuning."""
    per_radian = magnification_factor(params, n_atoms, delta0, 1.0)
    return m / per_radian


def apply_shear(
    state: SpinGaussianState,
    m: float,
    kappa_over_delta0: float = 0.0,
) -> SpinGaussianState:
    """Shear the state: J_y picks up M times J_z, J_z is untouched.

    Means transform as mean_jy <- mean_jy + m * mean_jz.  The covariance
    update is the exact congruence of the shear map plus one additive term,
    (N/4) * m * (kappa/delta0), the back-action of photons decaying out of
    the cavity during the pulse.  Pass kappa_over_delta0 = 0 for ideal
    one-axis twisting.

    The ratio kappa/delta0 keeps its sign: with a red-detuned probe both m
    and the ratio flip sign and the back-action still heats.  A combination
    that would shrink the variance is rejected as unphysical.

    Emits PlanarValidityWarning when the post-shear J_y spread leaves the
    planar patch (0.2 of the Bloch radius).
    """
    decay = state.n_atoms / 4.0 * m * kappa_over_delta0
    if decay < 0:
        raise ValidityError(
            "decay back-action would reduce the variance; "
            f"m = {m} and kappa/delta0 = {kappa_over_delta0} disagree in sign")
    new = SpinGaussianState(
        n_atoms=state.n_atoms,
        mean_jy=state.mean_jy + m * state.mean_jz,
        mean_jz=state.mean_jz,
        var_jy=state.var_jy + 2.0 * m * state.cov + m**2 * state.var_jz + decay,
        var_jz=state.var_jz,
        cov=state.cov + m * state.var_jz,
        contrast=state.contrast,
    )
    patch = PLANAR_PATCH_FRACTION * state.n_atoms / 2.0
    if math.sqrt(new.var_jy) > patch:
        warnings.warn(
            f"post-shear J_y spread {math.sqrt(new.var_jy):.3g} exceeds the "
            f"planar patch {patch:.3g} (0.2 of the Bloch radius)",
            PlanarValidityWarning,
            stacklevel=2,
        )
    return new


def apply_axis_rotation(
    state: SpinGaussianState,
    theta: float,
    enforce_validity: bool = True,
) -> SpinGaussianState:
    """Rotate the state about its mean spin axis by theta.

    Acts on the (J_y, J_z) plane with R = [[cos, sin], [-sin, cos]]:
    means map as v <- R v and the covariance by the full congruence
    R Sigma R^T, so states with non-zero covariance are handled exactly.
    For a diagonal input this reproduces

        var_jy' = cos^2 var_jy + sin^2 var_jz
        var_jz' = sin^2 var_jy + cos^2 var_jz
        cov'    = -(1/2) sin(2 theta) (var_jy - var_jz)

    enforce_validity bounds |theta| to the small-angle regime of the
    planar model; disable it only for exact symmetry operations such as
    the quarter-turn quadrature swap.
    """
    if enforce_validity and abs(theta) >= MAX_ROTATION_ANGLE:
        raise ValidityError(
            f"|theta| = {abs(theta):.3g} exceeds the small-angle bound "
            f"{MAX_ROTATION_ANGLE}")
    c, s = math.cos(theta), math.sin(theta)
    vy, vz, cv = state.var_jy, state.var_jz, state.cov
    return SpinGaussianState(
        n_atoms=state.n_atoms,
        mean_jy=c * state.mean_jy + s * state.mean_jz,
        mean_jz=-s * state.mean_jy + c * state.mean_jz,
        var_jy=c * c * vy + s * s * vz + 2.0 * s * c * cv,
        var_jz=s * s * vy + c * c * vz - 2.0 * s * c * cv,
        cov=s * c * (vz - vy) + (c * c - s * s) * cv,
        contrast=state.contrast,
    )


def variance_minimizing_angle(state: SpinGaussianState) -> float:
    """Rotation angle after which var_jz is smallest.

    Diagonalizes the covariance: tan(2 theta) = 2 cov / (var_jy - var_jz).
    For a sheared coherent state this approaches 1/M, and the residual
    var_jz approaches (N/4) / M^2.
    """
    return 0.5 * math.atan2(2.0 * state.cov, state.var_jy - state.var_jz)


def refocused_noise(
    xi: float,
    xi_prime: float,
    n_atoms: int | float,
    m: float,
    theta: float,
) -> float:
    """Final J_y spread after pre-rotation by theta and shearing by m.

    Closed form for a squeezed input with J_z noise xi and J_y noise
    xi_prime (both linear ratios to the standard quantum limit, zero
    covariance):

        [ (1 - m theta)^2 (xi' D)^2 + (m xi D)^2 ]^(1/2),  D = sqrt(N)/2

    The first term is the anti-squeezed noise rotated into J_z and sheared
    back; it cancels at m = 1/theta, leaving the magnified squeezed noise
    alone.  Valid to O(theta^2); refocused_noise_exact composes the actual
    rotation and shear maps.
    """
    _check_squeezing_pair(xi, xi_prime)
    if m < 0:
        raise ValueError(f"magnification must be non-negative, got {m}")
    d = css_noise(n_atoms)
    return math.hypot((1.0 - m * theta) * xi_prime * d, m * xi * d)


def refocused_noise_exact(
    xi: float,
    xi_prime: float,
    n_atoms: int | float,
    m: float,
    theta: float,
) -> float:
    """Exact counterpart of refocused_noise via rotation + shear maps."""
    _check_squeezing_pair(xi, xi_prime)
    if m < 0:
        raise ValueError(f"magnification must be non-negative, got {m}")
    d = css_noise(n_atoms)
    state = SpinGaussianState(
        n_atoms=int(round(n_atoms)),
        var_jy=(xi_prime * d) ** 2,
        var_jz=(xi * d) ** 2,
    )
    rotated = apply_axis_rotation(state, theta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PlanarValidityWarning)
        sheared = apply_shear(rotated, m)
    return math.sqrt(sheared.var_jy)


def optimal_refocus_magnification(xi: float, xi_prime: float, theta: float) -> float:
    """Argmin of refocused_noise over m at fixed theta.

    Setting the derivative of the squared closed form to zero gives
    m* = theta xi'^2 / (xi^2 + theta^2 xi'^2), i.e. 1/theta reduced by
    1 / (1 + (xi / (theta xi'))^2).  Only when the rotated anti-squeezed
    noise dominates the squeezed noise does the minimum sit near 1/theta.
    """
    _check_squeezing_pair(xi, xi_prime)
    if theta == 0:
        return 0.0
    return theta * xi_prime**2 / (xi**2 + theta**2 * xi_prime**2)


def _check_squeezing_pair(xi: float, xi_prime: float) -> None:
    if xi <= 0 or xi_prime <= 0:
        raise ValueError(f"noise ratios must be positive, got {xi}, {xi_prime}")
    if xi * xi_prime < 1.0 - 1e-12:
        raise ValueError(
            f"xi * xi_prime = {xi * xi_prime:.4g} violates the uncertainty "
            "bound xi * xi_prime >= 1")


def required_magnification(xi: float, xi_prime: float, epsilon: float) -> float:
    """Magnification needed to detect squeezing with added-noise budget epsilon.

    A readout that may add at most a fraction epsilon of extra variance on
    top of the anti-squeezed background needs M = (2 epsilon)^(-1/2) xi'/xi.
    Grows quickly as the state gets more strongly squeezed.
    """
    if xi <= 0 or xi_prime <= 0:
        raise ValueError(f"noise ratios must be positive, got {xi}, {xi_prime}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return xi_prime / xi / math.sqrt(2.0 * epsilon)


def spin_flip_variance(
    n_atoms: int | float,
    gamma_ratio: float,
    phi_ac: float,
) -> float:
    """J_z diffusion from free-space Raman scattering during a pulse.

    sigma^2 = (N/6) * (gamma/omega_hf) * phi_ac.  Each scattered photon
    flips the scatterer's spin with fixed branching, so the variance is
    linear in both atom number and pulse area.
    """
    if n_atoms <= 0:
        raise ValueError(f"atom number must be positive, got {n_atoms}")
    if gamma_ratio <= 0:
        raise ValueError(f"gamma ratio must be positive, got {gamma_ratio}")
    return n_atoms / 6.0 * gamma_ratio * abs(phi_ac)


def spin_flip_variance_from_magnification(
    cooperativity: float,
    m: float,
    delta0: float,
    kappa0: float,
) -> float:
    """Spin-flip variance written against the achieved magnification.

    sigma^2 = (1 / 6 C) * M * delta0 / kappa0.  Equivalent to
    spin_flip_variance when delta0 >> kappa/2 and the apparatus constants
    satisfy the cooperativity consistency relation; this is the form in
    which the resolution limits are derived.
    """
    if cooperativity <= 0 or kappa0 <= 0:
        raise ValueError("cooperativity and kappa0 must be positive")
    return m * delta0 / (6.0 * cooperativity * kappa0)


def apply_spin_flip_diffusion(
    state: SpinGaussianState,
    variance: float,
) -> SpinGaussianState:
    """Add spin-flip diffusion to var_jz (applied before the shear)."""
    if variance < 0:
        raise ValueError(f"diffusion variance must be non-negative, got {variance}")
    return SpinGaussianState(
        n_atoms=state.n_atoms,
        mean_jy=state.mean_jy,
        mean_jz=state.mean_jz,
        var_jy=state.var_jy,
        var_jz=state.var_jz + variance,
        cov=state.cov,
        contrast=state.contrast,
    )
