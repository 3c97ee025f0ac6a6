"""Collective-spin magnification: Gaussian dynamics, exact small-N
oracles, Monte Carlo protocol simulation, resolution limits, and the
optical Kerr analog."""

from .core import (
    ApparatusParams,
    CapacityError,
    ConfigError,
    DbValue,
    PlanarValidityWarning,
    SpinGaussianState,
    ValidityError,
    broadened_linewidth,
    css_noise,
    db_above_sql,
    noise_from_db,
)
from .dicke import DickeMoments, DickeVector, apply_oat, apply_rotation, make_css, moments, oat_contrast_closed_form, tangent_state
from .dynamics import (
    apply_axis_rotation,
    apply_shear,
    apply_spin_flip_diffusion,
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
from .kerr import KerrParams, QuadratureState, fock_oracle, kerr_magnification, propagate, validity_check
from .limits import gain_sweep, half_saturation_atom_number, max_detuning, xi_min_sq, xi_min_sq_from_balance, xi_sat_sq
from .protocol import (
    DetectionModel,
    ExperimentConfig,
    TrialRecord,
    intrinsic_snr,
    normalized_snr_analytic,
    normalized_snr_mc,
    prepare_squeezed,
    run_trials,
    snr,
    sweep_detuning,
    sweep_phi_ac,
    sweep_refocus,
)

__all__ = [
    "ApparatusParams",
    "CapacityError",
    "ConfigError",
    "DbValue",
    "DetectionModel",
    "DickeMoments",
    "DickeVector",
    "ExperimentConfig",
    "KerrParams",
    "PlanarValidityWarning",
    "QuadratureState",
    "SpinGaussianState",
    "TrialRecord",
    "ValidityError",
    "apply_axis_rotation",
    "apply_oat",
    "apply_rotation",
    "apply_shear",
    "apply_spin_flip_diffusion",
    "broadened_linewidth",
    "css_noise",
    "db_above_sql",
    "fock_oracle",
    "gain_sweep",
    "half_saturation_atom_number",
    "intrinsic_snr",
    "kerr_magnification",
    "magnification_factor",
    "make_css",
    "max_detuning",
    "moments",
    "noise_from_db",
    "normalized_snr_analytic",
    "normalized_snr_mc",
    "oat_contrast_closed_form",
    "optimal_refocus_magnification",
    "phi_for_magnification",
    "prepare_squeezed",
    "propagate",
    "refocused_noise",
    "refocused_noise_exact",
    "required_magnification",
    "run_trials",
    "snr",
    "spin_flip_variance",
    "spin_flip_variance_from_magnification",
    "sweep_detuning",
    "sweep_phi_ac",
    "sweep_refocus",
    "tangent_state",
    "validity_check",
    "variance_minimizing_angle",
    "xi_min_sq",
    "xi_min_sq_from_balance",
    "xi_sat_sq",
]
