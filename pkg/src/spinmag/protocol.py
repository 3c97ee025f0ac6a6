"""Seeded Monte Carlo simulation of full magnification sequences.

A sequence is: prepare a (possibly squeezed) collective state, rotate it
by a small signal angle, optionally pre-rotate for noise refocusing,
magnify with a shearing pulse, convert J_y back to J_z with a microwave
pi/2 pulse, and detect.  Trials alternate between two initial states so
the separation of the detected distributions measures the magnification
and the widths measure the noise.

Everything is Gaussian at the moment level; per-trial randomness comes
from independent substreams keyed by (seed, branch, trial), so results
are reproducible bit for bit and independent of execution order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit

from .core import ApparatusParams, ConfigError, SpinGaussianState, broadened_linewidth, css_noise
from .dynamics import (
    MAX_ROTATION_ANGLE,
    apply_axis_rotation,
    apply_shear,
    apply_spin_flip_diffusion,
    magnification_factor,
    phi_for_magnification,
    refocused_noise,
    spin_flip_variance,
    variance_minimizing_angle,
)

# Technical-noise calibration, fitted once so that the default shear pulse
# (phi_ac = pi/8 at N = 5e5, delta0 = 36 kHz) prepares exactly -8 dB
# squeezing and +32 dB anti-squeezing.  The pulse-area fraction feeds
# var_jy as ((N/2) * frac * phi_ac)^2; the jitter gain scales the
# rotation-axis phase noise (set in dB above CSS noise) feeding var_jz.
PULSE_NOISE_FRAC = 0.09603957834940408
MW_JITTER_GAIN = 2.707621998187219


class SaturationWarning(UserWarning):
    """Cavity detection clipped in a large fraction of trials."""


@dataclass(frozen=True)
class DetectionModel:
    """Additive Gaussian readout noise, optionally range-limited.

    kind "cavity": small rms (a few spin flips) but hard clipping at the
    dynamic range of the dispersive shift, about one cavity linewidth.
    kind "fluorescence": large rms (atom-counting noise), no clipping.
    """

    kind: str
    rms_noise: float
    dynamic_range: float | None = None

    def __post_init__(self):
        if self.kind not in ("cavity", "fluorescence"):
            raise ConfigError(f"unknown detection kind {self.kind!r}")
        if self.rms_noise < 0:
            raise ConfigError("rms_noise must be nonnegative")
        if self.dynamic_range is not None and self.dynamic_range <= 0:
            raise ConfigError("dynamic_range must be positive")

    @classmethod
    def cavity(cls, rms_noise: float = 3.0,
               dynamic_range: float | None = None) -> "DetectionModel":
        """Cavity readout; dynamic_range None means (kappa/2)/delta_c at run time."""
        return cls("cavity", rms_noise, dynamic_range)

    @classmethod
    def fluorescence(cls, rms_noise: float = 1200.0) -> "DetectionModel":
        return cls("fluorescence", rms_noise)


def cavity_dynamic_range(params: ApparatusParams, n_atoms: int) -> float:
    """J_z at which the dispersive shift reaches one half-linewidth."""
    return broadened_linewidth(params, n_atoms) / 2.0 / params.delta_c


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameterization of a simulated run."""

    n_atoms: int = 200_000
    delta0: float = 36.0e3
    phi_ac_shear: float = 0.0
    phi_ac_mag: float = 0.6
    theta_refocus: float = 0.0
    signal_rotation: float = 2.0e-3
    n_trials: int = 1000
    seed: int = 20200828
    apparatus: ApparatusParams = field(default_factory=ApparatusParams)
    detection: DetectionModel = field(default_factory=DetectionModel.fluorescence)
    pulse_noise_frac: float = PULSE_NOISE_FRAC
    mw_jitter_db: float | None = 12.5

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ConfigError("n_atoms must be at least 1")
        if self.n_trials < 1:
            raise ConfigError("n_trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.delta0 == 0:
            raise ConfigError("delta0 must be nonzero")
        if abs(self.theta_refocus) >= MAX_ROTATION_ANGLE:
            raise ConfigError(
                f"theta_refocus {self.theta_refocus:g} outside small-angle range")
        for name in ("phi_ac_shear", "phi_ac_mag", "signal_rotation"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.pulse_noise_frac < 0:
            raise ConfigError("pulse_noise_frac must be nonnegative")

    @property
    def magnification(self) -> float:
        if self.phi_ac_mag == 0.0:
            return 0.0
        return magnification_factor(self.apparatus, self.n_atoms,
                                    self.delta0, self.phi_ac_mag)

    def with_magnification(self, m: float) -> "ExperimentConfig":
        """Same run with phi_ac_mag chosen to hit the given magnification."""
        if m == 0.0:
            return replace(self, phi_ac_mag=0.0)
        phi = phi_for_magnification(self.apparatus, self.n_atoms, self.delta0, m)
        return replace(self, phi_ac_mag=phi)


@dataclass(frozen=True)
class TrialRecord:
    true_jz: float
    detected_jz: float
    branch: str


def prepare_squeezed(config: ExperimentConfig) -> SpinGaussianState:
    """Squeeze by shearing, rotate to the quiet axis, add technical noise.

    The same cavity interaction used for magnification shears the CSS;
    rotating onto the minor axis of the resulting ellipse puts the
    squeezed quadrature along J_z.  Two technical terms then inflate the
    moments: pulse-area fluctuations feed the anti-squeezed J_y, and
    microwave rotation-axis jitter feeds the squeezed J_z.  With zero
    shear everything vanishes and the CSS comes back unchanged.
    """
    n = config.n_atoms
    state = SpinGaussianState.css(n)
    if config.phi_ac_shear == 0.0:
        return state

    m_s = magnification_factor(config.apparatus, n, config.delta0,
                               config.phi_ac_shear)
    kod = broadened_linewidth(config.apparatus, n) / config.delta0
    state = apply_shear(state, m_s, kappa_over_delta0=kod)
    theta = variance_minimizing_angle(state)
    state = apply_axis_rotation(state, theta)

    pulse_var = (n / 2.0 * config.pulse_noise_frac * config.phi_ac_shear) ** 2
    jitter_var = 0.0
    if config.mw_jitter_db is not None:
        jitter_std = (math.sin(abs(theta)) * 10.0 ** (config.mw_jitter_db / 20.0)
                      * css_noise(n) * MW_JITTER_GAIN)
        jitter_var = jitter_std**2
    return replace(state,
                   var_jy=state.var_jy + pulse_var,
                   var_jz=state.var_jz + jitter_var)


def _completion_jitter_rms(config: ExperimentConfig) -> float:
    """Rotation-axis phase jitter of the final pi/2 pulse, in radians."""
    if config.mw_jitter_db is None:
        return 0.0
    return 10.0 ** (config.mw_jitter_db / 20.0) / math.sqrt(config.n_atoms)


def _noise_scales(config: ExperimentConfig) -> tuple[float, float, float]:
    """(magnification, shear decay std, spin-flip std) for the magnifying pulse."""
    n = config.n_atoms
    m = config.magnification
    if m == 0.0:
        return 0.0, 0.0, 0.0
    kod = broadened_linewidth(config.apparatus, n) / config.delta0
    decay_var = n / 4.0 * m * kod
    flip_var = spin_flip_variance(n, config.apparatus.gamma_ratio,
                                  config.phi_ac_mag)
    return m, math.sqrt(decay_var), math.sqrt(flip_var)


def run_trials(config: ExperimentConfig) -> list[tuple[TrialRecord, TrialRecord]]:
    """Simulate alternated trial pairs; one record per branch per trial.

    Per trial and branch: sample (J_y, J_z) from the prepared state,
    shift J_z by the branch signal, add spin-flip diffusion, apply the
    refocus rotation, shear with decay back-action, relabel J_y as the
    detected J_z through the jittered pi/2 pulse, and add detection
    noise.  Cavity detection clips at its dynamic range; if more than
    half the trials clip, a SaturationWarning is issued.

    Every trial consumes exactly six standard normals from its own
    substream regardless of which noise terms are active, so streams
    stay aligned across parameter changes.
    """
    state = prepare_squeezed(config)
    n = config.n_atoms
    m, decay_std, flip_std = _noise_scales(config)

    # lower Cholesky factor of the prepared covariance
    l11 = math.sqrt(state.var_jy)
    l21 = state.cov / l11 if l11 > 0 else 0.0
    l22 = math.sqrt(max(state.var_jz - l21**2, 0.0))

    cos_t = math.cos(config.theta_refocus)
    sin_t = math.sin(config.theta_refocus)
    signal_shift = n / 2.0 * math.sin(config.signal_rotation)
    beta_rms = _completion_jitter_rms(config)

    det = config.detection
    clip = det.dynamic_range
    if det.kind == "cavity" and clip is None:
        clip = cavity_dynamic_range(config.apparatus, n)

    pairs = []
    n_clipped = 0
    for trial in range(config.n_trials):
        records = []
        for branch_idx, (label, sign) in enumerate((("plus", 1.0), ("minus", -1.0))):
            rng = np.random.default_rng([config.seed, branch_idx, trial])
            z = rng.standard_normal(6)
            jy = state.mean_jy + l11 * z[0]
            jz = state.mean_jz + l21 * z[0] + l22 * z[1]
            jz += sign * signal_shift
            jz += flip_std * z[2]
            true_jz = jz
            jy, jz = cos_t * jy + sin_t * jz, -sin_t * jy + cos_t * jz
            jy += m * jz + decay_std * z[3]
            detected = jy + beta_rms * z[4] * jz
            detected += det.rms_noise * z[5]
            if clip is not None:
                if abs(detected) > clip:
                    n_clipped += 1
                detected = min(max(detected, -clip), clip)
            records.append(TrialRecord(float(true_jz), float(detected), label))
        pairs.append((records[0], records[1]))

    total = 2 * config.n_trials
    if n_clipped > total // 2:
        warnings.warn(
            f"cavity detection saturated in {n_clipped}/{total} trials",
            SaturationWarning, stacklevel=2)
    return pairs


def detected_arrays(pairs) -> tuple[np.ndarray, np.ndarray]:
    """Detected values split by branch, in trial order."""
    plus = np.array([p.detected_jz for p, _ in pairs])
    minus = np.array([q.detected_jz for _, q in pairs])
    return plus, minus


def snr(branch_a: np.ndarray, branch_b: np.ndarray) -> float:
    """Mean separation of the two branches over their pooled width."""
    a = np.asarray(branch_a, dtype=float)
    b = np.asarray(branch_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("snr needs at least 2 samples per branch")
    pooled_var = (((a.size - 1) * np.var(a, ddof=1)
                   + (b.size - 1) * np.var(b, ddof=1))
                  / (a.size + b.size - 2))
    if pooled_var == 0.0:
        raise ValueError("snr undefined for zero-width distributions")
    return float(abs(np.mean(a) - np.mean(b)) / np.sqrt(pooled_var))


def branch_separation(config: ExperimentConfig) -> float:
    """Pre-magnification mean J_z separation of the two branches."""
    return 2.0 * config.n_atoms / 2.0 * math.sin(config.signal_rotation)


def intrinsic_snr(config: ExperimentConfig) -> float:
    """Direct cavity readout of the prepared state, the normalization ceiling."""
    state = prepare_squeezed(config)
    noise = math.hypot(math.sqrt(state.var_jz), config.apparatus.cavity_noise)
    return abs(branch_separation(config)) / noise


def analytic_detected_moments(config: ExperimentConfig) -> dict[str, float]:
    """Closed-form mean separation and variance of the detected values.

    Mirrors the trial pipeline exactly at the moment level, so the Monte
    Carlo sample statistics must converge to these at the 1/sqrt(trials)
    rate.  Used as the oracle in consistency tests.
    """
    state = prepare_squeezed(config)
    m, decay_std, flip_std = _noise_scales(config)
    half_sep = branch_separation(config) / 2.0

    state = replace(state, mean_jz=state.mean_jz + half_sep)
    state = apply_spin_flip_diffusion(state, flip_std**2)
    state = apply_axis_rotation(state, config.theta_refocus)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        kod = 0.0
        if m != 0.0:
            kod = (broadened_linewidth(config.apparatus, config.n_atoms)
                   / config.delta0)
        state = apply_shear(state, m, kappa_over_delta0=kod)

    beta_rms = _completion_jitter_rms(config)
    variance = (state.var_jy + beta_rms**2 * state.var_jz
                + config.detection.rms_noise**2)
    return {
        "mean_separation": 2.0 * state.mean_jy,
        "variance": variance,
    }


def normalized_snr_analytic(config: ExperimentConfig) -> float:
    """Full-pipeline analytic SNR over the intrinsic cavity SNR."""
    moments = analytic_detected_moments(config)
    value = abs(moments["mean_separation"]) / math.sqrt(moments["variance"])
    return value / intrinsic_snr(config)


def normalized_snr_mc(config: ExperimentConfig) -> float:
    """Monte Carlo SNR over the intrinsic cavity SNR."""
    plus, minus = detected_arrays(run_trials(config))
    return snr(plus, minus) / intrinsic_snr(config)


def normalized_snr_closed_form(config: ExperimentConfig) -> float:
    """Refocusing closed form over the intrinsic cavity SNR.

    Uses only the prepared squeezing pair and the two-term refocused
    noise; decay, spin flips and completion jitter are dropped, so this
    sits slightly above the full-pipeline value.
    """
    state = prepare_squeezed(config)
    scale = css_noise(config.n_atoms)
    xi = math.sqrt(state.var_jz) / scale
    xi_prime = math.sqrt(state.var_jy) / scale
    m = config.magnification
    noise = refocused_noise(xi, xi_prime, config.n_atoms, m,
                            config.theta_refocus)
    value = (abs(m * branch_separation(config))
             / math.hypot(noise, config.detection.rms_noise))
    return value / intrinsic_snr(config)


def predicted_alpha(config: ExperimentConfig) -> float:
    """Saturation scale of normalized SNR vs magnification.

    Normalized SNR follows M / sqrt(alpha^2 + M^2) with
    alpha^2 = (var_jy(0) + detection^2) / var_jz(0): magnification must
    lift the anti-squeezed plus detection noise above the J_z signal
    noise before the readout saturates.
    """
    state = prepare_squeezed(config)
    return math.sqrt((state.var_jy + config.detection.rms_noise**2)
                     / state.var_jz)


def fit_alpha(m_values, normalized_snrs) -> float:
    """Least-squares alpha in M / sqrt(alpha^2 + M^2)."""

    def model(m, alpha):
        return m / np.sqrt(alpha**2 + m**2)

    popt, _ = curve_fit(model, np.asarray(m_values, dtype=float),
                        np.asarray(normalized_snrs, dtype=float), p0=(5.0,))
    return float(abs(popt[0]))


def snr_vs_m(config: ExperimentConfig, m_values) -> list[dict[str, float]]:
    """Normalized SNR at each magnification, Monte Carlo and analytic."""
    rows = []
    for m in m_values:
        run = config.with_magnification(m)
        rows.append({
            "m": float(m),
            "norm_snr_mc": normalized_snr_mc(run),
            "norm_snr_analytic": normalized_snr_analytic(run),
        })
    return rows


def _fit_magnification(config: ExperimentConfig) -> tuple[float, float, float]:
    """Separation-based magnification estimate with a 95% interval."""
    plus, minus = detected_arrays(run_trials(config))
    sep0 = branch_separation(config)
    pooled = math.sqrt((np.var(plus, ddof=1) + np.var(minus, ddof=1)) / 2.0)
    se = pooled * math.sqrt(1.0 / plus.size + 1.0 / minus.size)
    m_fit = float(np.mean(plus) - np.mean(minus)) / sep0
    half = 1.96 * se / abs(sep0)
    return m_fit, m_fit - half, m_fit + half


def sweep_phi_ac(config: ExperimentConfig, phi_values) -> list[dict[str, float]]:
    """Fitted magnification vs pulse area; linear with the predicted slope."""
    rows = []
    for phi in phi_values:
        run = replace(config, phi_ac_mag=float(phi))
        m_fit, lo, hi = _fit_magnification(run)
        rows.append({
            "phi_ac": float(phi),
            "m_fit": m_fit,
            "m_theory": run.magnification,
            "ci_low": lo,
            "ci_high": hi,
        })
    return rows


def sweep_detuning(config: ExperimentConfig, delta0_values) -> list[dict[str, float]]:
    """Fitted magnification vs probe detuning; dispersive curve, peak at kappa/2."""
    rows = []
    for delta0 in delta0_values:
        run = replace(config, delta0=float(delta0))
        m_fit, lo, hi = _fit_magnification(run)
        rows.append({
            "delta0": float(delta0),
            "m_fit": m_fit,
            "m_theory": run.magnification,
            "ci_low": lo,
            "ci_high": hi,
        })
    return rows


def sweep_refocus(config: ExperimentConfig, m_values,
                  theta_values) -> list[dict[str, float]]:
    """Post-magnification noise in CSS units across (theta, M).

    Each row carries the Monte Carlo and analytic noise plus the two
    reference lines the noise should interpolate between: the magnified
    squeezed input M xi and the magnified CSS noise M.
    """
    base = replace(config, signal_rotation=0.0)
    xi = math.sqrt(prepare_squeezed(config).var_jz) / css_noise(config.n_atoms)
    rows = []
    for theta in theta_values:
        for m in m_values:
            run = replace(base, theta_refocus=float(theta)).with_magnification(m)
            plus, minus = detected_arrays(run_trials(run))
            both = np.concatenate([plus, minus])
            moments = analytic_detected_moments(run)
            scale = css_noise(config.n_atoms)
            rows.append({
                "theta": float(theta),
                "m": float(m),
                "noise_mc": float(np.std(both, ddof=1)) / scale,
                "noise_analytic": math.sqrt(moments["variance"]) / scale,
                "ref_squeezed": abs(m) * xi,
                "ref_css": abs(m),
            })
    return rows
