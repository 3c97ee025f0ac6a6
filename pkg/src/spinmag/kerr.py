"""Optical self-phase-modulation analog of the spin magnifier.

A Kerr medium shears the quadrature phase space of a bright coherent
state exactly the way cavity feedback shears the collective spin: the
amplitude quadrature X plays J_z, the phase quadrature Y plays J_y, and
the magnification is M = 4 chi |alpha|^2 t.  The linearized moment
propagation here is the formal twin of dynamics.apply_shear with zero
decay.  An exact truncated-Fock evolution serves as the oracle that
bounds where the linearization holds; far beyond it the state curls into
a crescent and the Gaussian picture fails by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import CapacityError

#: Default minimum ratio of coherent amplitude to sheared phase noise.
VALIDITY_THRESHOLD = 10.0

# Uncertainty floor var_x*var_y - cov^2 >= 1/16 from [X, Y] = i/2.
_MIN_UNCERTAINTY = 1.0 / 16.0


@dataclass(frozen=True)
class QuadratureState:
    """Second moments of the field in the displaced picture.

    The coherent displacement alpha is carried separately; mean_x and
    mean_y are means of the fluctuation quadratures about it.  Vacuum
    fluctuations give var_x = var_y = 1/4.
    """

    alpha_re: float
    alpha_im: float = 0.0
    mean_x: float = 0.0
    mean_y: float = 0.0
    var_x: float = 0.25
    var_y: float = 0.25
    cov_xy: float = 0.0

    def __post_init__(self):
        if self.var_x < 0 or self.var_y < 0:
            raise ValueError("quadrature variances must be nonnegative")
        slack = self.var_x * self.var_y - self.cov_xy**2
        if slack < _MIN_UNCERTAINTY * (1.0 - 1e-9):
            raise ValueError(
                f"var_x*var_y - cov^2 = {slack:.6g} below uncertainty floor 1/16")

    @classmethod
    def coherent(cls, alpha_re: float, alpha_im: float = 0.0) -> "QuadratureState":
        return cls(alpha_re=alpha_re, alpha_im=alpha_im)

    @property
    def alpha_mag_sq(self) -> float:
        return self.alpha_re**2 + self.alpha_im**2


@dataclass(frozen=True)
class KerrParams:
    """Kerr rate chi (1/time) and interaction time t."""

    chi: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.chi) and math.isfinite(self.t)):
            raise ValueError("chi and t must be finite")

    def magnification(self, alpha_mag_sq: float) -> float:
        return kerr_magnification(self.chi, alpha_mag_sq, self.t)


def kerr_magnification(chi: float, alpha_mag_sq: float, t: float) -> float:
    """M = 4 chi |alpha|^2 t."""
    if not (math.isfinite(chi) and math.isfinite(alpha_mag_sq) and math.isfinite(t)):
        raise ValueError("kerr_magnification inputs must be finite")
    return 4.0 * chi * alpha_mag_sq * t


def propagate(state: QuadratureState, m: float) -> QuadratureState:
    """Linearized Kerr shear Y <- Y + M X in the displaced picture.

    Same covariance congruence as the spin shear with zero decay: X is
    untouched, the phase quadrature picks up the amplified amplitude
    noise.  Requires the phase convention alpha_im = 0 so that X is the
    amplitude direction.
    """
    if state.alpha_im != 0.0:
        raise ValueError("propagate assumes the alpha_im = 0 frame")
    return replace(
        state,
        mean_y=state.mean_y + m * state.mean_x,
        var_y=state.var_y + 2.0 * m * state.cov_xy + m**2 * state.var_x,
        cov_xy=state.cov_xy + m * state.var_x,
    )


def validity_check(
    state: QuadratureState,
    m: float,
    threshold: float = VALIDITY_THRESHOLD,
) -> tuple[bool, float]:
    """Linearization margin: amplitude scale over sheared phase noise.

    The moment propagation holds while the mean amplitude dwarfs the
    post-magnification Y spread.  Returns (ok, ratio) with
    ratio = (|alpha| + mean_x) / sqrt(var_y(M)).
    """
    sheared = propagate(state, m)
    amplitude = math.sqrt(state.alpha_mag_sq) + state.mean_x
    ratio = amplitude / math.sqrt(sheared.var_y)
    return ratio >= threshold, ratio


def default_truncation(alpha_mag_sq: float) -> int:
    """Photon-number cutoff with comfortable Poisson-tail headroom."""
    return int(math.ceil(alpha_mag_sq + 8.0 * math.sqrt(alpha_mag_sq) + 10.0))


def fock_oracle(
    alpha: float,
    chi: float,
    t: float,
    truncation: int | None = None,
) -> dict[str, float]:
    """Exact Kerr quadrature moments from the number-basis evolution.

    The interaction-picture Hamiltonian is diagonal in photon number, so
    a coherent state evolves by pure phases
    exp(i chi t n(n-1) - i 2 chi t |alpha|^2 n); the linear-in-n term is
    the rotating frame that removes the mean precession.  Returns the
    absolute-frame moments <X>, <Y>, var(X), var(Y), cov.
    """
    alpha = float(alpha)
    alpha_sq = alpha * alpha
    if truncation is None:
        truncation = default_truncation(alpha_sq)
    if truncation < alpha_sq + 8.0 * math.sqrt(alpha_sq):
        raise CapacityError(
            f"truncation {truncation} too small for |alpha|^2 = {alpha_sq:g}")

    n = np.arange(truncation + 1, dtype=float)
    # log-space coherent amplitudes to dodge factorial overflow
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(n[1:]))))
    with np.errstate(divide="ignore", invalid="ignore"):
        n_log_alpha = np.where(n == 0, 0.0, n * np.log(np.abs(alpha)))
    amps = np.exp(-0.5 * alpha_sq + n_log_alpha - 0.5 * log_fact)
    amps *= np.sign(alpha) ** n
    tail = 1.0 - float(np.sum(amps**2))
    if tail > 1e-10:
        raise CapacityError(
            f"coherent tail mass {tail:.3e} above cutoff {truncation}")

    phases = np.exp(1j * (chi * t * n * (n - 1.0) - 2.0 * chi * t * alpha_sq * n))
    psi = amps * phases

    # <a> and <a^2> from ladder sums; X = (a + a+)/2, Y = (a - a+)/2i
    a_nn = np.sqrt(n[1:])
    mean_a = np.sum(np.conj(psi[:-1]) * a_nn * psi[1:])
    k = n[:-2]
    a2_nn = np.sqrt((k + 1.0) * (k + 2.0))
    mean_a2 = np.sum(np.conj(psi[:-2]) * a2_nn * psi[2:])
    mean_n = float(np.sum(n * np.abs(psi) ** 2))

    mean_x = mean_a.real
    mean_y = mean_a.imag
    # <X^2> = (Re<a^2> + <n> + 1/2)/2 - like identities from normal ordering
    mean_x2 = 0.5 * (mean_a2.real + mean_n + 0.5)
    mean_y2 = 0.5 * (-mean_a2.real + mean_n + 0.5)
    mean_xy_sym = 0.5 * mean_a2.imag
    return {
        "mean_x": mean_x,
        "mean_y": mean_y,
        "var_x": mean_x2 - mean_x**2,
        "var_y": mean_y2 - mean_y**2,
        "cov_xy": mean_xy_sym - mean_x * mean_y,
    }


def linearized_moments(alpha: float, m: float) -> dict[str, float]:
    """Absolute-frame moments from the Gaussian model, for oracle comparison."""
    state = propagate(QuadratureState.coherent(alpha), m)
    return {
        "mean_x": state.alpha_re + state.mean_x,
        "mean_y": state.mean_y,
        "var_x": state.var_x,
        "var_y": state.var_y,
        "cov_xy": state.cov_xy,
    }


def divergence_table(
    alpha_mag_sq: float,
    m_values,
    chi: float = 1e-3,
) -> list[dict[str, float]]:
    """Gaussian-vs-oracle deviation at each magnification.

    Mean errors are relative to the coherent amplitude |alpha|; variance
    errors are relative to the oracle value.  Rows carry the validity
    ratio so the divergence beyond the linear regime is visible next to
    the flag that predicts it.
    """
    alpha = math.sqrt(alpha_mag_sq)
    rows = []
    for m in m_values:
        t = m / (4.0 * chi * alpha_mag_sq)
        exact = fock_oracle(alpha, chi, t)
        model = linearized_moments(alpha, m)
        ok, ratio = validity_check(QuadratureState.coherent(alpha), m)
        rows.append({
            "m": float(m),
            "linear_var_y": model["var_y"],
            "oracle_var_y": exact["var_y"],
            "mean_x_err": abs(model["mean_x"] - exact["mean_x"]) / alpha,
            "mean_y_err": abs(model["mean_y"] - exact["mean_y"]) / alpha,
            "var_x_err": _rel(model["var_x"], exact["var_x"]),
            "var_y_err": _rel(model["var_y"], exact["var_y"]),
            "validity_ratio": ratio,
            "valid": float(ok),
        })
    return rows


def _rel(model: float, exact: float) -> float:
    return abs(model - exact) / abs(exact)
