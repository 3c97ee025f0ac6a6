"""Core types and conversions for collective-spin noise analysis.

The planar (Gaussian) description of a collective spin tracks first and
second moments of the two transverse components (J_y, J_z) of an ensemble
of N two-level atoms, in units where J_z counts half the population
difference.  Everything downstream (shearing dynamics, protocol Monte
Carlo, resolution limits) is expressed in these units, with noise levels
quoted either as spin units rms or in dB relative to the standard quantum
limit of a coherent spin state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class ValidityError(ValueError):
    """A parameter left the validity range of the planar model."""


class ConfigError(ValueError):
    """A configuration key or value is malformed or unknown."""


class CapacityError(ValueError):
    """A requested size exceeds what the exact solvers can represent."""


class PlanarValidityWarning(UserWarning):
    """State spread left the planar patch where the Gaussian model holds."""


def css_noise(n_atoms: int | float) -> float:
    """Standard quantum limit sqrt(N)/2 of a coherent spin state.

    Parameters
    ----------
    n_atoms : number of atoms, must be positive.

    Returns
    -------
    rms J_z fluctuation of the coherent state, in spin units.
    """
    if n_atoms <= 0:
        raise ValueError(f"atom number must be positive, got {n_atoms}")
    return math.sqrt(n_atoms) / 2.0


@dataclass(frozen=True)
class DbValue:
    """Noise level in dB relative to the standard quantum limit.

    Kept as a distinct type so dB and linear scales cannot be mixed up
    silently.  The convention is 20 log10 of the std ratio, identical to
    10 log10 of the variance ratio.
    """

    db: float

    @classmethod
    def from_std_ratio(cls, ratio: float) -> "DbValue":
        if ratio <= 0:
            raise ValueError(f"std ratio must be positive, got {ratio}")
        return cls(20.0 * math.log10(ratio))

    @classmethod
    def from_variance_ratio(cls, ratio: float) -> "DbValue":
        if ratio <= 0:
            raise ValueError(f"variance ratio must be positive, got {ratio}")
        return cls(10.0 * math.log10(ratio))

    @property
    def std_ratio(self) -> float:
        return 10.0 ** (self.db / 20.0)

    @property
    def variance_ratio(self) -> float:
        return 10.0 ** (self.db / 10.0)


def db_above_sql(noise_std: float, n_atoms: int | float) -> DbValue:
    """Express an rms J_z noise level in dB relative to css_noise(N)."""
    if noise_std <= 0:
        raise ValueError(f"noise level must be positive, got {noise_std}")
    return DbValue.from_std_ratio(noise_std / css_noise(n_atoms))


def noise_from_db(level: DbValue, n_atoms: int | float) -> float:
    """Inverse of db_above_sql: rms noise in spin units at the given level."""
    return level.std_ratio * css_noise(n_atoms)


@dataclass(frozen=True)
class ApparatusParams:
    """Cavity and atom constants of the measurement apparatus.

    Defaults describe the reference apparatus: 87Rb clock transition
    (hyperfine splitting omega_hf, D2 linewidth gamma) coupled to a cavity
    with bare linewidth kappa0, per-atom dispersive shift delta_c and
    single-atom cooperativity.  All frequencies are plain Hz.
    """

    gamma: float = 6.0666e6
    omega_hf: float = 6834.7e6
    delta_c: float = 5.5
    kappa0: float = 8.0e3
    cooperativity: float = 0.78
    fluor_noise: float = 1200.0   # fluorescence imaging rms, spin units
    cavity_noise: float = 3.0     # cavity probe rms, spin-flip units

    def __post_init__(self) -> None:
        for name in ("gamma", "omega_hf", "delta_c", "kappa0", "cooperativity"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("fluor_noise", "cavity_noise"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def gamma_ratio(self) -> float:
        """Ratio gamma / omega_hf controlling Raman spin-flip scattering."""
        return self.gamma / self.omega_hf

    @classmethod
    def from_cooperativity(cls, **kwargs) -> "ApparatusParams":
        """Build params with delta_c derived from the cooperativity.

        With the cooperativity defined as 4 g^2 / (kappa0 gamma) and the
        per-atom shift as 4 g^2 / omega_hf, the shift follows as
        kappa0 * cooperativity * gamma / omega_hf.  Parameters built this
        way satisfy the linewidth consistency relation exactly, whereas
        independently measured values (the defaults) agree only to the
        percent level.
        """
        if "delta_c" in kwargs:
            raise ValueError("delta_c is derived here, do not pass it")
        base = cls(**kwargs)
        derived = base.kappa0 * base.cooperativity * base.gamma / base.omega_hf
        return replace(base, delta_c=derived)


def broadened_linewidth(params: ApparatusParams, n_atoms: int | float) -> float:
    """Cavity linewidth in Hz broadened by atomic scattering.

    kappa(N) = kappa0 + N * delta_c * gamma / omega_hf.  The N-dependent
    term is the free-space scattering loss channel opened by the atoms:
    each atom contributes its dispersive shift scaled by the ratio of the
    optical linewidth to the hyperfine splitting.
    """
    if n_atoms < 0:
        raise ValueError(f"atom number must be non-negative, got {n_atoms}")
    return params.kappa0 + n_atoms * params.delta_c * params.gamma_ratio


@dataclass(frozen=True)
class SpinGaussianState:
    """First and second moments of the transverse spin components.

    The state lives on the planar patch around the mean spin direction
    (+x), with J_y the precession quadrature and J_z the population
    difference.  cov is the symmetrized covariance between the two.
    contrast records the preserved Bloch vector length as a fraction of
    N/2; the Gaussian protocol keeps it at 1 and only the exact solver
    reports smaller values.
    """

    n_atoms: int
    mean_jy: float = 0.0
    mean_jz: float = 0.0
    var_jy: float = 0.0
    var_jz: float = 0.0
    cov: float = 0.0
    contrast: float = 1.0

    def __post_init__(self) -> None:
        if self.n_atoms <= 0:
            raise ValueError(f"atom number must be positive, got {self.n_atoms}")
        if self.var_jy < 0 or self.var_jz < 0:
            raise ValueError(
                f"variances must be non-negative, got {self.var_jy}, {self.var_jz}")
        bound = self.var_jy * self.var_jz
        # Cauchy-Schwarz with a small float allowance for rotated states
        if self.cov**2 > bound * (1.0 + 1e-9) + 1e-12:
            raise ValueError(
                f"cov^2 = {self.cov**2} exceeds var_jy * var_jz = {bound}")
        if not 0.0 <= self.contrast <= 1.0 + 1e-12:
            raise ValueError(f"contrast must lie in [0, 1], got {self.contrast}")

    @classmethod
    def css(cls, n_atoms: int) -> "SpinGaussianState":
        """Coherent spin state along +x: isotropic variance N/4, no cov."""
        quarter = n_atoms / 4.0
        return cls(n_atoms=n_atoms, var_jy=quarter, var_jz=quarter)

    def uncertainty_slack(self) -> float:
        """var_jy*var_jz - cov^2 minus the Heisenberg floor (N/4 contrast)^2.

        Non-negative for every physically preparable state; artificial
        moment sets used in intermediate algebra may dip below.
        """
        floor = (self.n_atoms / 4.0 * self.contrast) ** 2
        return self.var_jy * self.var_jz - self.cov**2 - floor

    def jz_noise_db(self) -> DbValue:
        """Prepared J_z noise relative to the standard quantum limit."""
        return db_above_sql(math.sqrt(self.var_jz), self.n_atoms)

    def jy_noise_db(self) -> DbValue:
        """Prepared J_y noise relative to the standard quantum limit."""
        return db_above_sql(math.sqrt(self.var_jy), self.n_atoms)


__all__ = [
    "ApparatusParams",
    "CapacityError",
    "ConfigError",
    "DbValue",
    "PlanarValidityWarning",
    "SpinGaussianState",
    "ValidityError",
    "broadened_linewidth",
    "css_noise",
    "db_above_sql",
    "noise_from_db",
]
