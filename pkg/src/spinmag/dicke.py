"""Exact collective-spin evolution in the Dicke basis.

Small ensembles are solved without approximation by storing the N+1
amplitudes of the maximal-spin multiplet and applying one-axis twisting
(diagonal phases in J_z) and rotations (matrix exponentials of the
tridiagonal generators) directly to the vector.  This is the ground truth
the planar Gaussian model is validated against: exact moments agree with
the sheared Gaussian moments once the shrinking Bloch vector length is
divided out, and they expose the wrapping of the state around the sphere
that the planar model cannot see.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .core import CapacityError, SpinGaussianState

# Dense exact evolution is cheap up to a few thousand atoms; beyond that
# the eigendecomposition of the rotation generator stops being instant.
MAX_ATOMS = 2000

_NORM_TOL = 1e-8


@dataclass
class DickeVector:
    """State vector over |J = N/2, m>, amplitudes ordered by descending m.

    amplitudes[i] multiplies the state with m = N/2 - i, so index 0 is the
    fully polarized +z state and index N the -z one.
    """

    n_atoms: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_atoms < 1:
            raise ValueError(f"atom number must be positive, got {self.n_atoms}")
        if self.n_atoms > MAX_ATOMS:
            raise CapacityError(
                f"N = {self.n_atoms} exceeds the exact-solver limit {MAX_ATOMS}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.n_atoms + 1,):
            raise ValueError(
                f"need {self.n_atoms + 1} amplitudes, got {self.amplitudes.shape}")

    @property
    def m_values(self) -> np.ndarray:
        """J_z eigenvalues, descending, matching the amplitude order."""
        return self.n_atoms / 2.0 - np.arange(self.n_atoms + 1)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def populations(self) -> np.ndarray:
        """|c_m|^2 ordered like m_values."""
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: "DickeVector") -> complex:
        if other.n_atoms != self.n_atoms:
            raise ValueError("overlap needs equal atom numbers")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DickeMoments:
    """Exact first and second moments of the transverse components."""

    mean_jx: float
    mean_jy: float
    mean_jz: float
    var_jy: float
    var_jz: float
    cov: float
    contrast: float


def make_css(
    n_atoms: int,
    polar: float = np.pi / 2.0,
    azimuth: float = 0.0,
) -> DickeVector:
    """Coherent spin state pointing along (polar, azimuth).

    Product of N identical single-spin states, which in the Dicke basis
    gives binomial amplitudes:

        c_{N/2 - k} = sqrt(C(N, k)) cos(polar/2)^(N-k) (e^{i az} sin(polar/2))^k

    The default is the +x state used as protocol input.
    """
    if n_atoms < 1:
        raise ValueError(f"atom number must be positive, got {n_atoms}")
    if n_atoms > MAX_ATOMS:
        raise CapacityError(
            f"N = {n_atoms} exceeds the exact-solver limit {MAX_ATOMS}")
    k = np.arange(n_atoms + 1)
    half = polar / 2.0
    log_binom = 0.5 * (gammaln(n_atoms + 1) - gammaln(k + 1) - gammaln(n_atoms - k + 1))
    # work in logs for stability; 0 * log(0) at the poles is forced to 0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_cos = np.log(np.abs(np.cos(half)))
        log_sin = np.log(np.abs(np.sin(half)))
        cos_term = np.where(k == n_atoms, 0.0, (n_atoms - k) * log_cos)
        sin_term = np.where(k == 0, 0.0, k * log_sin)
    magnitude = np.exp(log_binom + cos_term + sin_term)
    signs = np.sign(np.cos(half)) ** (n_atoms - k) * np.sign(np.sin(half)) ** k
    amplitudes = magnitude * signs * np.exp(1j * azimuth * k)
    return DickeVector(n_atoms=n_atoms, amplitudes=amplitudes)


def apply_oat(state: DickeVector, mu: float) -> DickeVector:
    """One-axis twisting exp(-i mu J_z^2): pure phases in the Dicke basis.

    mu is the accumulated twisting angle chi * t; the planar shear it
    generates has magnification M = N mu.
    """
    m = state.m_values
    return DickeVector(
        n_atoms=state.n_atoms,
        amplitudes=state.amplitudes * np.exp(-1j * mu * m**2),
    )


def apply_rotation(state: DickeVector, axis: str, angle: float) -> DickeVector:
    """Rotate by exp(-i angle J_axis) for axis in {'x', 'y', 'z'}.

    z rotations are diagonal phases.  x rotations diagonalize the real
    symmetric tridiagonal J_x once per atom number (cached) and apply the
    exact exponential through its eigenbasis.  y rotations conjugate the
    x rotation with quarter-turn z phases, using
    J_y = exp(-i pi/2 J_z) J_x exp(+i pi/2 J_z).
    """
    m = state.m_values
    if axis == "z":
        return DickeVector(
            n_atoms=state.n_atoms,
            amplitudes=state.amplitudes * np.exp(-1j * angle * m),
        )
    if axis == "y":
        pre = state.amplitudes * np.exp(1j * (np.pi / 2.0) * m)
        mid = _apply_x_rotation(pre, state.n_atoms, angle)
        post = mid * np.exp(-1j * (np.pi / 2.0) * m)
        return DickeVector(n_atoms=state.n_atoms, amplitudes=post)
    if axis == "x":
        return DickeVector(
            n_atoms=state.n_atoms,
            amplitudes=_apply_x_rotation(state.amplitudes, state.n_atoms, angle),
        )
    raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}")


@functools.lru_cache(maxsize=8)
def _jx_eigensystem(n_atoms: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of the tridiagonal J_x at this size."""
    offdiag = _ladder_couplings(n_atoms) / 2.0
    w, v = eigh_tridiagonal(np.zeros(n_atoms + 1), offdiag)
    return w, v


def _apply_x_rotation(amplitudes: np.ndarray, n_atoms: int, angle: float) -> np.ndarray:
    w, v = _jx_eigensystem(n_atoms)
    return v @ (np.exp(-1j * angle * w) * (v.T @ amplitudes))


def _ladder_couplings(n_atoms: int) -> np.ndarray:
    """<m+1|J_+|m> between adjacent amplitudes, ordered like the vector."""
    j = n_atoms / 2.0
    m_lower = j - np.arange(1, n_atoms + 1)  # m of the lower state in each pair
    return np.sqrt(j * (j + 1) - m_lower * (m_lower + 1))


def moments(state: DickeVector) -> DickeMoments:
    """Exact transverse moments; requires a normalized state.

    cov is the symmetrized covariance Re<J_y J_z> - <J_y><J_z>, and the
    contrast is <J_x> / (N/2), the preserved Bloch vector fraction.
    """
    norm = state.norm()
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValueError(f"state norm {norm} is not 1 within {_NORM_TOL}")
    psi = state.amplitudes
    m = state.m_values
    p = np.abs(psi) ** 2
    mean_jz = float(np.sum(m * p))
    var_jz = float(np.sum(m**2 * p)) - mean_jz**2
    a = _ladder_couplings(state.n_atoms)
    # (J_+ psi)_i couples from the next-lower m, (J_- psi)_i from the next-higher
    jp = np.zeros_like(psi)
    jp[:-1] = a * psi[1:]
    jm = np.zeros_like(psi)
    jm[1:] = a * psi[:-1]
    mean_plus = complex(np.vdot(psi, jp))
    mean_jx = mean_plus.real
    mean_jy = mean_plus.imag
    jy_psi = (jp - jm) / 2j
    var_jy = float(np.real(np.vdot(jy_psi, jy_psi))) - mean_jy**2
    cov = float(np.real(np.vdot(jy_psi, m * psi))) - mean_jy * mean_jz
    return DickeMoments(
        mean_jx=mean_jx,
        mean_jy=mean_jy,
        mean_jz=mean_jz,
        var_jy=var_jy,
        var_jz=var_jz,
        cov=cov,
        contrast=mean_jx / (state.n_atoms / 2.0),
    )


def tangent_state(state: DickeVector) -> SpinGaussianState:
    """Planar-patch moments of an exact state, for Gaussian comparison.

    The planar model lives on the tangent plane at the Bloch vector tip,
    whose length has shrunk to contrast * N/2, so exact moments map to
    planar ones with one factor of the contrast per J_y index:
    mean_jy / C, var_jy / C^2, cov / C, while the twisting-conserved J_z
    moments carry none.  Comparing these to apply_shear output is the
    oracle equivalence check.
    """
    mom = moments(state)
    c = mom.contrast
    if c <= 0:
        raise ValueError(
            f"contrast {c} is not positive; state has wrapped the sphere")
    return SpinGaussianState(
        n_atoms=state.n_atoms,
        mean_jy=mom.mean_jy / c,
        mean_jz=mom.mean_jz,
        var_jy=mom.var_jy / c**2,
        var_jz=mom.var_jz,
        cov=mom.cov / c,
        contrast=c,
    )


def oat_contrast_closed_form(n_atoms: int, mu: float) -> float:
    """<J_x> after twisting a +x coherent state: (N/2) cos^(N-1)(mu)."""
    return n_atoms / 2.0 * np.cos(mu) ** (n_atoms - 1)
