"""Resolution limits of magnified squeezing readout.

Free-space spin flips cap the usable probe detuning, and the cavity decay
back-action at that detuning sets a noise floor that competes with the
magnified signal.  Balancing the two yields the smallest squeezing
parameter a magnification readout can resolve, independent of the chosen
magnification.  Both the collapsed closed forms and the step-by-step
balance derivation are exposed so they can be checked against each other.
"""

from __future__ import annotations

import math

from scipy.optimize import brentq

from .core import ApparatusParams

_DEFAULT_GAMMA_RATIO = ApparatusParams().gamma_ratio


def max_detuning(
    n_atoms: int | float,
    cooperativity: float,
    kappa0: float,
    xi_sq: float,
    m: float,
) -> float:
    """Largest detuning before spin flips swamp the squeezed variance.

    Requiring the flip variance (M delta0 / 6 C kappa0) to stay below the
    prepared variance xi^2 N / 4 gives delta0 <= (3/2) N C kappa0 xi^2 / M.
    """
    _check_positive(n_atoms=n_atoms, cooperativity=cooperativity,
                    kappa0=kappa0, xi_sq=xi_sq, m=m)
    return 1.5 * n_atoms * cooperativity * kappa0 * xi_sq / m


def magnified_signal_variance(n_atoms: int | float, m: float, xi_sq: float) -> float:
    """Squeezed J_z noise after magnification: (N/4) M^2 xi^2."""
    _check_positive(n_atoms=n_atoms, m=m, xi_sq=xi_sq)
    return n_atoms / 4.0 * m**2 * xi_sq


def backaction_variance_at_max_detuning(
    n_atoms: int | float,
    cooperativity: float,
    gamma_ratio: float,
    xi_sq: float,
    m: float,
    kappa0: float = 8.0e3,
) -> float:
    """Decay back-action evaluated at the flip-limited detuning.

    Built from the derivation steps rather than the collapsed result:
    insert max_detuning into the shear decay term (N/4) M kappa / delta0
    with the broadened kappa = kappa0 (1 + N C gamma_ratio^2).  kappa0
    cancels in the end, which is part of what the consistency test checks.
    """
    _check_positive(n_atoms=n_atoms, cooperativity=cooperativity,
                    gamma_ratio=gamma_ratio, xi_sq=xi_sq, m=m, kappa0=kappa0)
    delta0 = max_detuning(n_atoms, cooperativity, kappa0, xi_sq, m)
    kappa = kappa0 * (1.0 + n_atoms * cooperativity * gamma_ratio**2)
    return n_atoms / 4.0 * m * kappa / delta0


def xi_min_sq(
    n_atoms: int | float,
    cooperativity: float,
    gamma_ratio: float = _DEFAULT_GAMMA_RATIO,
) -> float:
    """Smallest resolvable squeezing parameter (variance ratio).

    xi_min^2 = sqrt( (1 + N C gamma_ratio^2) / (1.5 N C) ).  Falls with
    atom number until the broadened-linewidth term takes over and the
    floor saturates at xi_sat_sq.
    """
    _check_positive(n_atoms=n_atoms, cooperativity=cooperativity,
                    gamma_ratio=gamma_ratio)
    nc = n_atoms * cooperativity
    return math.sqrt((1.0 + nc * gamma_ratio**2) / (1.5 * nc))


def xi_min_sq_from_balance(
    n_atoms: int | float,
    cooperativity: float,
    m: float,
    gamma_ratio: float = _DEFAULT_GAMMA_RATIO,
) -> float:
    """Resolve xi_min^2 numerically as the signal/back-action balance point.

    Root of magnified_signal_variance(xi^2) = back-action at the
    flip-limited detuning, found by bracketing.  The magnification cancels
    from the balance, so the result must not depend on m; the consistency
    test runs this at several m and compares against the closed form.
    """
    _check_positive(m=m)

    def imbalance(xi_sq: float) -> float:
        signal = magnified_signal_variance(n_atoms, m, xi_sq)
        noise = backaction_variance_at_max_detuning(
            n_atoms, cooperativity, gamma_ratio, xi_sq, m)
        return signal - noise

    return brentq(imbalance, 1e-12, 1.0, xtol=1e-18, rtol=1e-14)


def xi_sat_sq(gamma_ratio: float = _DEFAULT_GAMMA_RATIO) -> float:
    """Large-N saturation value sqrt(2/3) * gamma_ratio of xi_min_sq."""
    _check_positive(gamma_ratio=gamma_ratio)
    return math.sqrt(2.0 / 3.0) * gamma_ratio


def half_saturation_atom_number(
    cooperativity: float,
    gamma_ratio: float = _DEFAULT_GAMMA_RATIO,
) -> float:
    """N at which the two contributions to xi_min_sq are equal.

    Solves N C gamma_ratio^2 = 1; there xi_min_sq is sqrt(2) times (1.5 dB
    above) its saturation value.
    """
    _check_positive(cooperativity=cooperativity, gamma_ratio=gamma_ratio)
    return 1.0 / (cooperativity * gamma_ratio**2)


def gain_sweep(
    n_values,
    cooperativity: float,
    gamma_ratio: float = _DEFAULT_GAMMA_RATIO,
) -> list[tuple[float, float, float]]:
    """Resolution floor over atom number: rows (N, xi_min^2, dB)."""
    rows = []
    for n in n_values:
        value = xi_min_sq(n, cooperativity, gamma_ratio)
        rows.append((float(n), value, 10.0 * math.log10(value)))
    return rows


def _check_positive(**named: float) -> None:
    for name, value in named.items():
        if value <= 0:
            raise ValueError(f"{name} must be positive, got {value}")
