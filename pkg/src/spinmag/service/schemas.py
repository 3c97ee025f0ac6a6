"""Request and response models for the service endpoints.

Run configuration travels as the same flat string mapping the config
files use, so file, --set override, and request body all funnel through
one parser and produce identical diagnostics.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class RunRequest(BaseModel):
    config: dict[str, str] = Field(default_factory=dict)


class MagnifyRequest(RunRequest):
    phi_values: list[float] | None = None
    delta0_values: list[float] | None = None
    m_values: list[float] | None = None


class RefocusRequest(RunRequest):
    theta_values: list[float] | None = None
    m_values: list[float] | None = None
    histogram_factors: tuple[float, float, float] = (0.5, 1.0, 2.0)


class LimitsRequest(RunRequest):
    n_values: list[float] | None = None
    xi_sq: float = 0.1585
    m: float = 30.0


class KerrRequest(BaseModel):
    alpha_mag_sq: float = 25.0
    chi: float = 1.0e-3
    m_values: list[float] | None = None


class OracleCheckRequest(BaseModel):
    n_values: list[int] | None = None
    m_values: list[float] | None = None


class PhiSweepPoint(BaseModel):
    phi_ac: float
    m_fit: float
    m_theory: float
    ci_low: float
    ci_high: float


class DetuningSweepPoint(BaseModel):
    delta0: float
    m_fit: float
    m_theory: float
    ci_low: float
    ci_high: float


class SnrPoint(BaseModel):
    m: float
    norm_snr_mc: float
    norm_snr_analytic: float


class MagnifySummary(BaseModel):
    phi_slope_fit: float
    phi_slope_theory: float
    phi_slope_rel_err: float
    alpha_fit: float
    alpha_predicted: float


class MagnifyResponse(BaseModel):
    sweep_phi_ac: list[PhiSweepPoint]
    sweep_detuning: list[DetuningSweepPoint]
    snr_vs_m: list[SnrPoint]
    summary: MagnifySummary


class NoisePoint(BaseModel):
    theta: float
    m: float
    noise_mc: float
    noise_analytic: float
    ref_squeezed: float
    ref_css: float


class HistogramBlock(BaseModel):
    label: str
    theta: float
    m: float
    plus: list[float]
    minus: list[float]


class RefocusSummary(BaseModel):
    theta: float
    opt_m: float
    min_noise_css: float
    norm_snr_mc: float | None = None
    norm_snr_analytic: float | None = None
    norm_snr_closed_form: float | None = None


class RefocusResponse(BaseModel):
    noise: list[NoisePoint]
    histograms: list[HistogramBlock]
    summaries: list[RefocusSummary]


class LimitsRow(BaseModel):
    n_atoms: float
    xi_min_sq: float
    xi_min_db: float


class LimitsSummary(BaseModel):
    n_atoms: int
    xi_min_sq_at_n: float
    xi_min_db_at_n: float
    xi_sat_sq: float
    xi_sat_db: float
    half_saturation_n: float
    max_detuning_hz: float
    balance_max_rel_dev: float


class LimitsResponse(BaseModel):
    rows: list[LimitsRow]
    summary: LimitsSummary


class KerrRow(BaseModel):
    m: float
    linear_var_y: float
    oracle_var_y: float
    mean_x_err: float
    mean_y_err: float
    var_x_err: float
    var_y_err: float
    validity_ratio: float
    valid: bool


class KerrSummary(BaseModel):
    passed: bool
    max_mean_err_linear: float
    max_var_err_linear: float
    first_invalid_m: float | None = None
    max_var_y_err: float


class KerrResponse(BaseModel):
    rows: list[KerrRow]
    summary: KerrSummary


class OracleCase(BaseModel):
    n_atoms: int
    m: float
    contrast: float
    mean_jy_err: float
    mean_jz_err: float
    var_jy_err: float
    var_jz_err: float
    cov_err: float
    passed: bool


class OracleCheckResponse(BaseModel):
    cases: list[OracleCase]
    passed: bool
    worst: OracleCase


class HealthResponse(BaseModel):
    status: str
    version: str
