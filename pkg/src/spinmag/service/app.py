"""FastAPI application wrapping the simulation library.

Endpoints are thin orchestration over the library modules; every run is
fully determined by the request body, and domain errors map to
structured 400 responses so clients can distinguish bad configuration
from validity-range violations.
"""

from __future__ import annotations

import importlib.metadata
import math
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import crosscheck, kerr, limits, protocol
from ..config import build_config
from ..core import CapacityError, ConfigError, ValidityError
from ..dynamics import magnification_factor
from . import schemas

DEFAULT_PHI_VALUES = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
DEFAULT_SNR_M_VALUES = (1.0, 2.0, 4.0, 6.0, 9.0, 14.0, 25.0, 45.0)
DEFAULT_KERR_M_VALUES = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0)
_REFOCUS_M_FACTORS = (0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 1.0,
                      1.1, 1.25, 1.5, 2.0, 2.5)
_DETUNING_HALFWIDTH_FACTORS = (-4.0, -1.0, -0.25, 0.25, 0.5,
                               1.0, 2.0, 4.0, 8.0, 16.0)


def _version() -> str:
    try:
        return importlib.metadata.version("spinmag")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def create_app() -> FastAPI:
    app = FastAPI(title="spinmag", version=_version())

    @app.exception_handler(ConfigError)
    async def config_error(request: Request, exc: ConfigError):
        return _error_response("config", exc)

    @app.exception_handler(ValidityError)
    async def validity_error(request: Request, exc: ValidityError):
        return _error_response("validity", exc)

    @app.exception_handler(CapacityError)
    async def capacity_error(request: Request, exc: CapacityError):
        return _error_response("capacity", exc)

    # remaining ValueErrors are domain-range violations from the library
    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return _error_response("validity", exc)

    @app.get("/api/health", response_model=schemas.HealthResponse)
    async def health():
        return schemas.HealthResponse(status="ok", version=_version())

    @app.post("/api/magnify", response_model=schemas.MagnifyResponse)
    async def magnify(request: schemas.MagnifyRequest):
        return _run_magnify(request)

    @app.post("/api/refocus", response_model=schemas.RefocusResponse)
    async def refocus(request: schemas.RefocusRequest):
        return _run_refocus(request)

    @app.post("/api/limits", response_model=schemas.LimitsResponse)
    async def limits_endpoint(request: schemas.LimitsRequest):
        return _run_limits(request)

    @app.post("/api/kerr", response_model=schemas.KerrResponse)
    async def kerr_endpoint(request: schemas.KerrRequest):
        return _run_kerr(request)

    @app.post("/api/oracle-check", response_model=schemas.OracleCheckResponse)
    async def oracle_check(request: schemas.OracleCheckRequest):
        return _run_oracle_check(request)

    return app


def _error_response(kind: str, exc: Exception) -> JSONResponse:
    return JSONResponse(
        status_code=400,
        content={"error": {"kind": kind, "message": str(exc)}},
    )


def _run_magnify(request: schemas.MagnifyRequest) -> schemas.MagnifyResponse:
    config = build_config(request.config)
    phi_values = request.phi_values or list(DEFAULT_PHI_VALUES)
    if not phi_values:
        raise ConfigError("phi_values must not be empty")
    kappa_half = protocol.cavity_dynamic_range(
        config.apparatus, config.n_atoms) * config.apparatus.delta_c
    delta0_values = request.delta0_values or [
        kappa_half * f for f in _DETUNING_HALFWIDTH_FACTORS]
    m_values = request.m_values or list(DEFAULT_SNR_M_VALUES)

    phi_rows = protocol.sweep_phi_ac(config, phi_values)
    det_rows = protocol.sweep_detuning(config, delta0_values)
    snr_rows = protocol.snr_vs_m(config, m_values)

    phis = np.array([r["phi_ac"] for r in phi_rows])
    fits = np.array([r["m_fit"] for r in phi_rows])
    slope_fit = float(np.sum(phis * fits) / np.sum(phis**2))
    slope_theory = magnification_factor(
        config.apparatus, config.n_atoms, config.delta0, 1.0)
    alpha_fit = protocol.fit_alpha(
        [r["m"] for r in snr_rows], [r["norm_snr_mc"] for r in snr_rows])

    return schemas.MagnifyResponse(
        sweep_phi_ac=[schemas.PhiSweepPoint(**r) for r in phi_rows],
        sweep_detuning=[schemas.DetuningSweepPoint(**r) for r in det_rows],
        snr_vs_m=[schemas.SnrPoint(**r) for r in snr_rows],
        summary=schemas.MagnifySummary(
            phi_slope_fit=slope_fit,
            phi_slope_theory=slope_theory,
            phi_slope_rel_err=abs(slope_fit - slope_theory) / slope_theory,
            alpha_fit=alpha_fit,
            alpha_predicted=protocol.predicted_alpha(config),
        ),
    )


def _refocus_m_grid(theta: float) -> list[float]:
    if theta == 0.0:
        return [1.0, 2.0, 5.0, 10.0, 20.0, 45.0]
    return [f / abs(theta) for f in _REFOCUS_M_FACTORS]


def _run_refocus(request: schemas.RefocusRequest) -> schemas.RefocusResponse:
    config = build_config(request.config)
    theta_values = request.theta_values or [config.theta_refocus]

    noise_points: list[schemas.NoisePoint] = []
    summaries: list[schemas.RefocusSummary] = []
    histograms: list[schemas.HistogramBlock] = []
    for theta in theta_values:
        m_grid = request.m_values or _refocus_m_grid(theta)
        if not m_grid:
            raise ConfigError("m_values must not be empty")
        rows = protocol.sweep_refocus(config, m_grid, [theta])
        noise_points.extend(schemas.NoisePoint(**r) for r in rows)

        best = min(rows, key=lambda r: r["noise_analytic"])
        extra = {}
        if theta != 0.0:
            opt = replace(config.with_magnification(1.0 / abs(theta)),
                          theta_refocus=theta)
            extra = {
                "norm_snr_mc": protocol.normalized_snr_mc(opt),
                "norm_snr_analytic": protocol.normalized_snr_analytic(opt),
                "norm_snr_closed_form": protocol.normalized_snr_closed_form(opt),
            }
        summaries.append(schemas.RefocusSummary(
            theta=theta, opt_m=best["m"],
            min_noise_css=best["noise_analytic"], **extra))

    first_theta = next((t for t in theta_values if t != 0.0), None)
    if first_theta is not None:
        for label, factor in zip(("lo", "opt", "hi"), request.histogram_factors):
            m = factor / abs(first_theta)
            run = replace(config.with_magnification(m),
                          theta_refocus=first_theta)
            plus, minus = protocol.detected_arrays(protocol.run_trials(run))
            histograms.append(schemas.HistogramBlock(
                label=label, theta=first_theta, m=m,
                plus=[float(v) for v in plus],
                minus=[float(v) for v in minus],
            ))

    return schemas.RefocusResponse(
        noise=noise_points, histograms=histograms, summaries=summaries)


def _run_limits(request: schemas.LimitsRequest) -> schemas.LimitsResponse:
    config = build_config(request.config)
    params = config.apparatus
    coop = params.cooperativity
    gr = params.gamma_ratio
    n_values = request.n_values or list(np.logspace(3, 8, 26))

    rows = [
        schemas.LimitsRow(n_atoms=n, xi_min_sq=x, xi_min_db=db)
        for n, x, db in limits.gain_sweep(n_values, coop, gr)
    ]
    value = limits.xi_min_sq(config.n_atoms, coop, gr)
    sat = limits.xi_sat_sq(gr)
    balance_dev = max(
        abs(limits.xi_min_sq_from_balance(config.n_atoms, coop, m, gr) - value)
        / value
        for m in (10.0, 30.0, 100.0)
    )
    summary = schemas.LimitsSummary(
        n_atoms=config.n_atoms,
        xi_min_sq_at_n=value,
        xi_min_db_at_n=10.0 * math.log10(value),
        xi_sat_sq=sat,
        xi_sat_db=10.0 * math.log10(sat),
        half_saturation_n=limits.half_saturation_atom_number(coop, gr),
        max_detuning_hz=limits.max_detuning(
            config.n_atoms, coop, params.kappa0, request.xi_sq, request.m),
        balance_max_rel_dev=balance_dev,
    )
    return schemas.LimitsResponse(rows=rows, summary=summary)


def _run_kerr(request: schemas.KerrRequest) -> schemas.KerrResponse:
    m_values = request.m_values or list(DEFAULT_KERR_M_VALUES)
    table = kerr.divergence_table(request.alpha_mag_sq, m_values, request.chi)
    rows = [
        schemas.KerrRow(
            m=r["m"], linear_var_y=r["linear_var_y"],
            oracle_var_y=r["oracle_var_y"], mean_x_err=r["mean_x_err"],
            mean_y_err=r["mean_y_err"], var_x_err=r["var_x_err"],
            var_y_err=r["var_y_err"], validity_ratio=r["validity_ratio"],
            valid=bool(r["valid"]),
        )
        for r in table
    ]
    linear = [r for r in rows if r.m <= 2.0]
    max_mean = max((max(r.mean_x_err, r.mean_y_err) for r in linear), default=0.0)
    max_var = max((max(r.var_x_err, r.var_y_err) for r in linear), default=0.0)
    first_invalid = next((r.m for r in rows if not r.valid), None)
    summary = schemas.KerrSummary(
        passed=max_mean <= 0.02 and max_var <= 0.05,
        max_mean_err_linear=max_mean,
        max_var_err_linear=max_var,
        first_invalid_m=first_invalid,
        max_var_y_err=max((r.var_y_err for r in rows), default=0.0),
    )
    return schemas.KerrResponse(rows=rows, summary=summary)


def _run_oracle_check(
        request: schemas.OracleCheckRequest) -> schemas.OracleCheckResponse:
    cases, passed, worst = crosscheck.suite(
        request.n_values or crosscheck.DEFAULT_N_VALUES,
        request.m_values or crosscheck.DEFAULT_M_VALUES,
    )

    def to_model(case: crosscheck.ShearCase) -> schemas.OracleCase:
        return schemas.OracleCase(
            n_atoms=case.n_atoms, m=case.m, contrast=case.contrast,
            mean_jy_err=case.mean_jy_err, mean_jz_err=case.mean_jz_err,
            var_jy_err=case.var_jy_err, var_jz_err=case.var_jz_err,
            cov_err=case.cov_err, passed=case.passed,
        )

    return schemas.OracleCheckResponse(
        cases=[to_model(c) for c in cases],
        passed=passed,
        worst=to_model(worst),
    )


app = create_app()
