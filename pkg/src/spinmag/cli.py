"""Command-line front end.

Thin client over the HTTP service: each subcommand builds a request,
posts it (in-process by default, to --server if given), writes the CSV
outputs client-side, and prints a short summary.  Exit codes: 0 success,
1 usage or configuration error, 2 validity-range violation, 3 an
acceptance check failed.
"""

from __future__ import annotations

import argparse
import asyncio
import sys

import httpx

from .config import parse_config_text
from .core import ConfigError
from .csvio import write_tables

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDITY = 2
EXIT_CHECK_FAILED = 3

_KIND_EXIT_CODES = {
    "config": EXIT_CONFIG,
    "validity": EXIT_VALIDITY,
    "capacity": EXIT_VALIDITY,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except httpx.HTTPError as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmag",
        description="Collective-spin magnification simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    specs = [
        ("magnify", cmd_magnify, "pulse-area, detuning and SNR sweeps"),
        ("refocus", cmd_refocus, "noise refocusing sweep and histograms"),
        ("limits", cmd_limits, "resolution-limit tables and checks"),
        ("kerr", cmd_kerr, "optical analog vs exact Kerr evolution"),
        ("oracle-check", cmd_oracle_check,
         "Gaussian model vs exact small-N evolution"),
    ]
    for name, func, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        if name == "kerr":
            p.add_argument("--alpha-sq", type=float, default=25.0,
                           help="mean photon number |alpha|^2")
            p.add_argument("--chi", type=float, default=1.0e-3,
                           help="Kerr rate (1/time)")
        if name == "limits":
            p.add_argument("--xi-sq", type=float, default=0.1585,
                           help="squeezing parameter for the detuning bound")
            p.add_argument("--m", type=float, default=30.0,
                           help="magnification for the detuning bound")
        p.set_defaults(func=func)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--seed", type=int, default=None, help="RNG seed override")
    p.add_argument("--trials", type=int, default=None,
                   help="trial count override")
    p.add_argument("--out", default=".", help="directory for CSV output")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="config override, repeatable")
    p.add_argument("--server", default=None,
                   help="service URL; default runs in-process")


def merged_config(args) -> dict[str, str]:
    """File values, then --set pairs, then dedicated flag overrides."""
    values: dict[str, str] = {}
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values = parse_config_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    for pair in args.set:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        values[key.strip()] = value.strip()
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.trials is not None:
        values["n_trials"] = str(args.trials)
    return values


def post(args, path: str, payload: dict) -> tuple[int, dict]:
    """POST to the configured service, in-process unless --server is set."""
    if args.server is not None:
        response = httpx.post(args.server.rstrip("/") + path, json=payload,
                              timeout=300.0)
        return response.status_code, response.json()

    from .service import create_app

    async def run():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://spinmag",
                                     timeout=None) as client:
            return await client.post(path, json=payload)

    response = asyncio.run(run())
    return response.status_code, response.json()


def _handle_error(status: int, body: dict) -> int:
    if status == 422:
        print(f"request error: {body.get('detail')}", file=sys.stderr)
        return EXIT_CONFIG
    error = body.get("error", {})
    kind = error.get("kind", "config")
    print(f"{kind} error: {error.get('message', body)}", file=sys.stderr)
    return _KIND_EXIT_CODES.get(kind, EXIT_CONFIG)


def cmd_magnify(args) -> int:
    status, body = post(args, "/api/magnify", {"config": merged_config(args)})
    if status != 200:
        return _handle_error(status, body)

    sweep_cols = ("m_fit", "m_theory", "ci_low", "ci_high")
    paths = write_tables(args.out, {
        "sweep_phi_ac.csv": (
            ("phi_ac",) + sweep_cols,
            [[r["phi_ac"]] + [r[c] for c in sweep_cols]
             for r in body["sweep_phi_ac"]]),
        "sweep_detuning.csv": (
            ("delta0",) + sweep_cols,
            [[r["delta0"]] + [r[c] for c in sweep_cols]
             for r in body["sweep_detuning"]]),
        "snr_vs_m.csv": (
            ("m", "norm_snr_mc", "norm_snr_analytic"),
            [[r["m"], r["norm_snr_mc"], r["norm_snr_analytic"]]
             for r in body["snr_vs_m"]]),
    })
    s = body["summary"]
    print(f"pulse-area sweep: fitted slope {s['phi_slope_fit']:.9g} /rad, "
          f"theory {s['phi_slope_theory']:.9g} /rad "
          f"(rel err {s['phi_slope_rel_err']:.2%})")
    print(f"snr saturation: fitted alpha {s['alpha_fit']:.9g}, "
          f"predicted {s['alpha_predicted']:.9g}")
    _print_written(paths)
    return EXIT_OK


def cmd_refocus(args) -> int:
    status, body = post(args, "/api/refocus", {"config": merged_config(args)})
    if status != 200:
        return _handle_error(status, body)

    tables = {
        "refocus_noise.csv": (
            ("theta", "m", "noise_mc", "noise_analytic",
             "ref_squeezed", "ref_css"),
            [[r[c] for c in ("theta", "m", "noise_mc", "noise_analytic",
                             "ref_squeezed", "ref_css")]
             for r in body["noise"]]),
    }
    for block in body["histograms"]:
        rows = []
        for branch in ("plus", "minus"):
            rows.extend([trial, branch, value]
                        for trial, value in enumerate(block[branch]))
        tables[f"hist_{block['label']}.csv"] = (
            ("trial", "branch", "detected_jz"), rows)
    paths = write_tables(args.out, tables)

    for s in body["summaries"]:
        line = (f"theta {s['theta']:.9g} rad: min noise "
                f"{s['min_noise_css']:.9g} CSS units at M {s['opt_m']:.9g}")
        if s["norm_snr_mc"] is not None:
            line += (f"; at M=1/|theta|: normalized SNR "
                     f"{s['norm_snr_mc']:.3f} (MC), "
                     f"{s['norm_snr_analytic']:.3f} (analytic), "
                     f"{s['norm_snr_closed_form']:.3f} (closed form)")
        print(line)
    _print_written(paths)
    return EXIT_OK


def cmd_limits(args) -> int:
    payload = {"config": merged_config(args),
               "xi_sq": args.xi_sq, "m": args.m}
    status, body = post(args, "/api/limits", payload)
    if status != 200:
        return _handle_error(status, body)

    paths = write_tables(args.out, {
        "gain_sweep.csv": (
            ("n_atoms", "xi_min_sq", "xi_min_db"),
            [[r["n_atoms"], r["xi_min_sq"], r["xi_min_db"]]
             for r in body["rows"]]),
    })
    s = body["summary"]
    balanced = s["balance_max_rel_dev"] <= 1e-9
    print(f"resolution floor at N={s['n_atoms']}: "
          f"xi_min^2 {s['xi_min_sq_at_n']:.9g} ({s['xi_min_db_at_n']:.2f} dB)")
    print(f"saturation: {s['xi_sat_sq']:.9g} ({s['xi_sat_db']:.2f} dB), "
          f"half-saturation N {s['half_saturation_n']:.9g}")
    print(f"max detuning (xi^2={args.xi_sq:g}, M={args.m:g}): "
          f"{s['max_detuning_hz']:.9g} Hz")
    print(f"balance derivation vs closed form: max rel dev "
          f"{s['balance_max_rel_dev']:.3g} "
          f"{'PASS' if balanced else 'FAIL'}")
    _print_written(paths)
    return EXIT_OK if balanced else EXIT_CHECK_FAILED


def cmd_kerr(args) -> int:
    merged_config(args)  # surface config-file syntax errors uniformly
    payload = {"alpha_mag_sq": args.alpha_sq, "chi": args.chi}
    status, body = post(args, "/api/kerr", payload)
    if status != 200:
        return _handle_error(status, body)

    columns = ("m", "linear_var_y", "oracle_var_y", "mean_x_err",
               "mean_y_err", "var_x_err", "var_y_err", "validity_ratio",
               "valid")
    paths = write_tables(args.out, {
        "kerr_divergence.csv": (
            columns, [[r[c] for c in columns] for r in body["rows"]]),
    })
    s = body["summary"]
    print(f"linear regime (M <= 2): mean err {s['max_mean_err_linear']:.2%}, "
          f"variance err {s['max_var_err_linear']:.2%} "
          f"{'PASS' if s['passed'] else 'FAIL'}")
    if s["first_invalid_m"] is not None:
        print(f"validity threshold crossed at M {s['first_invalid_m']:g}; "
              f"worst var_y deviation {s['max_var_y_err']:.1%}")
    _print_written(paths)
    return EXIT_OK if s["passed"] else EXIT_CHECK_FAILED


def cmd_oracle_check(args) -> int:
    merged_config(args)  # surface config-file syntax errors uniformly
    status, body = post(args, "/api/oracle-check", {})
    if status != 200:
        return _handle_error(status, body)

    columns = ("n_atoms", "m", "contrast", "mean_jy_err", "mean_jz_err",
               "var_jy_err", "var_jz_err", "cov_err", "passed")
    paths = write_tables(args.out, {
        "oracle_check.csv": (
            columns, [[c[k] for k in columns] for c in body["cases"]]),
    })
    worst = body["worst"]
    print(f"{len(body['cases'])} cases; worst at N={worst['n_atoms']} "
          f"M={worst['m']:g}: var_jy err {worst['var_jy_err']:.2%}, "
          f"cov err {worst['cov_err']:.2%}")
    print("oracle check: " + ("PASS" if body["passed"] else "FAIL"))
    _print_written(paths)
    return EXIT_OK if body["passed"] else EXIT_CHECK_FAILED


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _print_written(paths: list[str]) -> None:
    for path in paths:
        print(f"wrote {path}")


if __name__ == "__main__":
    sys.exit(main())
