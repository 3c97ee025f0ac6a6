"""Flat key = value run configuration.

One key per line, '#' comments, keys named exactly after the
ExperimentConfig and ApparatusParams fields.  The format is deliberately
dumb: language-neutral, diffable, and parseable by anything.

Detection is selected by the single key `detection` (cavity or
fluorescence) with its rms taken from the matching apparatus noise
field; `detection_rms` and `detection_range` override explicitly.
"""

from __future__ import annotations

import dataclasses
import math

from .core import ApparatusParams, ConfigError
from .protocol import DetectionModel, ExperimentConfig

_INT_KEYS = ("n_atoms", "n_trials", "seed")
_FLOAT_KEYS = ("delta0", "phi_ac_shear", "phi_ac_mag", "theta_refocus",
               "signal_rotation", "pulse_noise_frac")
_APPARATUS_KEYS = ("gamma", "omega_hf", "delta_c", "kappa0", "cooperativity",
                   "fluor_noise", "cavity_noise")
_DETECTION_KEYS = ("detection", "detection_rms", "detection_range")

KNOWN_KEYS = _INT_KEYS + _FLOAT_KEYS + _APPARATUS_KEYS + _DETECTION_KEYS + (
    "mw_jitter_db",)


def parse_config_text(text: str) -> dict[str, str]:
    """key = value lines to a raw string mapping; later lines win."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def build_config(values: dict[str, str]) -> ExperimentConfig:
    """Typed ExperimentConfig from a raw mapping; rejects unknown keys."""
    for key in values:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")

    apparatus_kwargs = {k: _parse_float(k, values[k])
                        for k in _APPARATUS_KEYS if k in values}
    apparatus = ApparatusParams(**apparatus_kwargs)

    kwargs: dict = {"apparatus": apparatus}
    for key in _INT_KEYS:
        if key in values:
            kwargs[key] = _parse_int(key, values[key])
    for key in _FLOAT_KEYS:
        if key in values:
            kwargs[key] = _parse_float(key, values[key])
    if "mw_jitter_db" in values:
        raw = values["mw_jitter_db"]
        kwargs["mw_jitter_db"] = None if raw.lower() == "none" \
            else _parse_float("mw_jitter_db", raw)

    kind = values.get("detection", "fluorescence")
    if kind == "fluorescence":
        rms = apparatus.fluor_noise
    elif kind == "cavity":
        rms = apparatus.cavity_noise
    else:
        raise ConfigError(f"detection must be cavity or fluorescence, got {kind!r}")
    if "detection_rms" in values:
        rms = _parse_float("detection_rms", values["detection_rms"])
    dynamic_range = None
    if "detection_range" in values:
        dynamic_range = _parse_float("detection_range", values["detection_range"])
    kwargs["detection"] = DetectionModel(kind, rms, dynamic_range)

    return ExperimentConfig(**kwargs)


def load_config(path: str | None, overrides: list[str] | None = None,
                **extra) -> ExperimentConfig:
    """Config file plus --set style key=value overrides plus direct fields.

    extra holds flag-level overrides (seed=..., n_trials=...) that win
    over both the file and --set pairs.
    """
    values: dict[str, str] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                values = parse_config_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for pair in overrides or ():
        if "=" not in pair:
            raise ConfigError(f"override must be key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        values[key.strip()] = value.strip()
    for key, value in extra.items():
        if value is not None:
            values[key] = str(value)
    return build_config(values)


def format_config(config: ExperimentConfig) -> str:
    """Canonical text form; round-trips through the parser."""
    lines = []
    for f in dataclasses.fields(ExperimentConfig):
        if f.name == "apparatus":
            for g in dataclasses.fields(ApparatusParams):
                lines.append(f"{g.name} = {getattr(config.apparatus, g.name)!r}")
        elif f.name == "detection":
            det = config.detection
            lines.append(f"detection = {det.kind}")
            lines.append(f"detection_rms = {det.rms_noise!r}")
            if det.dynamic_range is not None:
                lines.append(f"detection_range = {det.dynamic_range!r}")
        elif f.name == "mw_jitter_db" and config.mw_jitter_db is None:
            lines.append("mw_jitter_db = none")
        else:
            lines.append(f"{f.name} = {getattr(config, f.name)!r}")
    return "\n".join(lines) + "\n"


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected integer, got {raw!r}") from exc


def _parse_float(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected number, got {raw!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"key {key!r}: value must be finite")
    return value
