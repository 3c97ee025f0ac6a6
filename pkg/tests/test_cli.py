"""Command line client: flags, outputs, exit codes, byte determinism."""

import pytest

from spinmag.cli import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_VALIDITY,
    build_parser,
    main,
)

SMALL = ["--set", "n_atoms=20000", "--trials", "120"]
SQUEEZED = ["--set", "n_atoms=500000", "--set", "phi_ac_shear=0.39269908169872414"]


def read_all(out_dir):
    return {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}


def test_parser_has_all_subcommands():
    parser = build_parser()
    text = parser.format_help()
    for name in ("magnify", "refocus", "limits", "kerr", "oracle-check", "serve"):
        assert name in text


def test_magnify_writes_sweeps(tmp_path, capsys):
    rc = main(["magnify", *SMALL, "--out", str(tmp_path)])
    assert rc == EXIT_OK
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["snr_vs_m.csv", "sweep_detuning.csv", "sweep_phi_ac.csv"]
    out = capsys.readouterr().out
    assert "pulse-area sweep" in out
    assert "snr saturation" in out
    header = (tmp_path / "sweep_phi_ac.csv").read_text().splitlines()[0]
    assert header == "phi_ac,m_fit,m_theory,ci_low,ci_high"


def test_magnify_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["magnify", *SMALL, "--out", str(a)]) == EXIT_OK
    assert main(["magnify", *SMALL, "--out", str(b)]) == EXIT_OK
    assert read_all(a) == read_all(b)


def test_magnify_seed_changes_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["magnify", *SMALL, "--out", str(a)])
    main(["magnify", *SMALL, "--seed", "99", "--out", str(b)])
    assert read_all(a) != read_all(b)


def test_refocus_writes_noise_and_histograms(tmp_path, capsys):
    rc = main(["refocus", *SQUEEZED, "--set", "theta_refocus=0.029",
               "--trials", "150", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["hist_hi.csv", "hist_lo.csv", "hist_opt.csv",
                     "refocus_noise.csv"]
    out = capsys.readouterr().out
    assert "min noise" in out
    assert "normalized SNR" in out
    hist = (tmp_path / "hist_opt.csv").read_text().splitlines()
    assert hist[0] == "trial,branch,detected_jz"
    assert hist[1].split(",")[1] == "plus"


def test_limits_reports_floor(tmp_path, capsys):
    rc = main(["limits", "--set", "n_atoms=500000", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "-28.25 dB" in out
    assert "-31.40 dB" in out
    assert "PASS" in out
    rows = (tmp_path / "gain_sweep.csv").read_text().splitlines()
    assert rows[0] == "n_atoms,xi_min_sq,xi_min_db"
    assert len(rows) > 10


def test_limits_custom_operating_point(tmp_path, capsys):
    rc = main(["limits", "--set", "n_atoms=500000", "--xi-sq", "0.1585",
               "--m", "30", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    assert "24726000" in capsys.readouterr().out


def test_kerr_check_passes_in_linear_regime(tmp_path, capsys):
    rc = main(["kerr", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out and "validity threshold" in out
    header = (tmp_path / "kerr_divergence.csv").read_text().splitlines()[0]
    assert header.startswith("m,linear_var_y,oracle_var_y")


def test_kerr_check_fails_for_small_alpha(tmp_path, capsys):
    # few-photon field: linearization is invalid, the check must say so
    rc = main(["kerr", "--alpha-sq", "4", "--out", str(tmp_path)])
    assert rc == EXIT_CHECK_FAILED
    assert "FAIL" in capsys.readouterr().out


def test_oracle_check(tmp_path, capsys):
    rc = main(["oracle-check", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "oracle check: PASS" in out
    rows = (tmp_path / "oracle_check.csv").read_text().splitlines()
    assert len(rows) == 13  # header + 12 cases


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_atoms = 20000\nn_trials = 60\n")
    out = tmp_path / "out"
    rc = main(["magnify", "--config", str(cfg), "--out", str(out)])
    assert rc == EXIT_OK


def test_unknown_key_exits_config(tmp_path, capsys):
    rc = main(["magnify", "--set", "bogus=1", "--out", str(tmp_path)])
    assert rc == EXIT_CONFIG
    assert "bogus" in capsys.readouterr().err


def test_missing_config_file_exits_config(tmp_path):
    rc = main(["magnify", "--config", str(tmp_path / "nope.cfg"),
               "--out", str(tmp_path)])
    assert rc == EXIT_CONFIG


def test_malformed_set_pair_exits_config(tmp_path):
    rc = main(["magnify", "--set", "n_trials", "--out", str(tmp_path)])
    assert rc == EXIT_CONFIG


def test_domain_error_exits_validity(tmp_path, capsys):
    rc = main(["limits", "--xi-sq", "-1", "--out", str(tmp_path)])
    assert rc == EXIT_VALIDITY
    assert "validity error" in capsys.readouterr().err


def test_entry_point_is_installed():
    import shutil

    assert shutil.which("spinmag") is not None
