"""Config validation, CSV emission, and override handling for the runner."""

import csv
import glob
import math
import textwrap

import pytest

from satsec import cli
from satsec.cli import (CSV_HEADER, ConfigError, load_config, run_sweep,
                        validate_config)


def write_cfg(tmp_path, body, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return str(path)


BASE = """\
    [[layers]]
    n = 5
    a_e_km = 600.0

    [sweep]
    variable = "a_e"
    grid = [600.0, 900.0]
    methods = ["exact", "mc"]
    metrics = ["c_erg", "p_out"]
    r_t = 2.0
    mc_trials = 2000
    seed = 9
"""


def read_rows(out_path):
    with open(out_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_HEADER.split(",")
    return rows[1:]


class TestShippedConfigs:
    @pytest.mark.parametrize("path", sorted(glob.glob("configs/*.toml")))
    def test_validates(self, path):
        cfg = validate_config(load_config(path))
        assert cfg["sweep"]["grid"]
        assert cfg["layers"]


class TestSweepOutput:
    def test_row_structure(self, tmp_path):
        cfg = write_cfg(tmp_path, BASE)
        out = tmp_path / "run.csv"
        assert cli.main(["--config", cfg, "--out", str(out)]) == 0
        rows = read_rows(out)
        # 2 grid points x (2 exact metrics + 2 mc metrics)
        assert len(rows) == 8
        for row in rows:
            assert len(row) == 8
            assert row[0] == "a_e"
            assert float(row[1]) in (600.0, 900.0)
            assert row[2] in ("exact", "mc")
            assert row[3] in ("c_erg", "p_out")
            assert math.isfinite(float(row[4]))
            if row[2] == "exact":
                assert row[5:] == ["", "", ""]
            else:
                assert float(row[5]) >= 0.0
                assert row[6] == "2000"
                assert row[7] == "9"

    def test_values_match_library(self, tmp_path):
        from conftest import build_scenario

        from satsec.secrecy import ergodic_secrecy_capacity

        cfg = write_cfg(tmp_path, BASE)
        out = tmp_path / "run.csv"
        cli.main(["--config", cfg, "--out", str(out)])
        rows = read_rows(out)
        got = next(float(r[4]) for r in rows
                   if r[2] == "exact" and r[3] == "c_erg"
                   and float(r[1]) == 600.0)
        want = ergodic_secrecy_capacity(build_scenario(n=5, a_e=600.0))
        assert got == pytest.approx(want, rel=1e-10)

    def test_worker_invariance(self, tmp_path):
        body = BASE.replace('methods = ["exact", "mc"]', 'methods = ["mc"]')
        body = body.replace("mc_trials = 2000", "mc_trials = 40000")
        cfg = write_cfg(tmp_path, body)
        out1, out3 = tmp_path / "w1.csv", tmp_path / "w3.csv"
        cli.main(["--config", cfg, "--out", str(out1), "--workers", "1"])
        cli.main(["--config", cfg, "--out", str(out3), "--workers", "3"])
        assert out1.read_bytes() == out3.read_bytes()

    def test_seed_and_trial_flags(self, tmp_path):
        body = BASE.replace('methods = ["exact", "mc"]', 'methods = ["mc"]')
        cfg = write_cfg(tmp_path, body)
        out = tmp_path / "run.csv"
        cli.main(["--config", cfg, "--out", str(out),
                  "--seed", "77", "--trials", "5000"])
        for row in read_rows(out):
            assert row[6] == "5000"
            assert row[7] == "77"

    def test_method_flag_overrides_config(self, tmp_path):
        cfg = write_cfg(tmp_path, BASE)
        out = tmp_path / "run.csv"
        cli.main(["--config", cfg, "--out", str(out), "--method", "approx"])
        methods = {row[2] for row in read_rows(out)}
        assert methods == {"approx"}


class TestOverrides:
    def test_set_paths(self, tmp_path):
        from conftest import build_scenario

        from satsec.secrecy import ergodic_secrecy_capacity

        cfg = write_cfg(tmp_path, BASE)
        out = tmp_path / "run.csv"
        rc = cli.main(["--config", cfg, "--out", str(out),
                       "--set", "layers.0.n=50",
                       "--set", "sweep.grid=[300.0]",
                       "--set", "sweep.metrics=[\"c_erg\"]",
                       "--set", "system.beam_mode=steerable",
                       "--method", "exact"])
        assert rc == 0
        rows = read_rows(out)
        assert len(rows) == 1
        assert float(rows[0][1]) == 300.0
        want = ergodic_secrecy_capacity(
            build_scenario(n=50, a_e=300.0, beam_mode="steerable"))
        assert float(rows[0][4]) == pytest.approx(want, rel=1e-10)


class TestFallbacks:
    def test_exact_cap_substitutes_approx(self, tmp_path, capsys):
        body = BASE.replace("n = 5", "n = 501")
        body = body.replace('methods = ["exact", "mc"]', 'methods = ["exact"]')
        body = body.replace('metrics = ["c_erg", "p_out"]',
                            'metrics = ["c_erg"]')
        cfg = write_cfg(tmp_path, body)
        out = tmp_path / "run.csv"
        assert cli.main(["--config", cfg, "--out", str(out)]) == 0
        assert "exceeds cap" in capsys.readouterr().err
        assert {row[2] for row in read_rows(out)} == {"approx"}

    def test_case_probabilities_stay_exact_at_any_count(self, tmp_path, capsys):
        body = BASE.replace("n = 5", "n = 501")
        body = body.replace('methods = ["exact", "mc"]', 'methods = ["exact"]')
        body = body.replace('metrics = ["c_erg", "p_out"]',
                            'metrics = ["cases"]')
        body = body.replace("grid = [600.0, 900.0]", "grid = [600.0]")
        cfg = write_cfg(tmp_path, body)
        out = tmp_path / "run.csv"
        assert cli.main(["--config", cfg, "--out", str(out)]) == 0
        assert "exceeds cap" not in capsys.readouterr().err
        rows = read_rows(out)
        assert [r[3] for r in rows] == ["case1", "case2", "case3", "case4"]
        assert {r[2] for r in rows} == {"exact"}
        assert sum(float(r[4]) for r in rows) == pytest.approx(1.0, abs=1e-9)

    def test_asymptotic_skips_outage_metrics(self, tmp_path, capsys):
        body = BASE.replace('methods = ["exact", "mc"]',
                            'methods = ["asymptotic"]')
        cfg = write_cfg(tmp_path, body)
        out = tmp_path / "run.csv"
        assert cli.main(["--config", cfg, "--out", str(out)]) == 0
        assert "skipping p_out" in capsys.readouterr().err
        rows = read_rows(out)
        assert {row[3] for row in rows} == {"c_erg"}
        assert {row[2] for row in rows} == {"asymptotic"}


class TestErrors:
    def run_expect_error(self, argv, capsys):
        assert cli.main(argv) == 2
        err = capsys.readouterr().err
        assert err.startswith("error:")
        return err

    def test_missing_config(self, tmp_path, capsys):
        self.run_expect_error(
            ["--config", str(tmp_path / "nope.toml"),
             "--out", str(tmp_path / "x.csv")], capsys)

    def test_unknown_key(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "[system]\nbogus = 1\n" + BASE)
        err = self.run_expect_error(
            ["--config", cfg, "--out", str(tmp_path / "x.csv")], capsys)
        assert "bogus" in err

    def test_empty_grid(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, BASE.replace("grid = [600.0, 900.0]",
                                               "grid = []"))
        self.run_expect_error(
            ["--config", cfg, "--out", str(tmp_path / "x.csv")], capsys)

    def test_unknown_method(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, BASE.replace(
            '["exact", "mc"]', '["exact", "magic"]'))
        self.run_expect_error(
            ["--config", cfg, "--out", str(tmp_path / "x.csv")], capsys)

    def test_cases_with_two_layers(self, tmp_path, capsys):
        extra = "[[layers]]\nn = 3\na_e_km = 900.0\n\n"
        body = (extra + BASE).replace('metrics = ["c_erg", "p_out"]',
                                      'metrics = ["cases"]')
        cfg = write_cfg(tmp_path, body)
        err = self.run_expect_error(
            ["--config", cfg, "--out", str(tmp_path / "x.csv")], capsys)
        assert "single eavesdropper layer" in err

    def test_malformed_override(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, BASE)
        self.run_expect_error(
            ["--config", cfg, "--out", str(tmp_path / "x.csv"),
             "--set", "system.alpha"], capsys)

    def test_bad_method_flag(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, BASE)
        self.run_expect_error(
            ["--config", cfg, "--out", str(tmp_path / "x.csv"),
             "--method", "magic"], capsys)

    def test_run_sweep_is_pure(self, tmp_path):
        cfg = validate_config(load_config(write_cfg(tmp_path, BASE)))
        lines = run_sweep(cfg, workers=1)
        assert lines[0] == CSV_HEADER
        assert len(lines) == 9

    def test_config_error_is_value_error(self):
        assert issubclass(ConfigError, ValueError)
