"""Config parsing, exports, and subcommand behavior."""

import json
import os

import numpy as np
import pytest

from solitonforge import cli
from solitonforge.errors import ParseError

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestParseConfig:
    def test_minimal_defaults(self, tmp_path):
        cfg = cli.parse_config(
            write_config(tmp_path, {"factors": [{"dim": 2, "lambda": 1}]})
        )
        spec = cfg.spec
        assert spec.gauge_C == -1.0
        assert spec.seed_coeffs == (-1e-4,)
        assert spec.step_controls.rtol == 1e-10
        assert spec.step_controls.atol == 1e-10
        assert spec.origin_tol == 1e-8

    def test_lambda_defaulted_to_dim_minus_one(self, tmp_path):
        cfg = cli.parse_config(write_config(tmp_path, {"factors": [{"dim": 3}]}))
        assert cfg.spec.factors[0].einstein_const == 2.0

    def test_unknown_key_rejected(self, tmp_path):
        path = write_config(
            tmp_path,
            {"factors": [{"dim": 2, "lambda": 1}], "epsilon_expander": 0.1},
        )
        with pytest.raises(ParseError, match="epsilon_expander"):
            cli.parse_config(path)

    def test_unknown_factor_key_rejected(self, tmp_path):
        path = write_config(tmp_path, {"factors": [{"dim": 2, "lam": 1}]})
        with pytest.raises(ParseError, match="lam"):
            cli.parse_config(path)

    def test_syntax_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\n  broken\n}")
        with pytest.raises(ParseError, match="line"):
            cli.parse_config(str(path))

    def test_invalid_spec_exit_code(self, tmp_path, capsys):
        path = write_config(tmp_path, {"factors": [{"dim": 1, "lambda": 0.5}]})
        code = cli.main(["verify", "--config", path])
        assert code == 2
        assert "DimensionTooSmall" in capsys.readouterr().err

    def test_seed_eps_override_parse_error(self, tmp_path, capsys):
        path = write_config(tmp_path, {"factors": [{"dim": 2, "lambda": 1}]})
        assert cli.main(["solve", "--config", path, "--seed-eps", "bogus"]) == 2


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    out = tmp_path_factory.mktemp("solve_out")
    path = os.path.join(CONFIG_DIR, "bryant_d2.json")
    code = cli.main(["solve", "--config", path, "--out", str(out)])
    assert code == 0
    return out


class TestExports:
    def test_csv_header_order(self, solved):
        header, _ = cli.read_profile_csv(str(solved / "profile.csv"))
        assert header == [
            "s", "t", "X_1", "Y_1", "L", "H",
            "g_1", "g_dot_1", "g_ddot_1", "u", "u_dot", "u_ddot",
        ]

    def test_round_trip_bit_identical(self, solved, tmp_path):
        header, data = cli.read_profile_csv(str(solved / "profile.csv"))
        # re-serializing the parsed values reproduces the file byte for byte
        original = (solved / "profile.csv").read_text()
        lines = [",".join(header)]
        for row in zip(*(data[h] for h in header)):
            lines.append(",".join(cli._fmt(v) for v in row))
        assert "\n".join(lines) + "\n" == original

    def test_determinism(self, solved, tmp_path):
        path = os.path.join(CONFIG_DIR, "bryant_d2.json")
        assert cli.main(["solve", "--config", path, "--out", str(tmp_path)]) == 0
        assert (tmp_path / "profile.csv").read_bytes() == (
            solved / "profile.csv"
        ).read_bytes()

    def test_json_summary(self, solved):
        summary = json.loads((solved / "profile.json").read_text())
        assert summary["dims"] == [2]
        assert summary["termination"] == "origin"

    def test_format_flag_restricts(self, tmp_path):
        path = os.path.join(CONFIG_DIR, "bryant_d2.json")
        assert cli.main([
            "solve", "--config", path, "--out", str(tmp_path), "--format", "json",
        ]) == 0
        assert not (tmp_path / "profile.csv").exists()
        assert (tmp_path / "profile.json").exists()


class TestPlots:
    def test_plot_series_start_above_zero(self, tmp_path):
        payload = {
            "factors": [{"dim": 2, "lambda": 1}],
            "output": {"plots": ["g1_vs_t", "L_vs_s"]},
        }
        path = write_config(tmp_path, payload)
        out = tmp_path / "out"
        assert cli.main(["solve", "--config", path, "--out", str(out)]) == 0
        series = np.loadtxt(out / "g1_vs_t.dat")
        assert series[0, 0] > 0.0  # t = 0 is a limit, never a sample
        assert (out / "L_vs_s.dat").exists()

    def test_unknown_series_rejected(self, tmp_path, capsys):
        payload = {
            "factors": [{"dim": 2, "lambda": 1}],
            "output": {"plots": ["g7_vs_t"]},
        }
        path = write_config(tmp_path, payload)
        assert cli.main(["solve", "--config", path, "--out", str(tmp_path / "o")]) == 2


class TestEnvironment:
    def test_out_env_var_default(self, tmp_path, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv(cli.OUT_ENV_VAR, str(target))
        path = write_config(tmp_path, {"factors": [{"dim": 2, "lambda": 1}]})
        assert cli.main(["solve", "--config", path]) == 0
        assert (target / "profile.csv").exists()

    def test_cli_out_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUT_ENV_VAR, str(tmp_path / "ignored"))
        out = tmp_path / "explicit"
        path = write_config(tmp_path, {"factors": [{"dim": 2, "lambda": 1}]})
        assert cli.main(["solve", "--config", path, "--out", str(out)]) == 0
        assert (out / "profile.csv").exists()
        assert not (tmp_path / "ignored").exists()


class TestSubcommands:
    def test_verify_exit_zero_on_pass(self, tmp_path, capsys):
        path = os.path.join(CONFIG_DIR, "bryant_d2.json")
        code = cli.main(["verify", "--config", path, "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "verify: PASS" in out
        report = json.loads((tmp_path / "verify_report.json").read_text())
        assert report["passed"] is True

    def test_ricci_flat_subcommand(self, tmp_path, capsys):
        path = os.path.join(CONFIG_DIR, "ricci_flat_d2_3.json")
        code = cli.main(["ricci-flat", "--config", path, "--out", str(tmp_path)])
        assert code == 0
        summary = json.loads((tmp_path / "profile.json").read_text())
        assert summary["max_abs_L"] <= 1e-8
        assert summary["max_abs_H_minus_1"] <= 1e-8
        assert summary["max_abs_ricci"] <= 1e-6

    def test_seed_eps_overrides_change_result(self, tmp_path):
        path = os.path.join(CONFIG_DIR, "r2_d2_3.json")
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["solve", "--config", path, "--out", str(a)]) == 0
        assert cli.main([
            "solve", "--config", path, "--out", str(b),
            "--seed-eps", "2=2e-6",
        ]) == 0
        sa = json.loads((a / "profile.json").read_text())
        sb = json.loads((b / "profile.json").read_text())
        assert sa["seed_coeffs"] != sb["seed_coeffs"]
