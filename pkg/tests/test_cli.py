"""Config parsing, command dispatch, output formats, exit codes."""

import json
import math

import pytest

from beurling import cli
from beurling.errors import ConfigError


def run_cli(args):
    return cli.main(args)


class TestParseConfig:
    def test_valid(self):
        cfg = cli.parse_config("scenario = rational\ncommand = mertens\nx_max = 1000000")
        assert cfg.scenario == "rational"
        assert cfg.command == "mertens"
        assert cfg.x_max == 1e6

    def test_comments_and_sections(self):
        text = """
        # a comment
        [run]
        scenario = ex53   # trailing comment
        command = count
        [scenario]
        y_max = 20
        """
        cfg = cli.parse_config(text)
        assert cfg.scenario == "ex53"
        assert cfg.y_max == 20.0

    def test_empty_input(self):
        with pytest.raises(ConfigError) as exc:
            cli.parse_config("")
        msgs = [m for _, m in exc.value.errors]
        assert any("missing scenario" in m for m in msgs)

    def test_a_below_threshold(self):
        with pytest.raises(ConfigError) as exc:
            cli.parse_config("scenario = ex52\ncommand = count\nA = 1.5")
        assert any("A" in m for _, m in exc.value.errors)

    def test_errors_carry_line_numbers(self):
        with pytest.raises(ConfigError) as exc:
            cli.parse_config("scenario = rational\ncommand = count\nstep_h = nope\nwhat = 1")
        lines = sorted(ln for ln, _ in exc.value.errors)
        assert lines == [3, 4]

    def test_range_checks(self):
        with pytest.raises(ConfigError):
            cli.parse_config("scenario = rational\ncommand = count\nstep_h = 0.5")
        with pytest.raises(ConfigError):
            cli.parse_config("scenario = rational\ncommand = count\nx_max = 1e9")

    def test_unknown_command(self):
        with pytest.raises(ConfigError):
            cli.parse_config("scenario = rational\ncommand = fly")


class TestCommands:
    def test_enumerate_csv(self, tmp_path, capsys):
        out = tmp_path / "enum.csv"
        rc = run_cli([
            "--set", "scenario=explicit", "--set", "primes=2,3",
            "--set", "command=enumerate", "--set", "x_max=20", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "value,log_value,lambda,mobius"
        assert len(lines) == 1 + 9  # 1,2,3,4,6,8,9,12,16,18 <= 20
        first = lines[1].split(",")
        assert float(first[0]) == 1.0 and int(first[3]) == 1

    def test_mertens_json(self, tmp_path):
        out = tmp_path / "m.json"
        rc = run_cli([
            "--set", "scenario=rational", "--set", "command=mertens",
            "--set", "x_max=100000", "--out", str(out),
        ])
        assert rc == 0
        data = json.loads(out.read_text())
        assert data["c_harmonic"] == pytest.approx(-0.5772, abs=1e-3)
        assert data["agreement"] is True

    def test_probe_json(self, tmp_path):
        out = tmp_path / "p.json"
        rc = run_cli([
            "--set", "scenario=ex53", "--set", "command=probe",
            "--set", "t_window=0.5,1.5", "--set", "t_count=3", "--out", str(out),
        ])
        assert rc == 0
        data = json.loads(out.read_text())
        by_t = {p["t0"]: p for p in data["probes"]}
        assert by_t[1.0]["exponent"] == pytest.approx(-0.5, abs=0.05)

    def test_zeta_csv(self, capsys):
        rc = run_cli([
            "--set", "scenario=remark54", "--set", "command=zeta",
            "--set", "x_max=10000", "--set", "sigma_list=2.0,1.5",
        ])
        assert rc == 0
        head = capsys.readouterr().out.splitlines()
        assert head[0].startswith("sigma,t,zeta_N_re")
        assert len(head) == 3

    def test_verify_rational_exit_zero(self, tmp_path):
        out = tmp_path / "v.json"
        rc = run_cli([
            "--set", "scenario=rational", "--set", "command=verify",
            "--set", "x_max=100000", "--out", str(out),
        ])
        assert rc == 0
        data = json.loads(out.read_text())
        assert data["contradictions_total"] == 0

    def test_kernels_json(self, tmp_path):
        out = tmp_path / "k.json"
        rc = run_cli([
            "--set", "scenario=rational", "--set", "command=kernels",
            "--set", "x_max=100000", "--set", "kernel=abel", "--out", str(out),
        ])
        assert rc == 0
        data = json.loads(out.read_text())
        assert data["l1"]["verdict"] == "consistent with L1"
        assert data["c"] == pytest.approx(-0.5772, abs=5e-3)

    def test_config_error_exit_code(self, capsys):
        rc = run_cli(["--set", "scenario=unknown_system", "--set", "command=count"])
        assert rc == cli.EXIT_CONFIG
        assert "config error" in capsys.readouterr().err

    def test_numeric_error_exit_code(self, capsys):
        # asking for values beyond the data window is a numeric range error
        rc = run_cli([
            "--set", "scenario=explicit", "--set", "primes=2", "--set", "x_max=100",
            "--set", "command=mobius", "--set", "x_list=1000",
        ])
        assert rc == cli.EXIT_NUMERIC

    def test_determinism_byte_identical(self, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            rc = run_cli([
                "--set", "scenario=ex53", "--set", "command=kernels",
                "--set", "y_max=24", "--out", str(path),
            ])
            assert rc == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_12_digit_formatting(self):
        assert cli.fmt(math.pi) == "3.14159265359"
        assert cli.fmt(1.0) == "1"
        assert cli.fmt(True) == "true"
