"""Tests for the command-line front end"""
import json
import math

import mpmath
import pytest

from src import lfunction
from src.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main, run
from src.config import Settings
from src.spec_models import RunConfig

ZETA_2 = math.pi**2 / 6


def _lines(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines()]


class TestCommands:
    """Drive each command through main() and check output and exit codes"""

    def test_verify_semigroup(self, capsys):
        assert main(["verify-semigroup", "--max-n", "24"]) == EXIT_OK
        rows = _lines(capsys)
        assert len(rows) == 23
        assert all(r["ok"] for r in rows)
        assert rows[0]["convention"] == "reciprocal"

    def test_eval_f_w_zero(self, capsys):
        code = main(["eval-f", "--spec", "zeta", "--sigma", "2", "--s", "3", "--w", "0"])
        assert code == EXIT_OK
        (record,) = _lines(capsys)
        assert record["value"][0] == pytest.approx(math.log(float(mpmath.zeta(3))), abs=1e-8)
        assert record["value"][1] == pytest.approx(0, abs=1e-12)

    def test_eval_f_near_abscissa(self, capsys):
        code = main(["eval-f", "--spec", "zeta", "--sigma", "1.4", "--s", "2.0", "--w", "0", "--tol", "1e-10"])
        assert code == EXIT_OK
        (record,) = _lines(capsys)
        assert record["value"][0] == pytest.approx(math.log(ZETA_2), abs=1e-10)

    def test_eval_f_raw_mode(self, capsys):
        argv = ["eval-f", "--spec", "zeta", "--sigma", "2", "--s", "3", "--w", "0.2", "--tol", "1e-9"]
        assert main(argv + ["--mode", "raw"]) == EXIT_OK
        (raw,) = _lines(capsys)
        assert main(argv) == EXIT_OK
        (accelerated,) = _lines(capsys)
        assert raw["terms"] > accelerated["terms"]
        assert raw["value"][0] == pytest.approx(accelerated["value"][0], abs=1e-8)

    def test_eval_L_with_complex_argument(self, capsys):
        assert main(["eval-L", "--spec", "chi4", "--sigma", "2", "--s", "2", "0"]) == EXIT_OK
        records = _lines(capsys)
        assert [r["quantity"] for r in records] == ["L", "ln_L"]
        assert records[0]["value"][0] == pytest.approx(0.915965594177219, abs=1e-10)

    def test_demo_explicit_series(self, capsys):
        assert main(["demo-explicit-series", "--v", "1", "--z", "2.1", "--tol", "1e-8"]) == EXIT_OK
        (record,) = _lines(capsys)
        assert record["rhs"][0] == pytest.approx(ZETA_2 - 1)
        assert record["residual"] < 1e-8

    def test_verify_corollary(self, capsys):
        assert main(["verify-corollary", "--spec", "zeta", "--sigma", "2"]) == EXIT_OK
        records = _lines(capsys)
        assert [r["index"] for r in records] == list(range(10))

    def test_check_kendall(self, capsys):
        argv = ["check-kendall", "--spec", "zeta", "--sigma", "2", "--c", "0.5", "--y", "0.3", "--t", "2"]
        assert main(argv + ["--paths", "20000", "--seed", "4"]) == EXIT_OK
        (report,) = _lines(capsys)
        assert report["check"] == "kendall"
        assert report["ok"] is True

    def test_simulate_is_byte_identical(self, capsys):
        argv = ["simulate", "--spec", "zeta", "--sigma", "2", "--t", "1", "--paths", "40000", "--seed", "3"]
        assert main(argv) == EXIT_OK
        first = capsys.readouterr().out
        assert main(argv + ["--workers", "2"]) == EXIT_OK
        assert capsys.readouterr().out == first

    def test_simulate_csv(self, capsys):
        argv = ["simulate", "--spec", "zeta", "--sigma", "2", "--x", "1", "--c", "0.5", "--paths", "20000"]
        assert main(argv + ["--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert "theoretical" in lines[0].split(",")
        assert len(lines) == 11

    def test_output_file(self, tmp_path):
        path = tmp_path / "semigroup.json"
        assert main(["verify-semigroup", "--max-n", "6", "--output", str(path)]) == EXIT_OK
        assert len(path.read_text().splitlines()) == 5


class TestExitCodes:
    def test_missing_parameter(self):
        assert main(["eval-f", "--spec", "zeta", "--sigma", "2", "--s", "3"]) == EXIT_USAGE

    def test_unknown_command(self):
        assert main(["integrate"]) == EXIT_USAGE

    def test_help(self):
        assert main(["--help"]) == EXIT_OK

    def test_outside_domain(self):
        assert main(["eval-f", "--spec", "zeta", "--sigma", "2", "--s", "2.1", "--w", "0.5"]) == EXIT_USAGE

    def test_divergent_sigma(self):
        assert main(["eval-L", "--spec", "zeta", "--sigma", "0.5", "--s", "2"]) == EXIT_USAGE

    def test_unreadable_spec(self, tmp_path):
        missing = str(tmp_path / "none.json")
        assert main(["eval-L", "--spec", missing, "--sigma", "2", "--s", "3"]) == EXIT_USAGE

    def test_signed_spec_cannot_simulate(self):
        assert main(["simulate", "--spec", "chi4", "--sigma", "2", "--t", "1", "--paths", "10"]) == EXIT_USAGE

    def test_truncation_cap_is_a_failure(self, monkeypatch):
        monkeypatch.setattr(lfunction, "settings", Settings(max_terms=4096))
        config = RunConfig(command="eval-f", spec_path="zeta", sigma=1.4, s=[2.0], w=[0.0], tol=1e-14, mode="raw")
        assert run(config) == EXIT_FAILED

    def test_best_effort_partial_fails_tolerance(self, monkeypatch, capsys):
        monkeypatch.setattr(lfunction, "settings", Settings(max_terms=4096))
        config = RunConfig(
            command="demo-explicit-series", v=[1.0], z=[2.1], tol=1e-12, best_effort=True, mode="raw"
        )
        assert run(config) == EXIT_FAILED
        (record,) = _lines(capsys)
        assert record["guaranteed"] is False

    def test_unknown_mode(self):
        assert main(["eval-L", "--spec", "zeta", "--sigma", "2", "--s", "3", "--mode", "fast"]) == EXIT_USAGE


class TestReference:
    """--reference compares a run against a saved report"""

    ARGV = ["simulate", "--spec", "zeta", "--sigma", "2", "--t", "1", "--paths", "20000", "--seed", "9"]

    @pytest.mark.parametrize("suffix, fmt", [(".json", "json"), (".jsonl", "json"), (".csv", "csv")])
    def test_rerun_matches_saved_report(self, tmp_path, suffix, fmt):
        path = str(tmp_path / f"report{suffix}")
        assert main(self.ARGV + ["--format", fmt, "--output", path]) == EXIT_OK
        rerun = self.ARGV + ["--format", fmt, "--workers", "3", "--output", str(tmp_path / "rerun.out")]
        assert main(rerun + ["--reference", path]) == EXIT_OK

    def test_different_seed_fails(self, tmp_path):
        path = str(tmp_path / "report.json")
        assert main(self.ARGV + ["--output", path]) == EXIT_OK
        other = self.ARGV[:-1] + ["10", "--output", str(tmp_path / "other.json")]
        assert main(other + ["--reference", path]) == EXIT_FAILED

    def test_missing_reference(self, tmp_path):
        missing = str(tmp_path / "none.json")
        assert main(self.ARGV + ["--output", str(tmp_path / "x.json"), "--reference", missing]) == EXIT_USAGE
