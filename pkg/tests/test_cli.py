"""
Tests for the tetra-verify command line: exit codes, text/JSON/CSV output
and data validation.
"""

import json

import pytest

from app.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from app.tetra_common import (
    DEFAULT_GROEBNER_MAX_PAIRS,
    DEFAULT_GROEBNER_MAX_SECONDS,
    DEFAULT_TRUNCATION_DEGREE,
    SectionReport,
    get_default_engine_config,
)


class TestUsage:
    def test_missing_command(self):
        assert main([]) == EXIT_USAGE

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK
        assert "tetra-verify" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "argv",
        [
            ["oracle", "--primes", "4"],
            ["oracle", "--primes", "2,x"],
            ["oracle", "--primes", "65537"],
            ["oracle", "--types", "X0,Q"],
            ["ring", "--field", "z"],
            ["ring", "--check", "hilbert,magic"],
            ["strata", "--emit", "yaml"],
            ["oracle", "--emit", "csv"],
            ["ring", "--truncation-degree", "0"],
            ["ring", "--max-pairs", "many"],
        ],
    )
    def test_bad_arguments(self, argv):
        assert main(argv) == EXIT_USAGE

    def test_unknown_report_section(self, capsys):
        assert main(["report", "--sections", "counts,bogus"]) == EXIT_USAGE
        assert "bogus" in capsys.readouterr().err


class TestCounts:
    def test_text(self, capsys):
        assert main(["counts"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "b: 1 0 26 0 188 0 652" in out
        assert "euler characteristic: 11160" in out
        assert "[counts]" in out

    def test_json(self, capsys):
        assert main(["counts", "--emit", "json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["section"] == "counts"
        assert payload["passed"] is True
        assert payload["data"]["euler_characteristic"] == 11160

    def test_csv_to_file(self, tmp_path):
        target = tmp_path / "counts.csv"
        assert main(["counts", "--emit", "csv", "--output", str(target)]) == EXIT_OK
        lines = target.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 161

    def test_failing_table_exits_1(self, table_lines, write_table, capsys):
        lines = list(table_lines)
        lines[5] = "X0           000  1   0,0,0,0,0,0,2      -\n"
        assert main(["counts", "--table", write_table(lines)]) == EXIT_FAILED
        assert "FAILED counts:fiber_sum" in capsys.readouterr().err

    def test_malformed_table_exits_2(self, table_lines, write_table, capsys):
        lines = list(table_lines)
        lines[5] = "X0 000 1\n"
        assert main(["counts", "--table", write_table(lines)]) == EXIT_USAGE
        assert "count_table.txt:6:" in capsys.readouterr().err

    def test_missing_table_exits_2(self, tmp_path):
        assert main(["counts", "--table", str(tmp_path / "absent.txt")]) == EXIT_USAGE


class TestOracle:
    def test_text(self, capsys):
        assert main(["oracle", "--primes", "2,3", "--types", "X0,A"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "X0 q=2: oracle=64 table=64 ok" in out
        assert "A q=3: oracle=108 table=108 ok" in out


class TestValidate:
    def test_embedded_data(self, capsys):
        assert main(["validate"]) == EXIT_OK
        assert "data files valid" in capsys.readouterr().out

    def test_bad_table(self, table_lines, write_table, capsys):
        lines = list(table_lines)
        lines[5] = "X0           000  1   0,0,0,0,0,1        -\n"
        assert main(["validate", "--table", write_table(lines)]) == EXIT_USAGE
        err = capsys.readouterr().err
        assert "count_table.txt:6:" in err


class TestBudgets:
    def test_environment_does_not_change_budgets(self, monkeypatch):
        monkeypatch.setenv("TETRA_TRUNCATION_DEGREE", "5")
        monkeypatch.setenv("TETRA_GROEBNER_MAX_PAIRS", "1")
        monkeypatch.setenv("TETRA_GROEBNER_MAX_SECONDS", "1")
        config = get_default_engine_config()
        assert config["truncation_degree"] == DEFAULT_TRUNCATION_DEGREE == 13
        assert config["groebner_max_pairs"] == DEFAULT_GROEBNER_MAX_PAIRS
        assert config["groebner_max_seconds"] == DEFAULT_GROEBNER_MAX_SECONDS

    def test_workers_still_come_from_environment(self, monkeypatch):
        monkeypatch.setenv("TETRA_WORKERS", "3")
        assert get_default_engine_config()["workers"] == 3

    def test_flags_reach_the_ring_section(self, monkeypatch):
        captured = {}

        async def fake_run_section(command, **kwargs):
            captured.update(kwargs["config"])
            return SectionReport(section=command, passed=True)

        monkeypatch.setenv("TETRA_TRUNCATION_DEGREE", "5")
        monkeypatch.setattr("app.cli.run_section", fake_run_section)
        argv = ["ring", "--check", "hilbert", "--truncation-degree", "9", "--max-pairs", "100"]
        assert main(argv) == EXIT_OK
        assert captured["truncation_degree"] == 9
        assert captured["groebner_max_pairs"] == 100
        assert captured["groebner_max_seconds"] == DEFAULT_GROEBNER_MAX_SECONDS


class TestReport:
    def test_json_with_timings(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        argv = [
            "report", "--sections", "counts,oracle", "--primes", "2", "--types", "X0",
            "--emit", "json", "--timings", "--output", str(target),
        ]
        assert main(argv) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert [s["section"] for s in payload["sections"]] == ["counts", "oracle"]
        assert set(payload["timings"]) == {"counts", "oracle"}
        assert payload["schema_version"] == "1.0"
        assert json.loads(target.read_text(encoding="utf-8")) == payload

    def test_bare_output_name_goes_to_reports_dir(self, tmp_path, monkeypatch):
        reports = tmp_path / "reports"
        monkeypatch.setenv("TETRA_REPORTS_DIR", str(reports))
        argv = ["counts", "--emit", "json", "--output", "counts.json"]
        assert main(argv) == EXIT_OK
        payload = json.loads((reports / "counts.json").read_text(encoding="utf-8"))
        assert payload["section"] == "counts"

    def test_timings_omitted_by_default(self, capsys):
        argv = ["report", "--sections", "counts", "--emit", "json"]
        assert main(argv) == EXIT_OK
        assert "timings" not in json.loads(capsys.readouterr().out)

    @pytest.mark.slow
    def test_strata_text(self, capsys):
        assert main(["strata"]) == EXIT_OK
        assert "1424 strata, 23 divisors, max codim 6" in capsys.readouterr().out


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
