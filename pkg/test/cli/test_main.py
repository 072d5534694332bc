import json
from pathlib import Path

import pytest

from soficlab import __version__
from soficlab.cli.config import SEED_ENV
from soficlab.cli.main import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main
from soficlab.export import read_trace_csv

EXAMPLES = sorted((Path(__file__).parents[2] / "docs" / "examples").glob("*.json"))

FIT = {
    "op": "fit",
    "model": {"kind": "cyclic", "n": 4},
    "oracle": {"kind": "bernoulli", "base": {"a": 0.5, "b": 0.5}},
    "microstate": "abab",
    "m": 2,
    "epsilon": 0.3,
}

TRACE = {
    "op": "trace",
    "sequence": [{"kind": "cyclic", "n": 16}, {"kind": "cyclic", "n": 32}, {"kind": "cyclic", "n": 64}],
    "oracle": {"kind": "bernoulli", "base": {"a": 0.5, "b": 0.5}},
    "m": 1,
    "epsilon": 0.2,
    "budget": 500,
    "seed": 2,
}


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def _write(tmp_path: Path, data: dict, name: str = "config.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def _without_wall_time(path: Path) -> dict:
    report = json.loads(path.read_text(encoding="utf-8"))
    report.pop("wall_time")
    return report


class TestValidate:
    def test_ok(self, tmp_path, capsys):
        assert main(["validate", str(_write(tmp_path, FIT))]) == EXIT_OK
        assert capsys.readouterr().out == "ok\n"

    def test_invalid(self, tmp_path, capsys):
        path = _write(tmp_path, dict(FIT, m=0))
        assert main(["validate", str(path)]) == EXIT_INVALID
        assert capsys.readouterr().out == ""

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "absent.json")]) == EXIT_INVALID

    def test_warnings_do_not_fail(self, tmp_path, capsys):
        path = _write(tmp_path, dict(FIT, epsilon=0.1))
        assert main(["validate", str(path)]) == EXIT_OK
        assert "raise m to at least 10" in capsys.readouterr().err


class TestRun:
    def test_report_to_stdout(self, tmp_path, capsys):
        assert main(["run", str(_write(tmp_path, FIT))]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["op"] == "fit"
        assert report["version"] == __version__
        assert report["config"] == FIT
        # abab pairs every vertex with its opposite symbol
        assert report["result"]["fit"]["value"] == pytest.approx(0.25)
        assert report["result"]["pass"] is True

    def test_report_to_file(self, tmp_path, capsys):
        out = tmp_path / "reports" / "fit.json"
        assert main(["run", str(_write(tmp_path, FIT)), "--out", str(out)]) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text(encoding="utf-8"))["op"] == "fit"

    def test_seed_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "11")
        out = tmp_path / "trace.json"
        config = {k: v for k, v in TRACE.items() if k != "seed"}
        assert main(["run", str(_write(tmp_path, config)), "--out", str(out)]) == EXIT_OK
        assert _without_wall_time(out)["config"]["seed"] == 11

    def test_trace_csv(self, tmp_path):
        out, csv = tmp_path / "trace.json", tmp_path / "trace.csv"
        code = main(["run", str(_write(tmp_path, TRACE)), "--out", str(out), "--csv", str(csv)])
        assert code == EXIT_OK
        frame = read_trace_csv(csv)
        assert frame["n"].to_list() == [16, 32, 64]
        rows = _without_wall_time(out)["result"]["rows"]
        assert frame["pass"].to_list() == [row["pass"] for row in rows]

    def test_distance_without_alphabets(self, tmp_path, capsys):
        config = {
            "op": "distance",
            "distributions": [
                {"m": 2, "mass": {"ab": 0.5, "ba": 0.5}},
                {"m": 2, "mass": {"aa": 0.25, "ab": 0.25, "ba": 0.25, "bb": 0.25}},
            ],
        }
        assert main(["run", str(_write(tmp_path, config))]) == EXIT_OK
        result = json.loads(capsys.readouterr().out)["result"]
        # first symbols agree in law; a quarter of the mass moves at cost 1/2
        assert result["value"] == pytest.approx(0.25)
        assert result["upper"] == pytest.approx(0.25 + 1 / 3)

    def test_csv_needs_the_trace_op(self, tmp_path):
        code = main(["run", str(_write(tmp_path, FIT)), "--csv", str(tmp_path / "fit.csv")])
        assert code == EXIT_INVALID
        assert not (tmp_path / "fit.csv").exists()

    def test_jobs_must_be_positive(self, tmp_path):
        assert main(["run", str(_write(tmp_path, FIT)), "-j", "0"]) == EXIT_INVALID

    def test_missing_seed(self, tmp_path):
        config = {k: v for k, v in TRACE.items() if k != "seed"}
        assert main(["run", str(_write(tmp_path, config))]) == EXIT_INVALID

    def test_failed_run(self, tmp_path):
        config = {
            "op": "product_check",
            "microstates": [
                {"model": {"kind": "cyclic", "n": 2}, "alphabet": "ab", "labels": "ab"},
                {"model": {"kind": "free_random", "rank": 2, "n": 3, "seed": 0}, "alphabet": "ab", "labels": "aab"},
            ],
            "m": 1,
        }
        out = tmp_path / "report.json"
        assert main(["run", str(_write(tmp_path, config)), "--out", str(out)]) == EXIT_FAILED
        assert not out.exists()

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["--version"])
        assert e.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestExamples:
    def test_examples_exist(self):
        assert len(EXAMPLES) >= 12

    @pytest.mark.parametrize("config", EXAMPLES, ids=lambda p: p.stem)
    def test_example_is_reproducible(self, tmp_path, config):
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        assert main(["run", str(config), "--out", str(first)]) == EXIT_OK
        assert main(["run", str(config), "--out", str(second), "-j", "2"]) == EXIT_OK
        assert _without_wall_time(first) == _without_wall_time(second)
        assert first.read_bytes().endswith(b"\n")

    def test_cyclic_entropy_count(self, tmp_path):
        out = tmp_path / "entropy.json"
        config = next(p for p in EXAMPLES if p.stem == "entropy")
        assert main(["run", str(config), "--out", str(out)]) == EXIT_OK
        assert _without_wall_time(out)["result"]["count"] == 35750
