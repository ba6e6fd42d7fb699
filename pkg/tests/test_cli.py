import json
import math

import pytest

from simulate import main


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def wide_config(tmp_path):
    """Grid [0, 20] with Δω = 0.25 and a σ = 1 packet at 10."""
    path = tmp_path / "wide.json"
    path.write_text(json.dumps({
        "grid": {"omega_min": 0, "omega_max": 20, "n_points": 81},
        "packet": {"shape": "gaussian", "center": 10, "width": 1},
    }))
    return str(path)


class TestTeleport:
    def test_ideal(self, capsys):
        code, out = _run(capsys, "teleport")
        record = json.loads(out)
        assert code == 0
        assert record["fidelity_after"] >= 1 - 1e-10
        assert record["outcome"]["t"] == 0.0
        assert record["outcome"]["omega_plus"] == pytest.approx(10.0, rel=1e-15)
        assert "seed" not in record

    def test_seeded_runs_are_identical(self, capsys):
        _, first = _run(capsys, "teleport", "--seed", "11")
        _, second = _run(capsys, "teleport", "--seed", "11")
        assert first == second
        assert json.loads(first)["seed"] == 11

    def test_distribution_csv(self, capsys):
        code, out = _run(capsys, "teleport", "--n-points", "6", "--format", "csv")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "t,omega_plus,weight,normalized_weight"
        assert len(lines) == 1 + 6 * 11
        assert math.isclose(sum(float(line.split(",")[3]) for line in lines[1:]), 1.0, rel_tol=1e-12)

    def test_malformed_config(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"grid": {"n_points": 1}}))
        code, out = _run(capsys, "teleport", "--config", str(path))
        error = json.loads(out)
        assert code == 2
        assert error["field"] == "grid.n_points"
        assert error["component"] == "cli"

    def test_unreadable_config(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, out = _run(capsys, "teleport", "--config", str(path))
        assert code == 2
        assert json.loads(out)["field"] == "config"

    def test_zero_weight_outcome(self, capsys, tmp_path):
        path = tmp_path / "zero.json"
        path.write_text(json.dumps({
            "grid": {"omega_min": 1, "omega_max": 3, "n_points": 3},
            "packet": {"shape": "monochromatic", "center": 2},
            "outcome": {"omega_plus": 6},
        }))
        code, out = _run(capsys, "teleport", "--config", str(path))
        error = json.loads(out)
        assert code == 2
        assert error["error"] == "ZeroWeightOutcome"
        assert error["component"] == "povm"

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "runs" / "teleport.json"
        code, out = _run(capsys, "teleport", "--out", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["fidelity_after"] >= 1 - 1e-10

    def test_config_is_a_directory(self, capsys, tmp_path):
        code, out = _run(capsys, "teleport", "--config", str(tmp_path))
        error = json.loads(out)
        assert code == 2
        assert error["error"] == "ConfigError"
        assert error["field"] == "config"

    def test_out_is_a_directory(self, capsys, tmp_path):
        code, out = _run(capsys, "teleport", "--n-points", "6", "--out", str(tmp_path))
        error = json.loads(out)
        assert code == 2
        assert error["field"] == "output.path"
        assert error["component"] == "cli"


class TestSweep:
    def test_csv(self, capsys, wide_config):
        code, out = _run(capsys, "sweep", "--config", wide_config,
                         "--detuning-min", "0", "--detuning-max", "2", "--detuning-steps", "5")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "detuning,weight,fidelity_before,fidelity_after"
        rows = [list(map(float, line.split(","))) for line in lines[1:]]
        assert [r[0] for r in rows] == [0.0, 0.5, 1.0, 1.5, 2.0]
        assert rows[0][3] == pytest.approx(1.0, abs=1e-10)
        assert rows[-1][2] == pytest.approx(math.exp(-1), rel=0.02)

    def test_json(self, capsys, wide_config):
        code, out = _run(capsys, "sweep", "--config", wide_config, "--format", "json")
        assert code == 0
        assert [row["detuning"] for row in json.loads(out)] == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_off_grid_range(self, capsys):
        code, out = _run(capsys, "sweep", "--detuning-max", "1", "--detuning-steps", "3")
        assert code == 2
        assert json.loads(out)["field"] == "sweep"


class TestScheme:
    def test_default(self, capsys):
        code, out = _run(capsys, "scheme")
        record = json.loads(out)
        assert code == 0
        assert record["fidelity"] >= 1 - 1e-10
        assert record["chi_exponent"] == pytest.approx(4.0, abs=1e-6)
        assert record["chi_values"] == [0.01, 0.02, 0.04]

    def test_single_chi_has_no_exponent(self, capsys):
        code, out = _run(capsys, "scheme", "--chi", "0.03")
        record = json.loads(out)
        assert code == 0
        assert "chi_exponent" not in record
        assert record["detection_weight"] == pytest.approx(0.03**4, rel=1e-12)

    def test_detuned_detector(self, capsys, tmp_path):
        config = {"grid": {"omega_min": 0, "omega_max": 10, "n_points": 11},
                  "packet": {"center": 5, "width": 0.4}}
        tuned, detuned = tmp_path / "tuned.json", tmp_path / "detuned.json"
        tuned.write_text(json.dumps(config))
        detuned.write_text(json.dumps({**config, "detector": 2}))
        _, out = _run(capsys, "scheme", "--config", str(tuned))
        reference = json.loads(out)["detection_weight"]
        _, out = _run(capsys, "scheme", "--config", str(detuned))
        assert json.loads(out)["detection_weight"] < 1e-10 * reference

    def test_detector_sweep_csv(self, capsys):
        code, out = _run(capsys, "scheme", "--n-points", "6", "--format", "csv")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "detector_frequency,detection_weight,fidelity"
        assert len(lines) == 1 + 11


class TestCheck:
    def test_small_grid_passes(self, capsys):
        code, out = _run(capsys, "check", "--n-points", "6")
        report = json.loads(out)
        assert code == 0
        assert report["passed"] is True
        assert len(report["checks"]) == 8

    def test_truncated_time_grid(self, capsys):
        code, out = _run(capsys, "check", "--n-points", "6", "--truncate-time-grid")
        report = json.loads(out)
        assert code == 1
        assert report["passed"] is False
        status = {c["name"]: c["status"] for c in report["checks"]}
        assert status["completeness"] == "fail"

    def test_oracle_skipped_on_16_nodes(self, capsys):
        code, out = _run(capsys, "check", "--n-points", "16")
        status = {c["name"]: c["status"] for c in json.loads(out)["checks"]}
        assert code == 0
        assert status["oracle_completeness"] == status["oracle_equivalence"] == "skipped"
