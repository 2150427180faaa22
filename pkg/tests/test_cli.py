import csv
import json
import math

import pytest

from radon_radial.harness.cli import main


@pytest.fixture
def unit_ball(tmp_path):
    path = tmp_path / "ball.json"
    path.write_text(json.dumps({"type": "step", "intervals": [[0.0, 1.0]], "heights": [1.0]}))
    return path


@pytest.fixture
def band(tmp_path):
    path = tmp_path / "band.json"
    path.write_text(json.dumps({"type": "step", "intervals": [[1.0, 2.0]], "heights": [1.0]}))
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_transform_writes_csv(tmp_path, unit_ball):
    out = tmp_path / "curve.csv"
    code = main(["transform", "--geometry", "grassmann", "--n", "3", "--d", "2",
                 "--profile", str(unit_ball), "--grid", "11", "--out", str(out)])
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["s", "value", "err_est"] and len(rows) == 12
    assert float(rows[1][1]) == pytest.approx(math.pi, rel=1e-15)


def test_transform_numeric_matches_closed(tmp_path, band):
    paths = {}
    for method in ("closed", "numeric"):
        paths[method] = tmp_path / f"{method}.csv"
        assert main(["transform", "--geometry", "hyperbolic", "--n", "3", "--d", "2",
                     "--profile", str(band), "--grid", "9", "--method", method,
                     "--out", str(paths[method])]) == 0
    closed = [float(r[1]) for r in _rows(paths["closed"])[1:]]
    numeric = [float(r[1]) for r in _rows(paths["numeric"])[1:]]
    assert numeric == pytest.approx(closed, rel=1e-9, abs=1e-12)


def test_norm_prints_value(capsys, unit_ball):
    code = main(["norm", "--geometry", "grassmann", "--n", "3", "--d", "2",
                 "--profile", str(unit_ball), "--p", "1", "--q", "1"])
    assert code == 0
    assert float(capsys.readouterr().out) == pytest.approx(4 * math.pi / 3, rel=1e-14)


def test_norm_weak_index(capsys, unit_ball):
    code = main(["norm", "--geometry", "sphere", "--n", "2", "--d", "1",
                 "--profile", str(unit_ball), "--p", "2", "--q", "inf"])
    assert code == 0
    assert float(capsys.readouterr().out) == pytest.approx(1.0, rel=1e-14)


def test_verify_pass_and_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--scenario", "lemma21", "--seed", "3", "--out", str(out),
                 "--deterministic"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS lemma21") for line in lines)
    data = json.loads(out.read_text())
    assert data["seed"] == 3 and data["wall_time"] is None


def test_verify_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    # a zero tolerance on the fitted norm rate cannot hold for a finite m grid
    cfg.write_text(json.dumps({"scenario": "counterexample-cap",
                               "tolerances": {"rate": 0.0}}))
    assert main(["verify", "--config", str(cfg)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--config", str(bad)]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"scenario": "lemma21", "extra": 1}))
    assert main(["verify", "--config", str(unknown)]) == 2
    assert "extra" in capsys.readouterr().err


def test_invalid_geometry_exit_code(unit_ball, tmp_path):
    assert main(["transform", "--geometry", "grassmann", "--n", "2", "--d", "2",
                 "--profile", str(unit_ball), "--out", str(tmp_path / "c.csv")]) == 2


def test_unwritable_output(unit_ball, tmp_path, capsys):
    target = tmp_path / "missing" / "c.csv"
    assert main(["transform", "--geometry", "grassmann", "--n", "3", "--d", "2",
                 "--profile", str(unit_ball), "--out", str(target)]) == 2
    assert "missing" in capsys.readouterr().err


def test_missing_verify_target():
    with pytest.raises(SystemExit):
        main(["verify"])
