import json
import math

import numpy as np
import pytest

from radon_radial.errors import ArgumentError, ConfigError
from radon_radial.harness.report import RatioReport, emit_report, load_report
from radon_radial.harness.scenarios import (SCENARIOS, ScenarioConfig, estimate_constant,
                                            run_scenario)


def test_constant_family_has_zero_slope():
    est = estimate_constant([1, 2, 4, 8] * 3, [0.7] * 12)
    assert est.slope == 0.0 and est.sup_ratio == 0.7
    assert est.bucket_maxima == {"1": 0.7, "2": 0.7, "4": 0.7, "8": 0.7}


def test_power_law_family_slope():
    buckets = np.array([1, 2, 4, 8, 16])
    est = estimate_constant(buckets, 3.0 * buckets ** -0.5)
    assert est.slope == pytest.approx(-0.5, abs=1e-12)


def test_degenerate_families():
    with pytest.raises(ArgumentError):
        estimate_constant([4, 4, 4], [1.0, 2.0, 3.0])
    with pytest.raises(ArgumentError):
        estimate_constant([1, 2], [1.0, 0.0])
    with pytest.raises(ArgumentError):
        estimate_constant([], [])


def test_config_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(scenario="nope")
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"scenario": "lemma21", "colour": "red"})
    with pytest.raises(ConfigError):
        ScenarioConfig(scenario="lemma21", tolerances={"unknown": 1.0})
    with pytest.raises(ConfigError):
        ScenarioConfig(scenario="endpoint-grassmann", geometry={"n": 3.5})
    with pytest.raises(ConfigError):
        ScenarioConfig(scenario="lemma21", threads=0)


def test_invalid_geometry_is_a_config_error():
    with pytest.raises(ConfigError):
        run_scenario(ScenarioConfig(scenario="endpoint-grassmann",
                                    geometry={"n": 3, "d": 3, "k": 0}, family_size=7))


def test_header_excludes_execution_details():
    cfg = ScenarioConfig(scenario="lemma21", threads=4, report_out="x.json")
    header = cfg.header()
    assert "threads" not in header and "report_out" not in header
    assert header["scenario"] == "lemma21"


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_every_scenario_runs_small(scenario):
    size = 200 if scenario == "lemma21" else 14
    report, _ = run_scenario(ScenarioConfig(scenario=scenario, family_size=size), True)
    assert report.passes and report.passed
    assert report.wall_time is None


def test_single_annulus_grassmann_reference():
    report, _ = run_scenario(ScenarioConfig(scenario="endpoint-grassmann", family_size=14), True)
    assert report.sup_ratio == pytest.approx(math.pi / (4 * math.pi / 3) ** (2 / 3), rel=1e-10)


def test_lemma21_has_no_violations():
    report, _ = run_scenario(ScenarioConfig(scenario="lemma21", family_size=10_000), True)
    assert report.passed and not report.failures


def test_cap_slopes():
    report, _ = run_scenario(ScenarioConfig(scenario="counterexample-cap"), True)
    assert report.passed
    text = json.dumps(report.to_dict())
    assert "slope" in text


def test_report_round_trip(tmp_path):
    report, curve = run_scenario(ScenarioConfig(scenario="endpoint-sphere", family_size=14), True)
    report.extras["limit"] = math.inf
    path = emit_report(report, tmp_path / "r.json", curve, tmp_path / "c.csv")
    back = load_report(path)
    assert back == report and back.extras["limit"] == math.inf
    assert (tmp_path / "c.csv").read_text().startswith("s,value,err_est\n")
    json.loads(path.read_text())


def test_unwritable_report_names_path(tmp_path):
    report = RatioReport("lemma21", 0, {})
    target = tmp_path / "absent" / "r.json"
    with pytest.raises(OSError, match="absent"):
        emit_report(report, target)


def test_seed_changes_family_but_not_threads():
    base = ScenarioConfig(scenario="endpoint-hyperbolic", family_size=21, seed=1)
    a, _ = run_scenario(base, True)
    b, _ = run_scenario(ScenarioConfig(scenario="endpoint-hyperbolic", family_size=21, seed=1,
                                       threads=3), True)
    c, _ = run_scenario(ScenarioConfig(scenario="endpoint-hyperbolic", family_size=21, seed=2),
                        True)
    assert a.to_json() == b.to_json()
    assert a.to_json() != c.to_json()
