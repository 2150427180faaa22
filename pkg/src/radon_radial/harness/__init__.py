"""Verification scenarios, reports and the ``radon`` command line."""

from .report import RatioReport, emit_report, load_report
from .scenarios import SCENARIOS, ConstantEstimate, ScenarioConfig, estimate_constant, run_scenario

__all__ = [
    "RatioReport",
    "emit_report",
    "load_report",
    "SCENARIOS",
    "ConstantEstimate",
    "ScenarioConfig",
    "estimate_constant",
    "run_scenario",
]
