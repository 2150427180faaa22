"""Verification reports and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

__all__ = ["RatioReport", "emit_report", "load_report", "encode", "decode"]

_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def encode(obj):
    """Recursively replace non-finite floats by strings so the JSON is strict."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    return obj


def decode(obj):
    if isinstance(obj, str) and obj in _NONFINITE:
        return _NONFINITE[obj]
    if isinstance(obj, dict):
        return {k: decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


@dataclass
class RatioReport:
    """Outcome of one scenario run.

    ``parameters`` holds the full scenario configuration (minus execution
    details such as thread count and output paths), so a report can be re-run
    from its own header.  ``passes`` maps check names to booleans.
    """

    scenario: str
    seed: int
    parameters: dict
    samples: list = field(default_factory=list)
    sup_ratio: Optional[float] = None
    bucket_maxima: dict = field(default_factory=dict)
    slope: Optional[float] = None
    slope_stderr: Optional[float] = None
    passes: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    wall_time: Optional[float] = None

    @property
    def passed(self) -> bool:
        return bool(self.passes) and all(self.passes.values())

    def to_dict(self) -> dict:
        return encode(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RatioReport":
        return cls(**decode(data))

    def __eq__(self, other):
        if not isinstance(other, RatioReport):
            return NotImplemented
        return self.to_json() == other.to_json()


def emit_report(report: RatioReport, path, curve=None, curve_path=None) -> Path:
    """Write the report JSON (and optionally a curve CSV); bytes depend only on the report."""
    from ..curves import write_curve_csv

    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_json())
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    if curve is not None and curve_path is not None:
        write_curve_csv(curve, curve_path)
    return path


def load_report(path) -> RatioReport:
    with open(Path(path), encoding="utf-8") as fh:
        return RatioReport.from_dict(json.load(fh))
