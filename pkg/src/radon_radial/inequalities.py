"""Direct checks of the two elementary inequalities behind the endpoint bounds.

* Alternating powers: for ``x_1 >= ... >= x_n >= 0`` and ``gamma >= 1``,
  ``(sum (-1)^{i-1} x_i)^gamma <= sum (-1)^{i-1} x_i^gamma``.
* Exponential weights: for an indicator ``f`` of a finite union of intervals,
  ``int f e^{delta t} dt <= C (int f e^{p delta t} dt)^{1/p}``.  With
  ``s = e^t`` this is the power-weight form ``int phi s^{delta-1} ds`` against
  ``(int phi s^{p delta-1} ds)^{1/p}``, and the alternating-power inequality
  applied to ``y = s^delta`` gives ``C = p^{1/p} |delta|^{1/p-1}``.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import ArgumentError, IntegrabilityError
from .profiles import StepProfile

__all__ = [
    "alternating_power_check",
    "exponential_weight_check",
    "WeightCheck",
    "candidate_constant",
    "SLACK",
]

SLACK = 1e-12


def alternating_power_check(x: Sequence[float], gamma: float):
    """Return ``(lhs, rhs, holds)`` for the alternating-power inequality.

    Sums use compensated summation; ``holds`` allows a slack of
    ``1e-12 * max(1, rhs)``.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ArgumentError("x must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ArgumentError("x must be finite and nonnegative")
    if np.any(np.diff(arr) > 0):
        raise ArgumentError("x must be nonincreasing")
    if not (math.isfinite(gamma) and gamma >= 1):
        raise ArgumentError("gamma must be a finite real >= 1")
    signs = np.where(np.arange(arr.size) % 2 == 0, 1.0, -1.0)
    base = math.fsum(signs * arr)
    lhs = max(base, 0.0) ** gamma
    rhs = math.fsum(signs * arr ** gamma)
    return lhs, rhs, bool(lhs <= rhs + SLACK * max(1.0, rhs))


class WeightCheck(NamedTuple):
    lhs: float
    rhs_scaled: float
    ratio: float

    @property
    def undefined(self) -> bool:
        """True when the profile is empty and the ratio carries no information."""
        return math.isnan(self.ratio)


def candidate_constant(delta: float, p: float) -> float:
    """``p^{1/p} |delta|^{1/p - 1}``."""
    return p ** (1.0 / p) * abs(delta) ** (1.0 / p - 1.0)


def _intervals(profile) -> np.ndarray:
    if profile is None:
        return np.zeros((0, 2))
    if isinstance(profile, StepProfile):
        if not profile.is_indicator:
            raise ArgumentError("the weight check is stated for indicator profiles")
        return np.array(profile.intervals, dtype=float)
    ivs = np.asarray(profile, dtype=float).reshape(-1, 2)
    if np.any(ivs[:, 1] <= ivs[:, 0]) or np.any(ivs[1:, 0] < ivs[:-1, 1]):
        raise ArgumentError("intervals must be nonempty, increasing and disjoint")
    return ivs


def _exp_integral(a, b, rate):
    """``int_a^b e^{rate t} dt`` per interval, via ``expm1``."""
    if rate > 0:
        return np.exp(rate * b) * -np.expm1(-rate * (b - a)) / rate
    return np.exp(rate * a) * -np.expm1(rate * (b - a)) / -rate


def _power_integral(a, b, expo):
    """``int_a^b s^{expo - 1} ds`` per interval."""
    if expo > 0:
        return (b ** expo - a ** expo) / expo
    if np.any(a <= 0):
        raise IntegrabilityError("s^{delta-1} is not integrable at 0 for delta <= 0")
    return (a ** expo - b ** expo) / -expo


def exponential_weight_check(profile: Union[StepProfile, Sequence, None], delta: float, p: float,
                             form: str = "exponential") -> WeightCheck:
    """Compare the weighted integral with the ``p``-th power weighted integral.

    Parameters
    ----------
    profile : StepProfile, sequence of (a, b) pairs, or None
        Indicator of a finite union of intervals; raw pairs may be negative in
        the exponential form.  ``None`` or no pairs is the empty profile.
    delta : float
        Nonzero exponent.
    p : float
        ``p > 1``.
    form : {"exponential", "power"}
        ``"exponential"`` integrates ``e^{delta t}`` and ``e^{p delta t}`` over
        the intervals in ``t``; ``"power"`` integrates ``s^{delta-1}`` and
        ``s^{p delta-1}`` over intervals in ``s > 0``.

    Returns
    -------
    WeightCheck
        ``(lhs, rhs_scaled, ratio)``; ``ratio`` is NaN for the empty profile.
    """
    if delta == 0 or not math.isfinite(delta):
        raise ArgumentError("delta must be a nonzero finite real")
    if not (p > 1 and math.isfinite(p)):
        raise ArgumentError("p must be a finite real > 1")
    if form not in ("exponential", "power"):
        raise ArgumentError(f"unknown form {form!r}")
    ivs = _intervals(profile)
    if ivs.shape[0] == 0:
        return WeightCheck(0.0, 0.0, math.nan)
    a, b = ivs[:, 0], ivs[:, 1]
    if form == "exponential":
        lhs = math.fsum(_exp_integral(a, b, delta))
        inner = math.fsum(_exp_integral(a, b, p * delta))
    else:
        if np.any(a < 0):
            raise ArgumentError("the power form needs intervals in s >= 0")
        lhs = math.fsum(_power_integral(a, b, delta))
        inner = math.fsum(_power_integral(a, b, p * delta))
    rhs = inner ** (1.0 / p)
    return WeightCheck(lhs, rhs, lhs / rhs if rhs > 0 else math.nan)
