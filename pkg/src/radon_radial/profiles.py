"""Radial profiles, radial measures and seeded random multi-annulus families.

A radial function is represented by its profile in one radial coordinate.
:class:`StepProfile` (a finite weighted union of annuli ``[a_i, b_i)``) is the
input every endpoint argument reduces to; :class:`RadialProfile` wraps an
arbitrary nonnegative evaluator for the quadrature paths.  Measures of radial
sets are one-dimensional integrals against a :class:`RadialMeasure` density
``c t^alpha sinh^beta(t) cosh^gamma(t) sin^delta(t) cos^epsilon(t)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import special

from .errors import ArgumentError, DomainError, IntegrabilityError
from .quadrature import SingularIntegrand, adaptive_integrate, integrate_singular

__all__ = [
    "StepProfile",
    "RadialProfile",
    "RadialMeasure",
    "weighted_measure",
    "random_step_profile",
    "profile_evaluate",
    "philox_generator",
    "quantize",
    "profile_from_dict",
    "profile_to_dict",
    "load_profile",
    "MEASURE_REL_TOL",
]

# Measures feed the closed-form Lorentz norms; keep them close to roundoff.
MEASURE_REL_TOL = 1e-13

_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class StepProfile:
    """Finite union of weighted annuli ``sum_i h_i * 1[a_i <= t < b_i]``.

    Intervals are half-open, strictly increasing and pairwise disjoint
    (``b_i <= a_{i+1}``); every height is positive.
    """

    intervals: tuple
    heights: tuple = None

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise ArgumentError("a step profile needs at least one interval")
        heights = (1.0,) * len(ivs) if self.heights is None else tuple(float(h) for h in self.heights)
        if len(heights) != len(ivs):
            raise ArgumentError("heights and intervals differ in length")
        prev = -math.inf
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ArgumentError(f"interval [{a}, {b}) is not finite")
            if a < 0:
                raise ArgumentError(f"interval [{a}, {b}) starts below 0")
            if not a < b:
                raise ArgumentError(f"empty or reversed interval [{a}, {b})")
            if a < prev:
                raise ArgumentError("intervals must be increasing and disjoint")
            prev = b
        if any(not (h > 0 and math.isfinite(h)) for h in heights):
            raise ArgumentError("heights must be positive and finite")
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "heights", heights)

    @classmethod
    def indicator(cls, a, b):
        return cls(((a, b),))

    @property
    def lower(self):
        return np.array([a for a, _ in self.intervals])

    @property
    def upper(self):
        return np.array([b for _, b in self.intervals])

    @property
    def height_array(self):
        return np.array(self.heights)

    @property
    def count(self):
        return len(self.intervals)

    @property
    def is_indicator(self):
        return all(h == 1.0 for h in self.heights)

    @property
    def support_upper(self):
        return self.intervals[-1][1]

    @property
    def breakpoints(self):
        return np.unique(np.concatenate([self.lower, self.upper]))

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi, h = self.lower, self.upper, self.height_array
        idx = np.searchsorted(lo, t, side="right") - 1
        safe = np.clip(idx, 0, len(lo) - 1)
        inside = (idx >= 0) & (t < hi[safe])
        out = np.where(inside, h[safe], 0.0)
        return out if out.ndim else float(out)

    __call__ = evaluate

    def restrict_above(self, s):
        """Profile of ``{t in support : t > s}``, or ``None`` when that set is empty."""
        ivs, hs = [], []
        for (a, b), h in zip(self.intervals, self.heights):
            if b > s:
                ivs.append((max(a, s), b))
                hs.append(h)
        return StepProfile(tuple(ivs), tuple(hs)) if ivs else None

    def dilate(self, lam):
        """Profile of ``t -> f(lam * t)``."""
        if not lam > 0:
            raise ArgumentError("dilation factor must be positive")
        return StepProfile(tuple((a / lam, b / lam) for a, b in self.intervals), self.heights)

    def scale(self, factor):
        return StepProfile(self.intervals, tuple(factor * h for h in self.heights))

    def map_variable(self, fn):
        """Re-express the profile in a new coordinate ``fn`` (monotone, either direction)."""
        pieces = []
        for (a, b), h in zip(self.intervals, self.heights):
            x, y = float(fn(a)), float(fn(b))
            pieces.append(((min(x, y), max(x, y)), h))
        pieces.sort(key=lambda p: p[0][0])
        return StepProfile(tuple(p[0] for p in pieces), tuple(p[1] for p in pieces))


@dataclass(frozen=True)
class RadialProfile:
    """Evaluable nonnegative radial profile.

    ``evaluator`` maps arrays of radial coordinates to values; it must vanish
    beyond ``support_upper`` when that is finite.  ``decay_hint`` is an
    exponential rate ``lam`` with ``f(t) = O(exp(-lam t))``, used to truncate
    semi-infinite integrals.
    """

    evaluator: Callable
    support_upper: float = math.inf
    decay_hint: Optional[float] = None
    breakpoints: tuple = ()

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.evaluator(t), dtype=float)
        if out.shape != t.shape:
            out = np.vectorize(lambda x: float(self.evaluator(x)))(t)
        if math.isfinite(self.support_upper):
            out = np.where(t > self.support_upper, 0.0, out)
        return out if out.ndim else float(out)

    __call__ = evaluate

    @classmethod
    def from_table(cls, ts, values, support_upper=None):
        """Piecewise-linear interpolant of tabulated values (stays nonnegative)."""
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.shape != values.shape or ts.size < 2:
            raise ArgumentError("table needs matching 1-D ts and values with >= 2 points")
        if np.any(np.diff(ts) <= 0):
            raise ArgumentError("table abscissae must be strictly increasing")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ArgumentError("tabulated profile values must be finite and nonnegative")
        upper = float(ts[-1]) if support_upper is None else float(support_upper)

        def interp(t, ts=ts, values=values):
            return np.interp(t, ts, values)

        return cls(interp, upper, None, tuple(ts.tolist()))


def profile_evaluate(profile, t):
    """Value of a step or radial profile at ``t >= 0`` (half-open annuli)."""
    if np.any(np.asarray(t) < 0):
        raise ArgumentError("radial coordinate must be nonnegative")
    return profile.evaluate(t)


@dataclass(frozen=True)
class RadialMeasure:
    """Radial density ``c t^alpha sinh^beta cosh^gamma sin^delta cos^epsilon`` on a domain."""

    c: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    epsilon: float = 0.0
    domain: tuple = (0.0, math.inf)

    def __post_init__(self):
        lo, hi = (float(x) for x in self.domain)
        object.__setattr__(self, "domain", (lo, hi))
        if not self.c > 0:
            raise ArgumentError("measure constant must be positive")
        if not (0.0 <= lo < hi):
            raise ArgumentError(f"invalid measure domain {self.domain}")
        if (self.delta or self.epsilon) and hi > _HALF_PI * (1 + 1e-15):
            raise ArgumentError("trigonometric densities are defined on subsets of [0, pi/2]")

    @classmethod
    def lebesgue(cls):
        return cls()

    @classmethod
    def power(cls, alpha, c=1.0):
        return cls(c=c, alpha=alpha)

    @property
    def is_pure_power(self):
        return self.beta == 0 and self.gamma == 0 and self.delta == 0 and self.epsilon == 0

    @property
    def is_pure_trig(self):
        return self.alpha == 0 and self.beta == 0 and self.gamma == 0

    def density(self, t):
        t = np.asarray(t, dtype=float)
        out = self.c * np.ones_like(t)
        for exponent, fn in ((self.alpha, None), (self.beta, np.sinh), (self.gamma, np.cosh),
                             (self.delta, np.sin), (self.epsilon, np.cos)):
            if exponent:
                out = out * np.power(t if fn is None else fn(t), exponent)
        return out

    def _check_intervals(self, a, b):
        lo, hi = self.domain
        tol = 1e-15 * max(1.0, abs(hi) if math.isfinite(hi) else 1.0)
        bad = (a < lo - tol) | (b > hi + tol) | ~(a <= b)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DomainError(f"interval [{a[i]}, {b[i]}] is not contained in measure domain "
                              f"{self.domain}")

    def _left_exponent(self):
        return self.alpha + self.beta + self.delta

    def integrate(self, a, b):
        """``integral_a^b w(t) dt`` for one interval."""
        return float(self.integrate_many(np.array([a]), np.array([b]))[0])

    def integrate_many(self, a, b, rel_tol=MEASURE_REL_TOL):
        """Vectorised interval measures; closed forms for pure power and pure trig densities."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        self._check_intervals(a, b)
        at_zero = a <= 0.0
        if np.any(at_zero & (b > a)) and self._left_exponent() <= -1:
            raise IntegrabilityError("density is not integrable at t = 0")
        at_right = np.abs(b - _HALF_PI) <= 1e-15
        if self.epsilon and np.any(at_right & (b > a)) and self.epsilon <= -1:
            raise IntegrabilityError("density is not integrable at t = pi/2")
        if np.any(np.isinf(b)):
            if not (self.is_pure_power and self.alpha < -1):
                raise IntegrabilityError("density is not integrable at infinity")
        if self.is_pure_power:
            return self._power_closed(a, b)
        if self.is_pure_trig:
            return self._trig_closed(a, b)
        return self._quadrature(a, b, rel_tol)

    def _power_closed(self, a, b):
        k = self.alpha + 1.0
        out = np.zeros(a.shape)
        pos = b > a
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == 0.0:
                out[pos] = np.log(b[pos] / a[pos])
            else:
                aa, bb = a[pos], b[pos]
                ratio = np.where(bb > 0, aa / np.where(bb > 0, bb, 1.0), 0.0)
                # b^k - a^k = b^k (1 - (a/b)^k) without cancellation for a ~ b
                diff = np.where(ratio > 0,
                                -np.expm1(k * np.log(np.where(ratio > 0, ratio, 1.0))) * bb ** k,
                                bb ** k)
                if k < 0:
                    diff = np.where(np.isinf(bb), -(aa ** k), diff)
                out[pos] = diff / k
        return self.c * out

    def _trig_closed(self, a, b):
        pa, pb = 0.5 * (self.delta + 1.0), 0.5 * (self.epsilon + 1.0)
        scale = 0.5 * special.beta(pa, pb)
        sa, sb = np.sin(a) ** 2, np.sin(b) ** 2
        ca, cb = np.cos(a) ** 2, np.cos(b) ** 2
        # integral_a^b sin^d cos^e = B/2 [I_{sin^2 b} - I_{sin^2 a}]; use the
        # complementary form near pi/2 so differences of values near 1 are avoided.
        upper_half = sa >= 0.5
        low = special.betainc(pa, pb, sb) - special.betainc(pa, pb, sa)
        high = special.betainc(pb, pa, ca) - special.betainc(pb, pa, cb)
        out = np.where(upper_half, high, low)
        return self.c * scale * np.where(b > a, out, 0.0)

    def _smooth_part(self, left_factored):
        def core(t):
            t = np.asarray(t, dtype=float)
            out = self.c * np.ones_like(t)
            if left_factored:
                if self.beta:
                    out = out * np.power(_sinhc(t), self.beta)
                if self.delta:
                    out = out * np.power(_sinc(t), self.delta)
            else:
                if self.alpha:
                    out = out * np.power(t, self.alpha)
                if self.beta:
                    out = out * np.power(np.sinh(t), self.beta)
                if self.delta:
                    out = out * np.power(np.sin(t), self.delta)
            if self.gamma:
                out = out * np.power(np.cosh(t), self.gamma)
            if self.epsilon:
                out = out * np.power(np.cos(t), self.epsilon)
            return out
        return core

    def _quadrature(self, a, b, rel_tol):
        out = np.zeros(a.shape)
        e0 = self._left_exponent()
        left_needed = e0 != 0 and not (e0 > 0 and float(e0).is_integer())
        right_needed = self.epsilon != 0 and (self.epsilon < 0 or not float(self.epsilon).is_integer())
        special_left = (a <= 0.0) & (b > a) & left_needed
        special_right = (np.abs(b - _HALF_PI) <= 1e-15) & (b > a) & right_needed
        regular = (b > a) & ~special_left & ~special_right
        if np.any(regular):
            vals, _ = adaptive_integrate(self.density, a[regular], b[regular],
                                         owner=np.arange(int(regular.sum())), rel_tol=rel_tol,
                                         abs_tol=0.0)
            out[regular] = vals
        for i in np.flatnonzero(special_left | special_right):
            left = bool(special_left[i])
            right = bool(special_right[i])
            if left:
                smooth = self._smooth_part(True)
                if right:
                    def core(t, smooth=smooth):
                        return smooth(t) / np.power(np.cos(t), self.epsilon) * np.power(
                            _sinc(_HALF_PI - t), self.epsilon)
                else:
                    core = smooth
            else:
                full = self._smooth_part(False)

                def core(t, full=full):
                    return full(t) / np.power(np.cos(t), self.epsilon) * np.power(
                        _sinc(_HALF_PI - t), self.epsilon)
            integrand = SingularIntegrand(core, e0 if left else 0.0,
                                          self.epsilon if right else 0.0, factored=True)
            out[i], _ = integrate_singular(integrand, a[i], b[i], rel_tol=max(rel_tol, 2e-14),
                                           abs_tol=0.0)
        return out


def _sinhc(t):
    small = np.abs(t) < 1e-4
    safe = np.where(small, 1.0, t)
    return np.where(small, 1.0 + t * t / 6.0, np.sinh(safe) / safe)


def _sinc(t):
    return np.sinc(np.asarray(t) / math.pi)


def weighted_measure(profile: StepProfile, measure: RadialMeasure) -> float:
    """``sum_i h_i * integral_{a_i}^{b_i} w(t) dt``."""
    pieces = measure.integrate_many(profile.lower, profile.upper)
    return math.fsum(profile.height_array * pieces)


def philox_generator(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based stream keyed by ``(seed, index)``; independent of scheduling."""
    mask = (1 << 64) - 1
    key = np.array([int(seed) & mask, int(index) & mask], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def random_step_profile(seed: int, count: int, range: Sequence[float] = (0.0, 10.0),
                        index: int = 0) -> StepProfile:
    """Indicator of ``count`` disjoint intervals inside ``(low, high)``.

    The endpoints are ``2 * count`` sorted uniform points, paired in order;
    draws with ties are discarded and redrawn from the same stream.
    """
    count = int(count)
    if count < 1:
        raise ArgumentError("count must be a positive integer")
    low, high = (float(x) for x in range)
    if not low < high:
        raise ArgumentError("range must satisfy low < high")
    gen = philox_generator(seed, index)
    while True:
        pts = np.sort(low + (high - low) * gen.random(2 * count))
        if pts[0] > low and pts[-1] < high and np.all(np.diff(pts) > 0):
            break
    pairs = pts.reshape(count, 2)
    return StepProfile(tuple(map(tuple, pairs.tolist())))


def quantize(profile: RadialProfile, points: int = 1 << 14, lower: float = 0.0,
             upper: Optional[float] = None) -> StepProfile:
    """Cell-midpoint step approximation of a radial profile on ``points`` cells."""
    if upper is None:
        if math.isfinite(profile.support_upper):
            upper = profile.support_upper
        elif profile.decay_hint:
            upper = lower + 40.0 / profile.decay_hint
        else:
            raise ArgumentError("cannot quantize an unbounded profile without a decay hint")
    edges = np.linspace(lower, upper, int(points) + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    vals = np.asarray(profile.evaluate(mids), dtype=float)
    keep = vals > 0
    if not keep.any():
        raise ArgumentError("profile vanishes on the quantization grid")
    ivs = np.stack([edges[:-1][keep], edges[1:][keep]], axis=1)
    return StepProfile(tuple(map(tuple, ivs.tolist())), tuple(vals[keep].tolist()))


def profile_to_dict(profile: StepProfile) -> dict:
    return {"type": "step", "intervals": [list(iv) for iv in profile.intervals],
            "heights": list(profile.heights)}


def profile_from_dict(data: dict) -> Union[StepProfile, RadialProfile]:
    kind = data.get("type")
    if kind == "step":
        return StepProfile(tuple(tuple(iv) for iv in data["intervals"]),
                           None if data.get("heights") is None else tuple(data["heights"]))
    if kind == "table":
        return RadialProfile.from_table(data["ts"], data["values"], data.get("support_upper"))
    raise ArgumentError(f"unknown profile type {kind!r} (expected 'step' or 'table')")


def load_profile(path) -> Union[StepProfile, RadialProfile]:
    with open(Path(path), encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))
