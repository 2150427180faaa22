"""The totally geodesic d-plane Abel transform on real hyperbolic space.

Profiles live in the variable ``t = cosh r``.  For ``c = cosh s``

    A f(s) = sigma_{d-1} c^{1-d} int_c^inf f(t) (t^2 - c^2)^{(d-2)/2} dt
           = (sigma_{d-1} / c) int_s^inf f(cosh r) (1 - tanh^2 s / tanh^2 r)^{(d-2)/2} sinh^{d-1} r dr,

with ``sigma_{d-1} = |S^{d-1}|``.  Substituting ``t = c cosh v`` turns a step
into ``sigma_{d-1} sum_i h_i int sinh^{d-1} v dv``, which is elementary for
``d <= 3`` and a fixed Gauss-Legendre rule otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import special

from .constants import sphere_area
from .curves import TransformCurve, curve_lp_norm, curve_weak_norm
from .errors import AccuracyError, ArgumentError
from .lorentz import LorentzIndex, lorentz_norm, lp_norm
from .profiles import RadialMeasure, RadialProfile, StepProfile
from .quadrature import (SingularIntegrand, adaptive_integrate, gauss_legendre_panels,
                         integrate_semi_infinite, integrate_singular)
from .sweep import breakpoint_grid, refined_sup

__all__ = [
    "HyperbolicGeometry",
    "HyperbolicEndpoint",
    "acosh1p",
    "to_t_variable",
    "to_r_variable",
    "abel_step_closed",
    "abel_numeric",
    "closed_curve",
    "xi_norm",
    "hn_lorentz_norm",
    "endpoint_bound_ratio",
    "weak_norm_decay",
    "lp_lq_ratio",
    "interp_q",
    "divergence_probe",
    "l1_ratio_constant",
    "target_q_norm",
]


@dataclass(frozen=True)
class HyperbolicGeometry:
    """``n >= 2`` and ``1 <= d <= n - 1``."""

    n: int
    d: int

    def __post_init__(self):
        if not (self.n >= 2 and 1 <= self.d <= self.n - 1):
            raise ArgumentError(f"need n >= 2 and 1 <= d <= n-1, got ({self.n}, {self.d})")

    @property
    def sigma(self) -> float:
        return sphere_area(self.d - 1)

    @property
    def c_n(self) -> float:
        return sphere_area(self.n - 1)

    @property
    def critical_p(self) -> float:
        return math.inf if self.d == 1 else (self.n - 1) / (self.d - 1)

    @property
    def space_measure(self) -> RadialMeasure:
        return RadialMeasure(c=self.c_n, beta=self.n - 1)

    @property
    def xi_measure(self) -> RadialMeasure:
        return RadialMeasure(c=1.0, beta=self.n - self.d - 1, gamma=self.d)

    @property
    def tag(self) -> str:
        return f"hyperbolic({self.n},{self.d})"

    def require_endpoint(self):
        if not (self.n >= 3 and self.d >= 2):
            raise ArgumentError(f"endpoint estimates need n >= 3 and 2 <= d <= n-1, got "
                                f"({self.n}, {self.d})")


@dataclass(frozen=True)
class HyperbolicEndpoint:
    """Sup of ``cosh(s) A(s) / M^{(d-1)/(n-1)}`` and of ``A(s) / ||f||_{crit,1}``."""

    weighted_ratio: float
    weighted_argmax: float
    plain_ratio: float
    plain_argmax: float


def acosh1p(delta):
    """``arccosh(1 + delta)`` accurate for small ``delta >= 0``."""
    delta = np.asarray(delta, dtype=float)
    return np.log1p(delta + np.sqrt(delta * (2.0 + delta)))


def to_t_variable(profile: StepProfile) -> StepProfile:
    """Step profile in ``r`` re-expressed in ``t = cosh r``."""
    return profile.map_variable(math.cosh)


def to_r_variable(profile: StepProfile) -> StepProfile:
    """Step profile in ``t = cosh r`` re-expressed in ``r``."""
    return profile.map_variable(lambda t: float(acosh1p(t - 1.0)))


def _check_t_profile(profile):
    if profile is None:
        raise ArgumentError("empty profile")
    if isinstance(profile, StepProfile) and profile.lower[0] < 1.0:
        raise ArgumentError("hyperbolic step profiles live in t = cosh r >= 1")


def _v_of(bound, c):
    # arccosh(max(bound, c) / c) via (bound - c) / c to keep digits near bound = c
    return acosh1p(np.maximum(bound - c, 0.0) / c)


def _sinh_power_integral(d, v_lo, v_hi):
    """``int_{v_lo}^{v_hi} sinh^{d-1} v dv`` elementwise."""
    if d == 1:
        return v_hi - v_lo
    if d == 2:
        return np.cosh(v_hi) - np.cosh(v_lo)
    if d == 3:
        delta = v_hi - v_lo
        total = v_hi + v_lo
        small = delta < 0.1
        ds = np.where(small, delta, 0.0)
        series = ds ** 3 / 6 * (1 + ds ** 2 / 20 * (1 + ds ** 2 / 42 * (1 + ds ** 2 / 72 * (
            1 + ds ** 2 / 110))))
        excess = np.where(small, series, np.sinh(delta) - delta)
        return 0.5 * (2.0 * np.sinh(0.5 * total) ** 2 * np.sinh(delta) + excess)
    return gauss_legendre_panels(lambda v: np.sinh(v) ** (d - 1), v_lo, v_hi)


def abel_step_closed(geom: HyperbolicGeometry, profile: StepProfile, s):
    """Transform of a step profile in ``t`` at ``s`` (scalar or array)."""
    _check_t_profile(profile)
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ArgumentError("s must be nonnegative")
    c = np.cosh(s_arr.reshape(-1, 1))
    lo, hi, h = profile.lower[None, :], profile.upper[None, :], profile.height_array[None, :]
    if geom.d == 2:
        # int sinh v dv = (t_hi - t_lo) / c exactly
        pieces = (np.maximum(hi, c) - np.maximum(lo, c)) / c
    else:
        v_lo, v_hi = _v_of(lo, c), _v_of(hi, c)
        shape = np.broadcast_shapes(v_lo.shape, v_hi.shape)
        v_lo, v_hi = np.broadcast_to(v_lo, shape), np.broadcast_to(v_hi, shape)
        pieces = _sinh_power_integral(geom.d, v_lo.ravel(), v_hi.ravel()).reshape(shape)
    out = geom.sigma * np.sum(h * pieces, axis=1)
    out = out.reshape(s_arr.shape)
    return out if out.ndim else float(out)


def closed_curve(geom: HyperbolicGeometry, profile: StepProfile, s_grid) -> TransformCurve:
    upper = float(acosh1p(profile.support_upper - 1.0))
    bps = tuple(acosh1p(profile.breakpoints - 1.0).tolist())
    return TransformCurve.from_function(s_grid, lambda x: abel_step_closed(geom, profile, x),
                                        geom.tag, support_upper=upper, breakpoints=bps)


def _t_form_point(geom, profile, c, rel_tol):
    d = geom.d
    expo = 0.5 * (d - 2)
    upper = profile.support_upper
    bps = np.asarray(profile.breakpoints, dtype=float)

    def core(t):
        return profile.evaluate(t) * (t + c) ** expo

    integrand = SingularIntegrand(core, expo, 0.0, factored=True)
    if math.isfinite(upper):
        if upper <= c:
            return 0.0, 0.0
        val, err = integrate_singular(integrand, c, upper, rel_tol=rel_tol, breakpoints=bps,
                                      abs_tol=1e-300)
    else:
        val, err = integrate_semi_infinite(integrand, c, None, rel_tol=rel_tol, breakpoints=bps,
                                           abs_tol=1e-300)
    scale = geom.sigma / c ** (d - 1)
    return scale * val, scale * err


def _sinhc(x):
    return np.where(np.abs(x) < 1e-8, 1.0 + x * x / 6.0, np.sinh(x) / np.where(x == 0, 1.0, x))


def _r_form_point(geom, profile, s, rel_tol):
    d = geom.d
    expo = 0.5 * (d - 2)
    cs = math.cosh(s)
    upper_t = profile.support_upper
    bps_r = acosh1p(np.asarray(profile.breakpoints, dtype=float) - 1.0)

    # 1 - tanh^2 s / tanh^2 r = sinh(r - s) sinh(r + s) / (cosh^2 s sinh^2 r)
    def core(r):
        f = profile.evaluate(np.cosh(r))
        return (f * (_sinhc(r - s) * np.sinh(r + s)) ** expo * np.sinh(r) / cs ** (d - 2))

    integrand = SingularIntegrand(core, expo, 0.0, factored=True)
    if math.isfinite(upper_t):
        upper = float(acosh1p(upper_t - 1.0))
        if upper <= s:
            return 0.0, 0.0
        val, err = integrate_singular(integrand, s, upper, rel_tol=rel_tol, breakpoints=bps_r,
                                      abs_tol=1e-300)
    else:
        val, err = integrate_semi_infinite(integrand, s, None, rel_tol=rel_tol,
                                           breakpoints=bps_r, abs_tol=1e-300)
    return geom.sigma / cs * val, geom.sigma / cs * err


def abel_numeric(geom: HyperbolicGeometry, profile: Union[StepProfile, RadialProfile], s_grid,
                 rel_tol: float = 1e-10, form: str = "t") -> TransformCurve:
    """Transform by quadrature, in the ``t`` form or the ``r`` form.

    The profile must be given in ``t = cosh r``.  Divergent points are
    recorded as ``inf``.
    """
    _check_t_profile(profile)
    if form not in ("t", "r"):
        raise ArgumentError(f"unknown form {form!r}")
    s = np.asarray(s_grid, dtype=float)
    if np.any(s < 0):
        raise ArgumentError("s must be nonnegative")
    values = np.zeros(s.shape)
    errors = np.zeros(s.shape)
    for j, sj in enumerate(s):
        try:
            if form == "t":
                values[j], errors[j] = _t_form_point(geom, profile, math.cosh(sj), rel_tol)
            else:
                values[j], errors[j] = _r_form_point(geom, profile, float(sj), rel_tol)
        except AccuracyError:
            values[j], errors[j] = math.inf, math.inf
    upper = profile.support_upper
    upper_s = float(acosh1p(upper - 1.0)) if math.isfinite(upper) else math.inf
    return TransformCurve(s, values, errors, geom.tag, support_upper=upper_s)


def xi_norm(curve: TransformCurve, geom: HyperbolicGeometry, p: float) -> float:
    """``(int |A(u)|^p sinh^{n-d-1} u cosh^d u du)^{1/p}``."""
    return curve_lp_norm(curve, geom.xi_measure, p)


def hn_lorentz_norm(profile: StepProfile, geom: HyperbolicGeometry, index: LorentzIndex,
                    variable: str = "t") -> float:
    """Lorentz norm against ``c_n sinh^{n-1} r dr``."""
    if profile is None:
        raise ArgumentError("empty profile")
    prof_r = to_r_variable(profile) if variable == "t" else profile
    return lorentz_norm(prof_r, geom.space_measure, index)


def _sinh_moment(geom, profile):
    """``int f(cosh t) sinh^{n-1} t dt`` (no ``c_n``)."""
    prof_r = to_r_variable(profile)
    return lp_norm(prof_r, RadialMeasure(beta=geom.n - 1), 1.0)


def endpoint_bound_ratio(geom: HyperbolicGeometry, profile: StepProfile) -> HyperbolicEndpoint:
    """Sups of ``cosh(s) A(s) / M^{(d-1)/(n-1)}`` and ``A(s) / ||f||_{(n-1)/(d-1),1}``.

    ``M = int f(cosh t) sinh^{n-1} t dt``; the Lorentz norm carries ``c_n``.
    """
    geom.require_endpoint()
    _check_t_profile(profile)
    if not profile.is_indicator:
        raise ArgumentError("endpoint ratios are defined for indicator profiles")
    expo = (geom.d - 1) / (geom.n - 1)
    moment = _sinh_moment(geom, profile)
    if not moment > 0:
        raise ArgumentError("profile has zero norm")
    weighted_den = moment ** expo
    plain_den = hn_lorentz_norm(profile, geom, LorentzIndex(geom.critical_p, 1.0))
    upper = float(acosh1p(profile.support_upper - 1.0))
    bps = acosh1p(profile.breakpoints - 1.0)
    grid = breakpoint_grid(0.0, upper, bps)

    def weighted(s):
        return np.cosh(s) * abel_step_closed(geom, profile, s) / weighted_den

    def plain(s):
        return abel_step_closed(geom, profile, s) / plain_den

    w, wa = refined_sup(weighted, grid)
    p, pa = refined_sup(plain, grid)
    return HyperbolicEndpoint(w, wa, p, pa)


def weak_norm_decay(geom: HyperbolicGeometry, profile: StepProfile) -> float:
    """``||A f||_{L^{n-1,inf}}`` against the density of the plane space."""
    geom.require_endpoint()
    _check_t_profile(profile)
    upper = float(acosh1p(profile.support_upper - 1.0))
    grid = breakpoint_grid(0.0, upper, acosh1p(profile.breakpoints - 1.0), uniform=2048,
                           per_side=4)
    curve = TransformCurve(grid, abel_step_closed(geom, profile, grid), np.zeros_like(grid),
                           geom.tag)
    return curve_weak_norm(curve, geom.xi_measure, geom.n - 1)


def target_q_norm(geom: HyperbolicGeometry, profile: StepProfile, q: float,
                  rel_tol: float = 1e-11) -> float:
    """``(int A(u)^q sinh^{n-d-1} u cosh^d u du)^{1/q}`` from the step transform."""
    w = geom.xi_measure
    bps = acosh1p(profile.breakpoints - 1.0)
    edges = np.unique(np.concatenate([[0.0], bps]))
    # odd d: A ~ sqrt(b - cosh u) near each breakpoint
    right = 0.5 if geom.d % 2 else 0.0
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        def core(x):
            return abel_step_closed(geom, profile, x) ** q * w.density(x)
        val, _ = integrate_singular(SingularIntegrand(core, 0.0, right), lo, hi,
                                    rel_tol=rel_tol, abs_tol=1e-300)
        total += val
    return total ** (1.0 / q)


def interp_q(geom: HyperbolicGeometry, p: float, kappa: float = 1.0) -> float:
    """``q`` with ``(n - kappa)/p = (d - kappa) + (n - d)/q``."""
    denom = (geom.n - kappa) / p - (geom.d - kappa)
    if not denom > 0:
        raise ArgumentError(f"no admissible q for p={p}, kappa={kappa}")
    return (geom.n - geom.d) / denom


def lp_lq_ratio(geom: HyperbolicGeometry, profile: StepProfile, p: float,
                kappa: float = 1.0) -> float:
    """``||A f||_{L^q(plane space)} / ||f||_{L^p}`` at the exponent pairing with ``kappa``."""
    _check_t_profile(profile)
    if not (1.0 <= p < geom.critical_p):
        raise ArgumentError(f"p must lie in [1, {geom.critical_p}), got {p}")
    if not 1.0 <= kappa <= 2.0:
        raise ArgumentError("kappa must lie in [1, 2]")
    q = interp_q(geom, p, kappa)
    num = target_q_norm(geom, profile, q)
    den = lp_norm(to_r_variable(profile), geom.space_measure, p)
    return num / den


def l1_ratio_constant(geom: HyperbolicGeometry) -> float:
    """Exact value of ``||A f||_1 / ||f||_1`` for nonnegative ``f`` (Fubini)."""
    half = special.beta(0.5 * (geom.n - geom.d), 0.5 * geom.d)
    return geom.sigma * half / (2.0 * geom.c_n)


def divergence_probe(geom: HyperbolicGeometry, p: float, t_grid: Sequence[float],
                     rel_tol: float = 1e-12):
    """``I(T) = int_0^T f(cosh t) e^{(d-1) t} dt`` for the probe ``f(cosh t) = e^{-(n-1)t/p}/(1+t)``."""
    if not p >= 1:
        raise ArgumentError("p must be at least 1")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0) or np.any(np.diff(t_grid) <= 0):
        raise ArgumentError("T grid must be positive and increasing")
    rate = (geom.d - 1) - (geom.n - 1) / p

    def integrand(t):
        return np.exp(rate * t) / (1.0 + t)

    # panels [0, 1, 2, 4, ...] up to each T, so every T is a panel edge
    top = float(t_grid[-1])
    marks = [0.0]
    while marks[-1] < top:
        marks.append(1.0 if marks[-1] == 0.0 else 2.0 * marks[-1])
    edges = np.unique(np.concatenate([np.array(marks[:-1]), t_grid]))
    edges = edges[edges <= top]
    vals, _ = adaptive_integrate(integrand, edges[:-1], edges[1:], owner=np.arange(edges.size - 1),
                                 rel_tol=rel_tol, abs_tol=0.0)
    cumulative = np.concatenate([[0.0], np.cumsum(vals)])
    return [float(cumulative[np.searchsorted(edges, T)]) for T in t_grid]
