"""The d-plane transform of radial functions on the affine Grassmannian G(n, k).

With ``m = d - k`` and ``C = |S^{m-1}|`` the transform of a radial profile is

    A f(s) = C int_s^inf f(t) (t^2 - s^2)^{m/2 - 1} t dt
           = C int_0^inf f(sqrt(r^2 + s^2)) r^{m-1} dr,

and on an annulus ``[a, b)`` it equals ``(C/m) [(b^2-s^2)_+^{m/2} - (a^2-s^2)_+^{m/2}]``.
The domain carries the radial density ``|S^{N-1}| r^{N-1}`` (``N = n - k``)
and the target ``|S^{n-d-1}| s^{n-d-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .constants import sphere_area
from .curves import TransformCurve
from .errors import AccuracyError, ArgumentError
from .lorentz import LorentzIndex, lorentz_norm, lp_norm
from .profiles import RadialMeasure, RadialProfile, StepProfile
from .quadrature import (SingularIntegrand, adaptive_integrate, integrate_semi_infinite,
                         integrate_singular)
from .sweep import breakpoint_grid, refined_sup

__all__ = [
    "GrassmannGeometry",
    "EndpointResult",
    "abel_numeric",
    "abel_step_closed",
    "domain_lorentz_norm",
    "truncated_measure",
    "endpoint_ratio",
    "chain_check",
    "lp_lq_ratio",
    "target_lq_norm",
]


@dataclass(frozen=True)
class GrassmannGeometry:
    """Integers ``n > d > k >= 0``."""

    n: int
    d: int
    k: int = 0

    def __post_init__(self):
        if not (self.n > self.d > self.k >= 0):
            raise ArgumentError(f"need n > d > k >= 0, got ({self.n}, {self.d}, {self.k})")

    @property
    def m(self) -> int:
        return self.d - self.k

    @property
    def big_n(self) -> int:
        return self.n - self.k

    @property
    def kernel_exponent(self) -> float:
        return 0.5 * self.m - 1.0

    @property
    def critical_p(self) -> float:
        return self.big_n / self.m

    @property
    def constant(self) -> float:
        return sphere_area(self.m - 1)

    @property
    def domain_measure(self) -> RadialMeasure:
        return RadialMeasure(c=sphere_area(self.big_n - 1), alpha=self.big_n - 1)

    @property
    def target_measure(self) -> RadialMeasure:
        return RadialMeasure(c=sphere_area(self.n - self.d - 1), alpha=self.n - self.d - 1)

    @property
    def sharp_constant(self) -> float:
        """Supremum of the truncated endpoint ratio over all indicator profiles."""
        cm = self.constant / self.m
        vol = sphere_area(self.big_n - 1) / self.big_n
        return cm / vol ** (self.m / self.big_n)

    @property
    def tag(self) -> str:
        return f"grassmann({self.n},{self.d},{self.k})"


@dataclass(frozen=True)
class EndpointResult:
    """Sup of the truncated ratio ``A(s) / ||chi_{E_s}||`` and of the plain ratio."""

    sup_ratio: float
    argmax: float
    plain_ratio: float
    plain_argmax: float


def _diff_sq(b, s):
    # (b^2 - s^2)_+ without cancellation near b = s
    return np.maximum((b - s) * (b + s), 0.0)


def abel_step_closed(geom: GrassmannGeometry, profile: StepProfile, s):
    """Exact transform of a (weighted) step profile at ``s`` (scalar or array)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ArgumentError("s must be nonnegative")
    half = 0.5 * geom.m
    flat = s_arr.reshape(-1, 1)
    lo, hi, h = profile.lower[None, :], profile.upper[None, :], profile.height_array[None, :]
    terms = _diff_sq(hi, flat) ** half - _diff_sq(lo, flat) ** half
    out = (geom.constant / geom.m) * np.sum(h * terms, axis=1)
    out = out.reshape(s_arr.shape)
    return out if out.ndim else float(out)


def _numeric_step(geom, profile, s, rel_tol):
    m = geom.m
    lo, hi, h = profile.lower, profile.upper, profile.height_array
    rows, los, his = [], [], []
    for j, sj in enumerate(s):
        active = hi > sj
        r_lo = np.sqrt(_diff_sq(lo[active], sj))
        r_hi = np.sqrt(_diff_sq(hi[active], sj))
        rows.append(np.full(r_lo.shape, j))
        los.append(r_lo)
        his.append(r_hi)
    owner = np.concatenate(rows) if rows else np.zeros(0, dtype=np.intp)
    r_lo, r_hi = np.concatenate(los), np.concatenate(his)

    def integrand(r, idx):
        t = np.sqrt(r * r + s[idx] ** 2)
        return profile.evaluate(t) * r ** (m - 1)

    vals, errs = adaptive_integrate(integrand, r_lo, r_hi, owner=owner, n_out=s.size,
                                    rel_tol=rel_tol, abs_tol=0.0, with_owner=True)
    return geom.constant * vals, geom.constant * errs


def _numeric_t_form(geom, profile, sj, rel_tol):
    """One point of the singular t-form, kernel ``(t - s)^{m/2-1}`` removed by substitution."""
    m = geom.m
    upper = profile.support_upper
    expo = geom.kernel_exponent
    if sj == 0.0:
        core = (lambda t: profile.evaluate(t) * t ** (m - 1))
        integrand = SingularIntegrand(core, m - 1.0, 0.0, factored=False)
    else:
        def core(t):
            return profile.evaluate(t) * (t + sj) ** expo * t
        integrand = SingularIntegrand(core, expo, 0.0, factored=True)
    bps = getattr(profile, "breakpoints", ())
    bps = np.asarray(bps, dtype=float)
    if math.isfinite(upper):
        return integrate_singular(integrand, sj, upper, rel_tol=rel_tol, breakpoints=bps,
                                  abs_tol=1e-300)
    return integrate_semi_infinite(integrand, sj, getattr(profile, "decay_hint", None),
                                   rel_tol=rel_tol, breakpoints=bps, abs_tol=1e-300)


def _numeric_general(geom, profile, sj, rel_tol):
    m = geom.m

    def integrand(r):
        return profile.evaluate(np.sqrt(r * r + sj * sj)) * r ** (m - 1)

    bps = np.asarray(profile.breakpoints, dtype=float)
    bps = np.sqrt(_diff_sq(bps[bps > sj], sj))
    upper = profile.support_upper
    if math.isfinite(upper):
        if upper <= sj:
            return 0.0, 0.0
        top = math.sqrt(_diff_sq(upper, sj))
        edges = np.unique(np.concatenate([[0.0], bps[bps < top], [top]]))
        vals, errs = adaptive_integrate(integrand, edges[:-1], edges[1:],
                                        owner=np.zeros(edges.size - 1, dtype=np.intp),
                                        rel_tol=rel_tol, abs_tol=0.0)
        return float(vals[0]), float(errs[0])
    return integrate_semi_infinite(integrand, 0.0, profile.decay_hint, rel_tol=rel_tol,
                                   breakpoints=bps, abs_tol=1e-300)


def abel_numeric(geom: GrassmannGeometry, profile: Union[StepProfile, RadialProfile], s_grid,
                 rel_tol: float = 1e-10, form: str = "r") -> TransformCurve:
    """Transform by quadrature on a grid of ``s`` values.

    ``form="r"`` integrates ``f(sqrt(r^2+s^2)) r^{m-1}`` with the profile
    breakpoints mapped to ``r``; ``form="t"`` integrates the singular kernel
    ``(t^2 - s^2)^{m/2-1} t`` directly.  A divergent point is recorded as
    ``inf`` with an infinite error estimate.
    """
    s = np.asarray(s_grid, dtype=float)
    if np.any(s < 0):
        raise ArgumentError("s must be nonnegative")
    if form not in ("r", "t"):
        raise ArgumentError(f"unknown form {form!r}")
    values = np.zeros(s.shape)
    errors = np.zeros(s.shape)
    if form == "r" and isinstance(profile, StepProfile):
        values, errors = _numeric_step(geom, profile, s, rel_tol)
    else:
        for j, sj in enumerate(s):
            if sj >= profile.support_upper:
                continue
            try:
                if form == "t":
                    v, e = _numeric_t_form(geom, profile, float(sj), rel_tol)
                else:
                    v, e = _numeric_general(geom, profile, float(sj), rel_tol)
                values[j], errors[j] = geom.constant * v, geom.constant * e
            except AccuracyError:
                values[j], errors[j] = math.inf, math.inf
    return TransformCurve(s, values, errors, geom.tag, support_upper=profile.support_upper)


def closed_curve(geom: GrassmannGeometry, profile: StepProfile, s_grid) -> TransformCurve:
    """Closed-form curve that keeps the exact evaluator for downstream norms."""
    return TransformCurve.from_function(
        s_grid, lambda x: abel_step_closed(geom, profile, x), geom.tag,
        support_upper=profile.support_upper, breakpoints=tuple(profile.breakpoints))


def domain_lorentz_norm(geom: GrassmannGeometry, profile: StepProfile,
                        index: LorentzIndex) -> float:
    """Lorentz norm against ``|S^{N-1}| r^{N-1} dr``."""
    if profile is None:
        raise ArgumentError("empty profile")
    return lorentz_norm(profile, geom.domain_measure, index)


def truncated_measure(geom: GrassmannGeometry, profile: StepProfile, s):
    """``mu(E_s)`` for ``E_s = {t in E : t > s}`` of an indicator profile (vectorised in s)."""
    big_n = geom.big_n
    vol = sphere_area(big_n - 1) / big_n
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))[:, None]
    lo, hi = profile.lower[None, :], profile.upper[None, :]
    lo_eff = np.minimum(np.maximum(lo, s_arr), hi)
    # b^N - x^N = b^N (1 - (x/b)^N), accurate for x close to b
    ratio = lo_eff / hi
    pieces = -np.expm1(big_n * np.log(np.where(ratio > 0, ratio, 1.0))) * hi ** big_n
    pieces = np.where(ratio > 0, pieces, hi ** big_n)
    pieces = np.where(lo_eff >= hi, 0.0, pieces)
    return vol * np.sum(pieces, axis=1)


def _check_indicator(profile):
    if profile is None:
        raise ArgumentError("empty profile")
    if not profile.is_indicator:
        raise ArgumentError("endpoint ratios are defined for indicator profiles")


def endpoint_ratio(geom: GrassmannGeometry, profile: StepProfile) -> EndpointResult:
    """Sup over ``s`` of ``A(s)/||chi_{E_s}||_{crit,1}`` and of ``A(s)/||chi_E||_{crit,1}``."""
    _check_indicator(profile)
    expo = geom.m / geom.big_n
    full = float(truncated_measure(geom, profile, 0.0)[0]) ** expo
    if not full > 0:
        raise ArgumentError("profile has zero norm")
    upper = profile.support_upper
    grid = breakpoint_grid(0.0, upper, profile.breakpoints)
    grid = grid[grid < upper]

    def sharp(s):
        num = abel_step_closed(geom, profile, s)
        den = truncated_measure(geom, profile, s) ** expo
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, num / den, np.nan)

    def plain(s):
        return abel_step_closed(geom, profile, s) / full

    sup, arg = refined_sup(sharp, grid)
    psup, parg = refined_sup(plain, grid)
    return EndpointResult(sup, arg, psup, parg)


def chain_check(geom: GrassmannGeometry, profile: StepProfile, s):
    """Both sides of the intermediate measure inequality and the kernel bound at ``s``.

    Returns ``(measure_side, kernel_side, holds)`` where ``measure_side`` is
    ``sum [b^N - max(a, s)^N]`` over annuli above ``s`` and ``kernel_side`` is
    ``sum [(b^2-s^2)_+^{N/2} - (a^2-s^2)_+^{N/2}]``; ``holds`` also requires
    ``kernel_side^{m/N} >= sum [(b^2-s^2)_+^{m/2} - (a^2-s^2)_+^{m/2}]``.
    """
    _check_indicator(profile)
    big_n, m = geom.big_n, geom.m
    vol = sphere_area(big_n - 1) / big_n
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    measure_side = truncated_measure(geom, profile, s_arr) / vol
    lo, hi = profile.lower[None, :], profile.upper[None, :]
    col = s_arr[:, None]
    kernel_side = np.sum(_diff_sq(hi, col) ** (0.5 * big_n) - _diff_sq(lo, col) ** (0.5 * big_n),
                         axis=1)
    transform_side = np.sum(_diff_sq(hi, col) ** (0.5 * m) - _diff_sq(lo, col) ** (0.5 * m), axis=1)
    slack = 1e-12 * np.maximum(1.0, measure_side)
    holds = (kernel_side <= measure_side + slack) & (
        transform_side <= kernel_side ** (m / big_n) + 1e-12 * np.maximum(1.0, transform_side))
    return measure_side, kernel_side, holds


def target_lq_norm(geom: GrassmannGeometry, profile: StepProfile, q: float,
                   rel_tol: float = 1e-12) -> float:
    """``(int A(s)^q |S^{n-d-1}| s^{n-d-1} ds)^{1/q}`` from the closed form."""
    w = geom.target_measure
    edges = profile.breakpoints
    edges = np.unique(np.concatenate([[0.0], edges]))
    # (b - s)^{m/2} behaviour at every right panel end when m is odd
    right = 0.5 * geom.m if geom.m % 2 else 0.0
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        def core(x):
            return abel_step_closed(geom, profile, x) ** q * w.density(x)
        val, _ = integrate_singular(SingularIntegrand(core, 0.0, right), lo, hi,
                                    rel_tol=rel_tol, abs_tol=1e-300)
        total += val
    return total ** (1.0 / q)


def lp_lq_ratio(geom: GrassmannGeometry, profile: StepProfile, p: float,
                rel_tol: float = 1e-12) -> float:
    """``||A f||_{L^q(target)} / ||f||_{L^p(domain)}`` with ``N/p = m + (n-d)/q``."""
    if not (1.0 <= p < geom.critical_p):
        raise ArgumentError(f"p must lie in [1, {geom.critical_p}), got {p}")
    q = (geom.n - geom.d) / (geom.big_n / p - geom.m)
    num = target_lq_norm(geom, profile, q, rel_tol)
    den = lp_norm(profile, geom.domain_measure, p)
    return num / den


def critical_q(geom: GrassmannGeometry, p: float) -> float:
    return (geom.n - geom.d) / (geom.big_n / p - geom.m)
