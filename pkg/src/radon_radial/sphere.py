"""The spherical d-plane Abel transform, its norms, and the two counterexamples.

Profiles are even parts written in ``u = cos r`` on ``[0, 1]``.  With
``c = cos(theta)`` and ``C = 2 Gamma((d+1)/2) / (sqrt(pi) Gamma(d/2))``

    A f(theta) = C c^{1-d} int_0^c f(u) (c^2 - u^2)^{(d-2)/2} du
               = (C / c) int_theta^{pi/2} f(cos r) (1 - tan^2 theta / tan^2 r)^{(d-2)/2} sin^{d-1} r dr,

normalised so that ``A 1 = 1``.  On a step the substitution ``u = c x`` gives
the regularised incomplete beta function:
``A chi_[a,b] = I_{x_b^2}(1/2, d/2) - I_{x_a^2}(1/2, d/2)``, ``x = min(bound, c)/c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy import special

from .curves import TransformCurve, curve_lp_norm, curve_weak_norm
from .errors import AccuracyError, ArgumentError
from .lorentz import LorentzIndex, lorentz_norm, lp_norm
from .profiles import RadialMeasure, RadialProfile, StepProfile, philox_generator
from .quadrature import SingularIntegrand, integrate_singular
from .sweep import breakpoint_grid, refined_sup

__all__ = [
    "SphereGeometry",
    "abel_constant",
    "abel_step_closed",
    "abel_step_closed_d1",
    "abel_numeric",
    "abel_full_sphere",
    "even_part",
    "closed_curve",
    "catalan_check",
    "to_angle_variable",
    "sphere_lorentz_norm",
    "sphere_lp_norm",
    "weighted_endpoint_ratio",
    "weak_norm",
    "target_q_norm",
    "lp_ratio",
    "weighted_lq_ratio",
    "d1_comparison",
    "counterexample_flat",
    "counterexample_cap",
]

_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class SphereGeometry:
    """``n >= 2`` and ``1 <= d <= n - 1``."""

    n: int
    d: int

    def __post_init__(self):
        if not (self.n >= 2 and 1 <= self.d <= self.n - 1):
            raise ArgumentError(f"need n >= 2 and 1 <= d <= n-1, got ({self.n}, {self.d})")

    @property
    def critical_p(self) -> float:
        return self.n / self.d

    @property
    def weak_index(self) -> int:
        return self.d + 1

    @property
    def target_measure(self) -> RadialMeasure:
        return RadialMeasure(delta=self.n - self.d - 1, epsilon=self.d, domain=(0.0, _HALF_PI))

    @property
    def angle_measure(self) -> RadialMeasure:
        """``sin^{n-1} r dr``, the image of ``(1-u^2)^{(n-2)/2} du`` under ``u = cos r``."""
        return RadialMeasure(delta=self.n - 1, domain=(0.0, _HALF_PI))

    @property
    def tag(self) -> str:
        return f"sphere({self.n},{self.d})"


def abel_constant(d: int) -> float:
    """``2 Gamma((d+1)/2) / (sqrt(pi) Gamma(d/2))``."""
    return 2.0 * math.exp(math.lgamma(0.5 * (d + 1)) - math.lgamma(0.5 * d)) / math.sqrt(math.pi)


def _check_u_profile(profile):
    if profile is None:
        raise ArgumentError("empty profile")
    if isinstance(profile, StepProfile) and profile.support_upper > 1.0:
        raise ArgumentError("sphere profiles live in u = cos r on [0, 1]")


def _beta_cdf_gap(d, lo, hi, c):
    """``I_{x_hi^2} - I_{x_lo^2}`` of ``(1/2, d/2)``, complementary form near ``x = 1``."""
    a, b = 0.5, 0.5 * d
    safe_c = np.where(c > 0, c, 1.0)
    x_lo = np.where(c > 0, np.minimum(lo, c) / safe_c, (lo > 0).astype(float))
    x_hi = np.where(c > 0, np.minimum(hi, c) / safe_c, (hi > 0).astype(float))
    # 1 - x^2 = (c - y)(c + y) / c^2 with y = min(bound, c)
    y_lo, y_hi = np.minimum(lo, c), np.minimum(hi, c)
    comp_lo = np.where(c > 0, (c - y_lo) * (c + y_lo) / safe_c ** 2, (lo <= 0).astype(float))
    comp_hi = np.where(c > 0, (c - y_hi) * (c + y_hi) / safe_c ** 2, (hi <= 0).astype(float))
    x_lo, x_hi, comp_lo, comp_hi = np.broadcast_arrays(x_lo, x_hi, comp_lo, comp_hi)
    out = np.empty(x_lo.shape)
    near_one = x_lo ** 2 > 0.5
    far = ~near_one
    out[far] = special.betainc(a, b, x_hi[far] ** 2) - special.betainc(a, b, x_lo[far] ** 2)
    out[near_one] = special.betainc(b, a, comp_lo[near_one]) - special.betainc(b, a, comp_hi[near_one])
    return out


def abel_step_closed(geom: SphereGeometry, profile: StepProfile, theta):
    """Exact transform of a step profile in ``u`` at ``theta`` in ``[0, pi/2]``."""
    _check_u_profile(profile)
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0) or np.any(th > _HALF_PI):
        raise ArgumentError("theta must lie in [0, pi/2]")
    c = np.where(th >= _HALF_PI, 0.0, np.cos(th)).reshape(-1, 1)
    lo, hi, h = profile.lower[None, :], profile.upper[None, :], profile.height_array[None, :]
    out = np.sum(h * _beta_cdf_gap(geom.d, lo, hi, c), axis=1).reshape(th.shape)
    return out if out.ndim else float(out)


def abel_step_closed_d1(geom: SphereGeometry, profile: StepProfile, theta):
    """``(2/pi) sum h [arcsin(min(b,c)/c) - arcsin(min(a,c)/c)]`` for ``d = 1``."""
    if geom.d != 1:
        raise ArgumentError("the arcsin closed form needs d = 1")
    _check_u_profile(profile)
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0) or np.any(th > _HALF_PI):
        raise ArgumentError("theta must lie in [0, pi/2]")
    c = np.where(th >= _HALF_PI, 0.0, np.cos(th)).reshape(-1, 1)
    safe = np.where(c > 0, c, 1.0)
    lo, hi, h = profile.lower[None, :], profile.upper[None, :], profile.height_array[None, :]
    x_lo = np.where(c > 0, np.minimum(lo, c) / safe, (lo > 0).astype(float))
    x_hi = np.where(c > 0, np.minimum(hi, c) / safe, (hi > 0).astype(float))
    out = (2.0 / math.pi) * np.sum(h * (np.arcsin(x_hi) - np.arcsin(x_lo)), axis=1)
    out = out.reshape(th.shape)
    return out if out.ndim else float(out)


def closed_curve(geom: SphereGeometry, profile: StepProfile, theta_grid) -> TransformCurve:
    bps = tuple(np.arccos(np.clip(profile.breakpoints, 0.0, 1.0)).tolist())
    return TransformCurve.from_function(theta_grid, lambda x: abel_step_closed(geom, profile, x),
                                        geom.tag, support_upper=_HALF_PI, breakpoints=bps)


def _magnitude(fn, lo, hi):
    """Sampled ``max |f|`` used to set an absolute floor for cancelling integrands."""
    x = np.linspace(lo, hi, 257)
    vals = np.abs(np.asarray(fn(x), dtype=float))
    vals = vals[np.isfinite(vals)]
    return float(vals.max()) if vals.size else 0.0


def _floor(scale):
    return max(1e-15 * scale, 1e-300)


def _u_form_point(geom, profile, c, rel_tol, scale):
    d = geom.d
    expo = 0.5 * (d - 2)

    def core(u):
        return profile.evaluate(u) * (c + u) ** expo

    bps = np.asarray(profile.breakpoints, dtype=float)
    val, err = integrate_singular(SingularIntegrand(core, 0.0, expo, factored=True), 0.0, c,
                                  rel_tol=rel_tol, breakpoints=bps,
                                  abs_tol=_floor(scale * c ** (d - 1)))
    scale = abel_constant(d) / c ** (d - 1)
    return scale * val, scale * err


def _sinc(x):
    return np.sinc(np.asarray(x) / math.pi)


def _r_form_point(geom, profile, theta, rel_tol, scale):
    d = geom.d
    expo = 0.5 * (d - 2)
    ct = math.cos(theta)

    # 1 - tan^2 theta / tan^2 r = sin(r - theta) sin(r + theta) / (cos^2 theta sin^2 r)
    def core(r):
        f = profile.evaluate(np.cos(r))
        return f * (_sinc(r - theta) * np.sin(r + theta)) ** expo * np.sin(r) / ct ** (d - 2)

    bps = np.arccos(np.clip(np.asarray(profile.breakpoints, dtype=float), 0.0, 1.0))
    val, err = integrate_singular(SingularIntegrand(core, expo, 0.0, factored=True), theta,
                                  _HALF_PI, rel_tol=rel_tol, breakpoints=bps,
                                  abs_tol=_floor(scale * ct))
    scale = abel_constant(d) / ct
    return scale * val, scale * err


def abel_numeric(geom: SphereGeometry, profile: Union[StepProfile, RadialProfile], theta_grid,
                 rel_tol: float = 1e-10, form: str = "u") -> TransformCurve:
    """Transform by quadrature in the ``u`` form or the ``r`` form.

    At ``theta = pi/2`` the integration range is empty and the continuous
    limit ``f(0+)`` is returned.
    """
    _check_u_profile(profile)
    if form not in ("u", "r"):
        raise ArgumentError(f"unknown form {form!r}")
    th = np.asarray(theta_grid, dtype=float)
    if np.any(th < 0) or np.any(th > _HALF_PI):
        raise ArgumentError("theta must lie in [0, pi/2]")
    values = np.zeros(th.shape)
    errors = np.zeros(th.shape)
    scale = _magnitude(profile.evaluate, 0.0, 1.0)
    for j, t in enumerate(th):
        c = math.cos(t) if t < _HALF_PI else 0.0
        if c <= 0.0:
            values[j] = float(profile.evaluate(np.array([0.0]))[0])
            continue
        try:
            if form == "u":
                values[j], errors[j] = _u_form_point(geom, profile, c, rel_tol, scale)
            else:
                values[j], errors[j] = _r_form_point(geom, profile, float(t), rel_tol, scale)
        except AccuracyError:
            values[j], errors[j] = math.inf, math.inf
    return TransformCurve(th, values, errors, geom.tag, support_upper=_HALF_PI)


def even_part(fn: Callable, breakpoints: Sequence[float] = ()) -> RadialProfile:
    """Profile on ``[0, 1]`` of ``(f(u) + f(-u)) / 2`` for a full-sphere profile ``f`` on ``[-1, 1]``.

    ``breakpoints`` are jump locations of ``f`` anywhere in ``[-1, 1]``.
    """
    folded = tuple(sorted({abs(float(b)) for b in breakpoints if 0 < abs(float(b)) < 1}))
    def evaluator(u):
        u = np.asarray(u, dtype=float)
        return 0.5 * (np.asarray(fn(u), dtype=float) + np.asarray(fn(-u), dtype=float))
    return RadialProfile(evaluator, 1.0, breakpoints=folded)


def abel_full_sphere(geom: SphereGeometry, fn: Callable, theta_grid, rel_tol: float = 1e-10,
                     breakpoints: Sequence[float] = ()) -> TransformCurve:
    """Transform of a full-sphere profile ``f`` on ``[-1, 1]`` by the symmetric integral.

    ``A f(theta) = (C / 2) c^{1-d} int_{-c}^{c} f(u) (c^2 - u^2)^{(d-2)/2} du``,
    which depends only on the even part of ``f``.
    """
    d = geom.d
    expo = 0.5 * (d - 2)
    th = np.asarray(theta_grid, dtype=float)
    values = np.zeros(th.shape)
    errors = np.zeros(th.shape)
    scale = _magnitude(fn, -1.0, 1.0)
    for j, t in enumerate(th):
        c = math.cos(t)
        if c <= 0:
            values[j] = 0.5 * float(np.asarray(fn(np.array([0.0])))[0]
                                    + np.asarray(fn(np.array([-0.0])))[0])
            continue

        integrand = SingularIntegrand(lambda u, c=c: np.asarray(fn(u), dtype=float), expo, expo,
                                      factored=True)
        # (c - u)^e (u + c)^e is applied by the factored form with a = -c, b = c
        val, err = integrate_singular(integrand, -c, c, rel_tol=rel_tol,
                                      breakpoints=np.asarray(breakpoints, dtype=float),
                                      abs_tol=_floor(scale * c ** (d - 1)))
        scale = 0.5 * abel_constant(d) / c ** (d - 1)
        values[j], errors[j] = scale * val, scale * err
    return TransformCurve(th, values, errors, geom.tag, support_upper=_HALF_PI)


def catalan_check(d: int, psi: Sequence[float], x_norm: float = 1.0, samples: int = 10 ** 6,
                  seed: int = 0, chunk: int = 1 << 17):
    """Monte-Carlo sphere average of ``psi(<x, w>)`` against the one-dimensional formula.

    ``psi`` holds polynomial coefficients in increasing degree.

    Returns
    -------
    lhs, rhs, abs_diff, stderr : float
    """
    if d < 2:
        raise ArgumentError("the one-dimensional reduction needs d >= 2")
    coeffs = np.asarray(psi, dtype=float)
    poly = np.polynomial.Polynomial(coeffs)
    gen = philox_generator(seed, d)
    total, total_sq, done = 0.0, 0.0, 0
    while done < samples:
        k = min(chunk, samples - done)
        g = gen.standard_normal((k, d + 1))
        first = g[:, 0] / np.linalg.norm(g, axis=1)
        vals = poly(x_norm * first)
        total += math.fsum(vals)
        total_sq += math.fsum(vals * vals)
        done += k
    lhs = total / samples
    var = max(total_sq / samples - lhs * lhs, 0.0)
    stderr = math.sqrt(var / samples)
    expo = 0.5 * (d - 2)
    c_d = 0.5 * abel_constant(d)
    rhs, _ = integrate_singular(SingularIntegrand(lambda s: poly(x_norm * s), expo, expo,
                                                  factored=True), -1.0, 1.0, rel_tol=1e-12,
                                abs_tol=1e-300)
    rhs *= c_d
    return lhs, rhs, abs(lhs - rhs), stderr


def to_angle_variable(profile: StepProfile) -> StepProfile:
    """Step profile in ``u`` re-expressed in ``r = arccos u``."""
    return profile.map_variable(lambda u: math.acos(min(max(u, 0.0), 1.0)))


def sphere_lorentz_norm(profile: StepProfile, geom: SphereGeometry, index: LorentzIndex) -> float:
    """Lorentz norm against ``(1 - u^2)^{(n-2)/2} du`` on ``(0, 1)``."""
    _check_u_profile(profile)
    return lorentz_norm(to_angle_variable(profile), geom.angle_measure, index)


def sphere_lp_norm(profile: StepProfile, geom: SphereGeometry, p: float) -> float:
    _check_u_profile(profile)
    return lp_norm(to_angle_variable(profile), geom.angle_measure, p)


def _theta_breakpoints(profile):
    return np.arccos(np.clip(profile.breakpoints, 0.0, 1.0))


def weighted_endpoint_ratio(geom: SphereGeometry, profile: StepProfile):
    """``sup_theta cos(theta) A(theta) / ||f||_{n/d,1}`` and its argmax."""
    _check_u_profile(profile)
    if not profile.is_indicator:
        raise ArgumentError("endpoint ratios are defined for indicator profiles")
    norm = sphere_lorentz_norm(profile, geom, LorentzIndex(geom.critical_p, 1.0))
    if not norm > 0:
        raise ArgumentError("profile has zero norm")
    grid = breakpoint_grid(0.0, _HALF_PI, _theta_breakpoints(profile))
    closed = abel_step_closed_d1 if geom.d == 1 else abel_step_closed

    def ratio(th):
        return np.cos(th) * closed(geom, profile, th) / norm

    return refined_sup(ratio, grid)


def weak_norm(curve: TransformCurve, geom: SphereGeometry) -> float:
    """``||A||_{L^{d+1,inf}}`` against ``sin^{n-d-1} cos^d`` on ``[0, pi/2]``."""
    return curve_weak_norm(curve, geom.target_measure, geom.weak_index)


def target_q_norm(geom: SphereGeometry, profile: StepProfile, q: float, weight_cos: bool = False,
                  rel_tol: float = 1e-11) -> float:
    """``(int (w A)^q sin^{n-d-1} cos^d dtheta)^{1/q}`` with ``w = cos`` or ``1``."""
    w = geom.target_measure
    if math.isinf(q):
        grid = breakpoint_grid(0.0, _HALF_PI, _theta_breakpoints(profile))
        vals = abel_step_closed(geom, profile, grid) * (np.cos(grid) if weight_cos else 1.0)
        return float(np.max(vals))
    edges = np.unique(np.concatenate([[0.0], _theta_breakpoints(profile), [_HALF_PI]]))
    right = 0.5 if geom.d % 2 else 0.0
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        def core(x):
            x = np.minimum(x, _HALF_PI)
            vals = abel_step_closed(geom, profile, x)
            if weight_cos:
                vals = vals * np.cos(x)
            return vals ** q * w.density(x)
        val, _ = integrate_singular(SingularIntegrand(core, 0.0, right), lo, hi,
                                    rel_tol=rel_tol, abs_tol=1e-300)
        total += val
    return total ** (1.0 / q)


def lp_ratio(geom: SphereGeometry, profile: StepProfile, p: float) -> float:
    """``||A f||_{L^p(target)} / ||f||_{L^p}``; ``p = inf`` uses sups."""
    if not p >= 1:
        raise ArgumentError("p must be at least 1")
    num = target_q_norm(geom, profile, p)
    den = sphere_lp_norm(profile, geom, p)
    return num / den


def weighted_lq_ratio(geom: SphereGeometry, profile: StepProfile, p: float) -> float:
    """``||cos(.) A f||_q / ||f||_p`` with ``n/p = (n-d)/q + d``."""
    if not 1.0 <= p < geom.critical_p:
        raise ArgumentError(f"p must lie in [1, {geom.critical_p}), got {p}")
    q = (geom.n - geom.d) / (geom.n / p - geom.d)
    return target_q_norm(geom, profile, q, weight_cos=True) / sphere_lp_norm(profile, geom, p)


def d1_comparison(profile: StepProfile, theta):
    """Two-sided comparison for ``I = cos(theta) A_1 f(theta)`` on indicators.

    Returns ``(I, lower, upper, squared_over_length)`` where
    ``lower = (2/pi) c Phi / sqrt(2)``, ``upper = (2/pi) c Phi`` with
    ``Phi = sum 2 [(1 - x_a)^{1/2} - (1 - x_b)^{1/2}]``, and
    ``squared_over_length = I^2 / sum (b - a)`` over the annuli below ``c``.
    """
    if not profile.is_indicator:
        raise ArgumentError("the comparison is stated for indicator profiles")
    geom = SphereGeometry(2, 1)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    c = np.cos(th).reshape(-1, 1)
    val = c[:, 0] * abel_step_closed_d1(geom, profile, th)
    safe = np.where(c > 0, c, 1.0)
    lo, hi = profile.lower[None, :], profile.upper[None, :]
    x_lo = np.minimum(lo / safe, 1.0)
    x_hi = np.minimum(hi / safe, 1.0)
    phi = np.sum(2.0 * (np.sqrt(1.0 - x_lo) - np.sqrt(1.0 - x_hi)), axis=1)
    upper = (2.0 / math.pi) * c[:, 0] * phi
    lower = upper / math.sqrt(2.0)
    length = np.sum(np.maximum(np.minimum(hi, c) - lo, 0.0), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.where(length > 0, val ** 2 / length, 0.0)
    return val, lower, upper, sq


def counterexample_flat(geom: SphereGeometry, a_list: Sequence[float], p: float):
    """Rows ``(a_i, sup_theta A f_i, ||f_i||_{p,1})`` for ``f_i = chi_[0, a_i]``."""
    if not (1.0 <= p < math.inf):
        raise ArgumentError("p must lie in [1, inf)")
    rows = []
    for a in a_list:
        prof = StepProfile.indicator(0.0, float(a))
        grid = breakpoint_grid(0.0, _HALF_PI, _theta_breakpoints(prof))
        sup = float(np.max(abel_step_closed(geom, prof, grid)))
        norm = sphere_lorentz_norm(prof, geom, LorentzIndex(p, 1.0))
        rows.append((float(a), sup, norm))
    return rows


def counterexample_cap(geom: SphereGeometry, p: float, m_grid: Sequence[int]):
    """Rows ``(m, ||f_m||_{p,1}, cos(s) A f_m(s))`` for ``f_m = chi_[a_m, 1]``, ``a_m = (m-1)/(m+1)``.

    ``cos s`` is the midpoint of ``((m-1)/m, m/(m+1))``.
    """
    if not p >= 1:
        raise ArgumentError("p must be at least 1")
    rows = []
    for m in m_grid:
        m = int(m)
        if m < 2:
            raise ArgumentError("m must be at least 2")
        a = (m - 1) / (m + 1)
        prof = StepProfile.indicator(a, 1.0)
        norm = sphere_lorentz_norm(prof, geom, LorentzIndex(p, 1.0))
        c = 0.5 * ((m - 1) / m + m / (m + 1))
        # A = I_{1 - (a/c)^2}(d/2, 1/2), with 1 - (a/c)^2 = (c - a)(c + a)/c^2
        x = (c - a) * (c + a) / (c * c)
        lower = c * float(special.betainc(0.5 * geom.d, 0.5, x))
        rows.append((m, norm, lower))
    return rows
