import math

import numpy as np
import pytest
from scipy import integrate, special

from radon_radial.curves import TransformCurve
from radon_radial.errors import ArgumentError
from radon_radial.lorentz import LorentzIndex
from radon_radial.profiles import RadialProfile, StepProfile, random_step_profile
from radon_radial.sphere import (SphereGeometry, abel_constant, abel_full_sphere, abel_numeric,
                                 abel_step_closed, abel_step_closed_d1, catalan_check,
                                 counterexample_cap, counterexample_flat, d1_comparison, even_part,
                                 lp_ratio, sphere_lorentz_norm, weak_norm,
                                 weighted_endpoint_ratio, weighted_lq_ratio)

HALF_PI = 0.5 * math.pi
ONE = StepProfile.indicator(0.0, 1.0)
GEOMS = [SphereGeometry(2, 1), SphereGeometry(3, 2), SphereGeometry(4, 1), SphereGeometry(5, 3),
         SphereGeometry(6, 4)]


def _quad_oracle(d, profile, theta):
    c = math.cos(theta)
    const = 2 * math.gamma((d + 1) / 2) / (math.sqrt(math.pi) * math.gamma(d / 2))
    total = 0.0
    for (a, b), h in zip(profile.intervals, profile.heights):
        lo, hi = min(a, c), min(b, c)
        if hi > lo:
            # u = c sin(phi) removes the endpoint singularity
            val, _ = integrate.quad(lambda phi: math.cos(phi) ** (d - 1),
                                    math.asin(lo / c), math.asin(hi / c), epsabs=0, epsrel=1e-13)
            total += h * val
    return const * total


@pytest.mark.parametrize("geom", GEOMS, ids=lambda g: g.tag)
def test_normalization(geom):
    theta = np.linspace(0.0, HALF_PI * 0.999, 100)
    assert abel_step_closed(geom, ONE, theta) == pytest.approx(np.ones(100), rel=1e-13)
    for form in ("u", "r"):
        assert abel_numeric(geom, ONE, theta[::9], form=form).values == \
            pytest.approx(np.ones(12), rel=1e-9)


def test_abel_constant_values():
    assert abel_constant(1) == pytest.approx(2 / math.pi, rel=1e-15)
    assert abel_constant(2) == pytest.approx(1.0, rel=1e-15)


def test_half_cap_d1():
    geom = SphereGeometry(2, 1)
    c = 0.7
    prof = StepProfile.indicator(c / 2, 1.0)
    expected = 1 - (2 / math.pi) * math.asin(0.5)
    assert expected == pytest.approx(2 / 3, rel=1e-15)
    th = math.acos(c)
    assert abel_step_closed_d1(geom, prof, th) == pytest.approx(expected, rel=1e-14)
    assert abel_step_closed(geom, prof, th) == pytest.approx(expected, rel=1e-13)
    assert abel_numeric(geom, prof, [th]).values[0] == pytest.approx(expected, rel=1e-9)
    assert abel_step_closed_d1(geom, StepProfile.indicator(0.0, c), th) == pytest.approx(1.0)


def test_profile_above_cos_theta_gives_zero():
    th = 1.1
    prof = StepProfile.indicator(math.cos(th), 1.0)
    for geom in GEOMS:
        assert abel_step_closed(geom, prof, th) == 0.0
        assert abel_numeric(geom, prof, [th]).values[0] == 0.0


@pytest.mark.parametrize("geom", GEOMS, ids=lambda g: g.tag)
def test_closed_forms_against_quadrature(geom):
    prof = random_step_profile(17, 5, (0.0, 1.0))
    prof = StepProfile(prof.intervals, (1.0, 2.0, 0.5, 3.0, 1.5))
    thetas = [0.0, 0.31, 0.77, 1.2, 1.5]
    closed = abel_step_closed(geom, prof, thetas)
    oracle = [_quad_oracle(geom.d, prof, t) for t in thetas]
    assert closed == pytest.approx(oracle, rel=1e-11, abs=1e-14)
    for form in ("u", "r"):
        assert abel_numeric(geom, prof, thetas, form=form).values == \
            pytest.approx(oracle, rel=1e-8, abs=1e-12)


def test_d1_closed_forms_agree():
    geom = SphereGeometry(3, 1)
    prof = random_step_profile(2, 9, (0.0, 1.0))
    theta = np.linspace(0.0, HALF_PI, 57)
    assert abel_step_closed_d1(geom, prof, theta) == \
        pytest.approx(abel_step_closed(geom, prof, theta), rel=1e-12, abs=1e-14)


def test_full_sphere_depends_on_even_part():
    geom = SphereGeometry(4, 3)
    fn = lambda u: np.exp(u) + (u > 0.3)
    theta = [0.1, 0.6, 1.1]
    full = abel_full_sphere(geom, fn, theta, breakpoints=[0.3])
    folded = abel_numeric(geom, even_part(fn, breakpoints=[0.3]), theta)
    assert full.values == pytest.approx(folded.values, rel=1e-9)
    odd = abel_full_sphere(geom, lambda u: u ** 3, theta)
    assert np.max(np.abs(odd.values)) < 1e-12


def test_catalan_small_sample():
    lhs, rhs, diff, err = catalan_check(2, [0, 0, 1], samples=50_000, seed=4)
    assert rhs == pytest.approx(1 / 3, rel=1e-12)
    assert diff <= 4 * err
    lhs, rhs, diff, err = catalan_check(2, [0, 1], samples=50_000, seed=4)
    assert abs(rhs) < 1e-14 and diff <= 4 * err
    lhs, rhs, _, _ = catalan_check(3, [1], samples=1000)
    assert lhs == pytest.approx(1.0) and rhs == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ArgumentError):
        catalan_check(1, [1])


def test_lorentz_norms():
    a = 0.35
    assert sphere_lorentz_norm(StepProfile.indicator(a, 1.0), SphereGeometry(2, 1),
                               LorentzIndex(1, 1)) == pytest.approx(1 - a, rel=1e-13)
    # cap norms scale like (1 - a)^{n/(2p)} as a -> 1
    geom, p = SphereGeometry(4, 1), 2.0
    ratios = [sphere_lorentz_norm(StepProfile.indicator(1 - e, 1.0), geom, LorentzIndex(p, 1))
              / e ** (geom.n / (2 * p)) for e in (1e-3, 1e-4, 1e-5)]
    assert ratios[2] == pytest.approx(ratios[1], rel=1e-3)
    assert ratios[1] == pytest.approx(ratios[0], rel=1e-2)


def test_endpoint_ratios():
    val, arg = weighted_endpoint_ratio(SphereGeometry(2, 1), ONE)
    assert val == pytest.approx(1.0, rel=1e-13) and arg == pytest.approx(0.0, abs=1e-7)
    val, _ = weighted_endpoint_ratio(SphereGeometry(3, 2), ONE)
    assert val == pytest.approx((4 / math.pi) ** (2 / 3), rel=1e-12)


def test_endpoint_regression_fixture():
    geom = SphereGeometry(4, 1)
    prof = random_step_profile(5, 16, (0.0, 1.0))
    val, _ = weighted_endpoint_ratio(geom, prof)
    assert val == pytest.approx(0.8666439411221597, rel=1e-12)
    theta = np.linspace(0.0, HALF_PI, 100_000)
    norm = sphere_lorentz_norm(prof, geom, LorentzIndex(4.0, 1.0))
    brute = np.cos(theta) * abel_step_closed_d1(geom, prof, theta) / norm
    assert np.max(brute) <= val * (1 + 1e-12)
    assert np.max(brute) == pytest.approx(val, rel=1e-4)


def test_weak_norm_witness_and_constant():
    geom = SphereGeometry(3, 2)
    w = geom.target_measure
    theta = np.linspace(0.0, HALF_PI * (1 - 1e-7), 4001)
    ones = TransformCurve.from_function(theta, np.ones_like, support_upper=HALF_PI)
    total = w.integrate(0.0, HALF_PI)
    assert weak_norm(ones, geom) == pytest.approx(total ** (1 / 3), rel=1e-9)
    # 1/cos: lam <= 1 gives lam * total^{1/3}; above 1 the level sets shrink faster
    lams = np.geomspace(1.0, 1e3, 2000)
    tail = [lam * w.integrate(math.acos(1 / lam), HALF_PI) ** (1 / 3) for lam in lams[1:]]
    oracle = max(total ** (1 / 3), max(tail))
    inv = TransformCurve.from_function(theta, lambda x: 1.0 / np.cos(x), support_upper=HALF_PI)
    assert weak_norm(inv, geom) == pytest.approx(oracle, rel=1e-6)
    zero = TransformCurve(theta, np.zeros_like(theta), np.zeros_like(theta))
    assert weak_norm(zero, geom) == 0.0


def test_lp_ratios():
    geom = SphereGeometry(3, 1)
    assert lp_ratio(geom, ONE, math.inf) == pytest.approx(1.0)
    assert math.isfinite(weighted_lq_ratio(geom, StepProfile.indicator(0.2, 0.9), 2.0))
    with pytest.raises(ArgumentError):
        weighted_lq_ratio(geom, ONE, geom.critical_p)


def test_d1_comparison_bounds():
    for seed in range(5):
        prof = random_step_profile(seed, 12, (0.0, 1.0))
        theta = np.linspace(0.05, 1.5, 41)
        val, lower, upper, _ = d1_comparison(prof, theta)
        assert np.all(lower <= val * (1 + 1e-12) + 1e-15)
        assert np.all(val <= upper * (1 + 1e-12) + 1e-15)
    with pytest.raises(ArgumentError):
        d1_comparison(StepProfile(((0.0, 0.5),), (2.0,)), [0.3])


def test_flat_counterexample():
    geom = SphereGeometry(3, 1)
    a_list = [2.0 ** -i for i in range(1, 21)]
    rows = counterexample_flat(geom, a_list, geom.critical_p)
    assert all(sup == pytest.approx(1.0, rel=1e-14) for _, sup, _ in rows)
    norms = [r[2] for r in rows]
    assert all(a > b for a, b in zip(norms, norms[1:]))
    # mu[0, a] = int_{arccos a}^{pi/2} sin^2 ~ a, so the norm scales like a^{d/n}
    scaled = [nrm / a ** (geom.d / geom.n) for a, _, nrm in rows]
    assert scaled[-1] == pytest.approx(scaled[-2], rel=1e-4)
    with pytest.raises(ArgumentError):
        counterexample_flat(geom, a_list, math.inf)


def test_cap_counterexample():
    geom = SphereGeometry(2, 1)
    ms = np.unique(np.geomspace(100, 10_000, 9).astype(int))
    rows = counterexample_cap(geom, 1.0, ms)
    logm = np.log(ms + 1.0)
    slope_norm = np.polyfit(logm, np.log([r[1] for r in rows]), 1)[0]
    slope_low = np.polyfit(logm, np.log([r[2] for r in rows]), 1)[0]
    assert slope_norm == pytest.approx(-1.0, abs=0.05)
    assert slope_low >= -0.55
    a = (ms[0] - 1) / (ms[0] + 1)
    c = 0.5 * ((ms[0] - 1) / ms[0] + ms[0] / (ms[0] + 1))
    assert rows[0][2] == pytest.approx(c * special.betainc(0.5, 0.5, 1 - (a / c) ** 2), rel=1e-9)
    with pytest.raises(ArgumentError):
        counterexample_cap(geom, 1.0, [1])


def test_argument_errors():
    geom = SphereGeometry(3, 2)
    with pytest.raises(ArgumentError):
        SphereGeometry(3, 3)
    with pytest.raises(ArgumentError):
        abel_step_closed(geom, ONE, 2.0)
    with pytest.raises(ArgumentError):
        abel_step_closed(geom, StepProfile.indicator(0.0, 2.0), 0.0)
    with pytest.raises(ArgumentError):
        abel_step_closed_d1(geom, ONE, 0.0)
    with pytest.raises(ArgumentError):
        abel_numeric(geom, ONE, [0.0], form="x")
    with pytest.raises(ArgumentError):
        sphere_lorentz_norm(None, geom, LorentzIndex(1, 1))


def test_general_profile_numeric():
    # f(u) = u on d = 2: A = (1/c) int_0^c u (c^2-u^2)^0 du * C = c/2
    geom = SphereGeometry(3, 2)
    prof = RadialProfile(lambda u: np.asarray(u, dtype=float), 1.0)
    theta = np.array([0.2, 0.9])
    assert abel_numeric(geom, prof, theta).values == pytest.approx(np.cos(theta) / 2, rel=1e-10)
