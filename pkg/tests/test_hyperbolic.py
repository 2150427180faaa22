import math

import numpy as np
import pytest
from scipy import integrate, optimize

from radon_radial.curves import TransformCurve, curve_weak_norm
from radon_radial.errors import AccuracyError, ArgumentError
from radon_radial.hyperbolic import (HyperbolicGeometry, abel_numeric, abel_step_closed,
                                     closed_curve, divergence_probe, endpoint_bound_ratio,
                                     hn_lorentz_norm, l1_ratio_constant, lp_lq_ratio, to_r_variable,
                                     to_t_variable, weak_norm_decay, xi_norm)
from radon_radial.lorentz import LorentzIndex
from radon_radial.profiles import StepProfile, random_step_profile

H32 = HyperbolicGeometry(3, 2)
BAND = StepProfile.indicator(1.0, 2.0)
U_MAX = math.acosh(2.0)


def _d2_closed(s):
    c = math.cosh(s)
    return 2 * math.pi / c * max(2.0 - c, 0.0)


@pytest.mark.parametrize("s", [0.0, math.acosh(1.5), 1.0, 1.4])
def test_d2_transform(s):
    expected = _d2_closed(s)
    assert abel_step_closed(H32, BAND, s) == pytest.approx(expected, rel=1e-14, abs=1e-15)
    for form in ("t", "r"):
        assert abel_numeric(H32, BAND, [s], form=form).values[0] == \
            pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_listed_values():
    assert abel_step_closed(H32, BAND, 0.0) == pytest.approx(2 * math.pi, rel=1e-15)
    assert abel_step_closed(H32, BAND, math.acosh(1.5)) == pytest.approx(2 * math.pi / 3, rel=1e-14)


@pytest.mark.parametrize("geom", [HyperbolicGeometry(3, 1), HyperbolicGeometry(4, 3),
                                  HyperbolicGeometry(6, 4), HyperbolicGeometry(5, 2)])
def test_closed_and_numeric_agree(geom):
    prof = random_step_profile(13, 5, (1.0, 6.0))
    prof = StepProfile(prof.intervals, (1.0, 2.0, 0.5, 3.0, 1.5))
    s = np.linspace(0.0, 2.4, 17) + 0.0123
    closed = abel_step_closed(geom, prof, s)
    for form in ("t", "r"):
        assert abel_numeric(geom, prof, s, form=form).values == \
            pytest.approx(closed, rel=1e-8, abs=1e-12)


def test_support_below_cosh_s():
    assert abel_step_closed(H32, BAND, 2.0) == 0.0
    assert abel_numeric(H32, BAND, [2.0]).values[0] == 0.0


def test_variable_round_trip():
    prof = StepProfile(((0.0, 0.5), (1.0, 2.0)), (1.0, 3.0))
    back = to_r_variable(to_t_variable(prof))
    assert np.allclose(back.lower, prof.lower, atol=1e-12)
    assert np.allclose(back.upper, prof.upper, rtol=1e-14)


def test_xi_norm_of_band_transform():
    # p = 1 against cosh^2 u du, independent quadrature of the closed form
    oracle, _ = integrate.quad(lambda u: _d2_closed(u) * math.cosh(u) ** 2, 0.0, U_MAX,
                               epsabs=0, epsrel=1e-13)
    curve = closed_curve(H32, BAND, np.linspace(0.0, U_MAX, 65))
    assert xi_norm(curve, H32, 1) == pytest.approx(oracle, rel=1e-11)
    u = U_MAX
    antider = 2 * math.pi * (2 * math.sinh(u) - (u + math.sinh(u) * math.cosh(u)) / 2)
    assert oracle == pytest.approx(antider, rel=1e-12)
    assert oracle == pytest.approx(6.74545, abs=1e-5)


def test_xi_norm_degenerate_curves():
    s = np.linspace(0.0, 5.0, 51)
    with pytest.raises(AccuracyError):
        xi_norm(TransformCurve(s, np.ones_like(s), np.zeros_like(s)), H32, 1)
    assert xi_norm(TransformCurve(s, np.zeros_like(s), np.zeros_like(s)), H32, 2) == 0.0


def test_hn_lorentz_norms():
    radius = 1.3
    ball = StepProfile.indicator(0.0, radius)
    vol = 4 * math.pi * (math.sinh(radius) * math.cosh(radius) - radius) / 2
    assert hn_lorentz_norm(ball, H32, LorentzIndex(1, 1), variable="r") == pytest.approx(vol,
                                                                                        rel=1e-13)
    assert hn_lorentz_norm(to_t_variable(ball), H32, LorentzIndex(2, 1)) == \
        pytest.approx(math.sqrt(vol), rel=1e-12)
    with pytest.raises(ArgumentError):
        hn_lorentz_norm(None, H32, LorentzIndex(1, 1))


def test_band_endpoint_ratio():
    moment, _ = integrate.quad(lambda t: math.sinh(t) ** 2, 0.0, U_MAX, epsrel=1e-13)
    res = endpoint_bound_ratio(H32, BAND)
    assert res.weighted_ratio == pytest.approx(2 * math.pi / math.sqrt(moment), rel=1e-12)
    assert res.weighted_ratio == pytest.approx(6.064, abs=5e-4)
    assert res.weighted_argmax == pytest.approx(0.0, abs=1e-6)


def test_endpoint_regression_fixture():
    geom = HyperbolicGeometry(4, 2)
    prof = random_step_profile(3, 32, (1.0, 10.0))
    res = endpoint_bound_ratio(geom, prof)
    assert res.weighted_ratio == pytest.approx(4.4359024255694814, rel=1e-12)
    assert res.plain_ratio == pytest.approx(1.6413658913628433, rel=1e-12)
    r_prof = to_r_variable(prof)
    moment = sum(integrate.quad(lambda t: math.sinh(t) ** 3, a, b, epsrel=1e-13)[0]
                 for a, b in r_prof.intervals)
    s = np.linspace(0.0, r_prof.support_upper, 100_000)
    brute = np.cosh(s) * abel_step_closed(geom, prof, s) / math.sqrt(moment ** (2 / 3)) ** 1
    assert np.max(brute) <= res.weighted_ratio * (1 + 1e-9)
    assert np.max(brute) == pytest.approx(res.weighted_ratio, rel=1e-5)


def test_endpoint_geometry_errors():
    with pytest.raises(ArgumentError):
        endpoint_bound_ratio(HyperbolicGeometry(2, 1), BAND)
    with pytest.raises(ArgumentError):
        weak_norm_decay(HyperbolicGeometry(3, 1), BAND)


def test_weak_norm_of_inverse_cosh():
    # lam * mu{1/cosh u > lam}^{1/2}, mu = cosh^2 u du
    def objective(log_lam):
        lam = math.exp(log_lam)
        u = math.acosh(1.0 / lam)
        return -lam * math.sqrt(0.5 * (u + math.sinh(u) * math.cosh(u)))

    best = optimize.minimize_scalar(objective, bounds=(-12.0, -1e-9), method="bounded",
                                    options={"xatol": 1e-12})
    oracle = -best.fun
    s = np.linspace(0.0, 30.0, 3001)
    curve = TransformCurve.from_function(s, lambda u: 1.0 / np.cosh(u))
    assert curve_weak_norm(curve, H32.xi_measure, 2) == pytest.approx(oracle, rel=1e-6)
    assert oracle == pytest.approx(0.774493, abs=1e-6)


def test_weak_norm_decay_of_band():
    val = weak_norm_decay(H32, BAND)
    assert math.isfinite(val) and val > 0


def test_l1_ratio_matches_fubini_constant():
    assert lp_lq_ratio(H32, BAND, 1.0) == pytest.approx(l1_ratio_constant(H32), rel=1e-10)
    assert l1_ratio_constant(H32) == pytest.approx(0.5, rel=1e-14)


def test_lp_lq_ratio_finite_for_d1():
    val = lp_lq_ratio(HyperbolicGeometry(3, 1), BAND, 2.0)
    assert math.isfinite(val) and val > 0


def test_lp_lq_argument_errors():
    with pytest.raises(ArgumentError):
        lp_lq_ratio(H32, BAND, 2.0)
    with pytest.raises(ArgumentError):
        lp_lq_ratio(H32, StepProfile.indicator(0.0, 1.0), 1.0)


def test_divergence_at_critical_exponent():
    vals = divergence_probe(H32, 2.0, [10.0, 100.0, 1000.0, 10000.0])
    for a, b in zip(vals, vals[1:]):
        assert b - a == pytest.approx(math.log(10.0), rel=0.05)
    # exact: I(T) = log(1 + T)
    assert vals[0] == pytest.approx(math.log(11.0), rel=1e-12)


def test_convergence_below_critical_exponent():
    vals = divergence_probe(H32, 1.5, [50.0, 100.0, 200.0, 400.0])
    assert max(abs(b - a) for a, b in zip(vals, vals[1:])) < 1e-6
    with pytest.raises(ArgumentError):
        divergence_probe(H32, 0.9, [10.0])
