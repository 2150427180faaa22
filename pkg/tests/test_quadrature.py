import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from radon_radial.errors import AccuracyError, ArgumentError
from radon_radial.quadrature import (SingularIntegrand, adaptive_integrate, clip_breakpoints,
                                     gauss_legendre_panels, integrate_panels,
                                     integrate_semi_infinite, integrate_singular)


def test_smooth_integrals():
    vals, errs = adaptive_integrate(np.sin, np.array([0.0]), np.array([math.pi]))
    assert vals[0] == pytest.approx(2.0, rel=1e-13)
    assert errs[0] < 1e-9
    val, _ = integrate_panels(np.exp, np.array([0.0, 0.3, 1.0]))
    assert val == pytest.approx(math.e - 1.0, rel=1e-13)


def test_owner_groups_panels_into_outputs():
    lo = np.array([0.0, 1.0, 0.0])
    hi = np.array([1.0, 2.0, 3.0])
    vals, _ = adaptive_integrate(lambda x: x * x, lo, hi, owner=np.array([0, 0, 1]))
    assert vals == pytest.approx([8.0 / 3.0, 9.0], rel=1e-13)


def test_with_owner_passes_the_panel_index():
    lo, hi = np.zeros(3), np.ones(3)
    vals, _ = adaptive_integrate(lambda x, k: (k + 1.0) * x, lo, hi, owner=np.arange(3),
                                 with_owner=True)
    assert vals == pytest.approx([0.5, 1.0, 1.5], rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.9, 3.0), st.floats(-0.9, 3.0))
def test_beta_integrals_with_endpoint_singularities(p, q):
    integrand = SingularIntegrand(lambda t: np.ones_like(t), p, q, factored=True)
    val, _ = integrate_singular(integrand, 0.0, 1.0, rel_tol=1e-11)
    assert val == pytest.approx(special.beta(p + 1.0, q + 1.0), rel=1e-9)


def test_singular_with_breakpoints():
    # int_0^2 x^{-1/2} [x > 1] dx = 2 (sqrt 2 - 1)
    integrand = SingularIntegrand(lambda t: (t > 1.0).astype(float), -0.5, 0.0, factored=True)
    val, _ = integrate_singular(integrand, 0.0, 2.0, rel_tol=1e-12, breakpoints=[1.0])
    assert val == pytest.approx(2.0 * (math.sqrt(2.0) - 1.0), rel=1e-12)


def test_semi_infinite():
    val, _ = integrate_semi_infinite(lambda t: np.exp(-t), 0.0, rel_tol=1e-11)
    assert val == pytest.approx(1.0, rel=1e-10)
    gamma_half = SingularIntegrand(lambda t: np.exp(-t), 0.5, 0.0, factored=True)
    val, _ = integrate_semi_infinite(gamma_half, 0.0, rel_tol=1e-11)
    assert val == pytest.approx(math.gamma(1.5), rel=1e-9)


def test_semi_infinite_divergence_surfaces():
    with pytest.raises(AccuracyError):
        integrate_semi_infinite(lambda t: 1.0 / (1.0 + t), 0.0, rel_tol=1e-8)


def test_gauss_legendre_panels():
    vals = gauss_legendre_panels(lambda x: np.cosh(x), np.array([0.0, 1.0]), np.array([2.0, 5.0]))
    assert vals == pytest.approx([math.sinh(2.0), math.sinh(5.0) - math.sinh(1.0)], rel=1e-14)


def test_argument_errors():
    with pytest.raises(ArgumentError):
        integrate_singular(lambda t: t, 1.0, 1.0)
    with pytest.raises(ArgumentError):
        integrate_singular(lambda t: t, 0.0, 1.0, rel_tol=1e-16)
    with pytest.raises(ArgumentError):
        integrate_singular(lambda t: t, 0.0, math.inf)


def test_accuracy_error_carries_estimate():
    with pytest.raises(AccuracyError) as info:
        adaptive_integrate(lambda x: 1.0 / x, np.array([0.0]), np.array([1.0]), rel_tol=1e-10,
                           max_panels=64)
    assert info.value.estimate is not None


def test_clip_breakpoints():
    assert clip_breakpoints([3.0, 0.0, 1.0, 1.0, 2.0], 0.0, 3.0).tolist() == [1.0, 2.0]


def test_result_independent_of_panel_order():
    lo = np.array([0.0, 0.5, 0.25])
    hi = np.array([0.25, 1.0, 0.5])
    f = lambda x: np.sqrt(x) * np.exp(x)
    a, _ = adaptive_integrate(f, lo, hi, owner=np.zeros(3, dtype=int))
    b, _ = adaptive_integrate(f, lo[::-1], hi[::-1], owner=np.zeros(3, dtype=int))
    assert a[0] == pytest.approx(b[0], rel=1e-13)
