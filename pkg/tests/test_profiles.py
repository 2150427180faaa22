import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radon_radial.errors import ArgumentError, DomainError
from radon_radial.profiles import (RadialMeasure, RadialProfile, StepProfile, load_profile,
                                   philox_generator, profile_from_dict, profile_to_dict, quantize,
                                   random_step_profile, weighted_measure)
from radon_radial.quadrature import integrate_singular


def test_step_profile_validation():
    with pytest.raises(ArgumentError):
        StepProfile(())
    with pytest.raises(ArgumentError):
        StepProfile(((1.0, 0.5),))
    with pytest.raises(ArgumentError):
        StepProfile(((0.0, 2.0), (1.0, 3.0)))
    with pytest.raises(ArgumentError):
        StepProfile(((-1.0, 1.0),))
    with pytest.raises(ArgumentError):
        StepProfile(((0.0, 1.0),), (0.0,))


def test_step_evaluation_is_half_open():
    prof = StepProfile(((0.0, 1.0), (2.0, 3.0)), (1.0, 4.0))
    assert prof.evaluate(np.array([0.0, 0.999, 1.0, 2.0, 2.5, 3.0])).tolist() == [1, 1, 0, 4, 4, 0]
    assert prof(2.5) == 4.0


def test_restrict_dilate_and_map():
    prof = StepProfile(((0.0, 1.0), (2.0, 3.0)))
    assert prof.restrict_above(0.5).intervals == ((0.5, 1.0), (2.0, 3.0))
    assert prof.restrict_above(3.0) is None
    assert prof.dilate(2.0).intervals == ((0.0, 0.5), (1.0, 1.5))
    flipped = prof.map_variable(lambda x: 5.0 - x)
    assert flipped.intervals == ((2.0, 3.0), (4.0, 5.0))


def test_random_family_is_seeded_and_valid():
    a = random_step_profile(3, 16, (1.0, 10.0), index=4)
    b = random_step_profile(3, 16, (1.0, 10.0), index=4)
    c = random_step_profile(3, 16, (1.0, 10.0), index=5)
    assert a == b and a != c
    assert a.count == 16 and a.lower[0] > 1.0 and a.support_upper < 10.0
    assert philox_generator(1, 2).random() == philox_generator(1, 2).random()


def test_lebesgue_and_power_measures():
    assert RadialMeasure.lebesgue().integrate(1.0, 3.0) == pytest.approx(2.0, rel=1e-15)
    assert RadialMeasure.power(2.0, c=3.0).integrate(0.0, 2.0) == pytest.approx(8.0, rel=1e-14)


def test_sinh_squared_measure():
    # 4 pi int_0^1 sinh^2 = 4 pi (sinh 1 cosh 1 - 1) / 2
    m = RadialMeasure(c=4 * math.pi, beta=2)
    expected = 2 * math.pi * (math.sinh(1.0) * math.cosh(1.0) - 1.0)
    assert weighted_measure(StepProfile.indicator(0.0, 1.0), m) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(5.110932706, rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.floats(0.0, 1.5), st.floats(0.01, 0.07))
def test_trig_closed_form_matches_quadrature(delta, eps, a, width):
    m = RadialMeasure(delta=delta, epsilon=eps, domain=(0.0, 0.5 * math.pi))
    b = min(a + width, 0.5 * math.pi)
    val, _ = integrate_singular(lambda t: np.sin(t) ** delta * np.cos(t) ** eps, a, b,
                                rel_tol=1e-12, abs_tol=1e-300)
    assert m.integrate(a, b) == pytest.approx(val, rel=1e-11, abs=1e-300)


def test_mixed_measure_matches_quadrature():
    m = RadialMeasure(alpha=0.5, beta=1, gamma=2)
    val, _ = integrate_singular(lambda t: t ** 0.5 * np.sinh(t) * np.cosh(t) ** 2, 0.2, 3.0,
                                rel_tol=1e-12)
    assert m.integrate(0.2, 3.0) == pytest.approx(val, rel=1e-11)


def test_measure_domain_errors():
    m = RadialMeasure(delta=1, domain=(0.0, 0.5 * math.pi))
    with pytest.raises(DomainError):
        m.integrate(0.0, 2.0)
    with pytest.raises(ArgumentError):
        RadialMeasure(delta=1)


def test_quantize_and_table_profiles():
    prof = RadialProfile.from_table([0.0, 1.0, 2.0], [2.0, 1.0, 0.0])
    steps = quantize(prof, points=1000)
    lebesgue = RadialMeasure.lebesgue()
    assert weighted_measure(steps, lebesgue) == pytest.approx(2.0, rel=1e-6)
    with pytest.raises(ArgumentError):
        RadialProfile.from_table([0.0, 0.0], [1.0, 1.0])


def test_json_round_trip(tmp_path):
    prof = StepProfile(((0.0, 1.0), (2.0, 3.5)), (1.0, 2.5))
    path = tmp_path / "p.json"
    path.write_text(json.dumps(profile_to_dict(prof)))
    assert load_profile(path) == prof
    table = profile_from_dict({"type": "table", "ts": [0, 1], "values": [1, 0]})
    assert table.evaluate(0.5) == pytest.approx(0.5)
    with pytest.raises(ArgumentError):
        profile_from_dict({"type": "spline"})
