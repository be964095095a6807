import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mobius_lgi.extended import (
    DOWN,
    INFINITY,
    UP,
    QubitState,
    as_point,
    point_to_state,
    polar_point,
    state_to_point,
    weight,
)

finite = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


def test_infinity_is_a_singleton():
    from mobius_lgi.extended import Infinity
    assert Infinity() is INFINITY
    assert as_point(complex("inf")) is INFINITY
    assert as_point("inf") is INFINITY


def test_nan_rejected():
    with pytest.raises(ValueError):
        as_point(complex("nan"))


def test_state_to_point_examples():
    assert state_to_point(DOWN) == 0
    assert state_to_point(UP) is INFINITY
    assert state_to_point(QubitState(1 / math.sqrt(2), 1 / math.sqrt(2))) == pytest.approx(1)


def test_point_to_state_examples():
    assert point_to_state(0).same_ray(DOWN)
    assert point_to_state(INFINITY).same_ray(UP)
    s = point_to_state(1)
    assert np.allclose(s.vector, [1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_weight_examples():
    assert weight(0) == 0
    assert weight(INFINITY) == 1
    assert weight(1) == 0.5
    assert weight(1e200) == 1.0


def test_state_normalized_and_rejects_zero():
    s = QubitState(3, 4j)
    assert abs(np.linalg.norm(s.vector) - 1) < 1e-15
    with pytest.raises(ValueError):
        QubitState(0, 0)


def test_polar_point():
    assert polar_point(math.inf) is INFINITY
    assert polar_point(2, math.pi / 2) == pytest.approx(2j)
    with pytest.raises(ValueError):
        polar_point(-1)


@given(finite)
def test_point_round_trip(z):
    back = state_to_point(point_to_state(z))
    assert abs(back - z) <= 1e-9 * max(1.0, abs(z))


@given(finite, st.floats(0, 2 * math.pi))
def test_state_round_trip_up_to_phase(z, phase):
    s = QubitState.from_vector(np.exp(1j * phase) * point_to_state(z).vector)
    assert point_to_state(state_to_point(s)).same_ray(s, 1e-9)


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_weight_monotone(r1, r2):
    lo, hi = sorted((r1, r2))
    assert weight(lo) <= weight(hi)
