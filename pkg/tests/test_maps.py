import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mobius_lgi.extended import DOWN, INFINITY, UP, QubitState, point_to_state, state_to_point
from mobius_lgi.maps import (
    IDENTITY,
    SWAP,
    FlcMap,
    MapKind,
    PauliParams,
    apply,
    apply_to_state,
    classify,
    compose,
    from_pauli,
    nonlinearity_witness,
    projectively_equal,
    ratio_constraint_satisfied,
    ratio_form_map,
)

coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@st.composite
def maps(draw):
    a, b, c, d = draw(coef), draw(coef), draw(coef), draw(coef)
    assume(abs(a * d - b * c) > 1e-3)
    return FlcMap(a, b, c, d)


def test_singular_map_rejected_with_coefficients():
    with pytest.raises(ValueError, match="singular"):
        FlcMap(1, 2, 2, 4)
    with pytest.raises(ValueError):
        FlcMap(complex("nan"), 0, 0, 1)


def test_apply_examples():
    assert apply(IDENTITY, 3 + 4j) == 3 + 4j
    assert apply(SWAP, 0) is INFINITY
    assert apply(SWAP, INFINITY) == 0
    assert apply(FlcMap(1, 1j, 1j, 1), 0) == 1j
    assert apply(FlcMap(1, 0, 0, 2), INFINITY) is INFINITY
    # pole
    assert apply(FlcMap(1, 0, 1, -2), 2) is INFINITY


def test_apply_to_state_examples():
    psi = QubitState(0.6, 0.8j)
    assert apply_to_state(IDENTITY, psi).same_ray(psi)
    assert apply_to_state(SWAP, DOWN).same_ray(UP)
    out = apply_to_state(FlcMap(2, 0, 0, 1), QubitState(1, 1))
    assert np.allclose(np.abs(out.vector), [2 / math.sqrt(5), 1 / math.sqrt(5)])


def test_compose_examples():
    f = FlcMap(1 + 1j, 2, -0.5j, 3)
    assert compose(IDENTITY, f) == f
    a1, b1, a2, b2 = 1.2, 0.3j, 0.7, -0.4 + 0.1j
    g = compose(FlcMap(a2, b2, b2, a2), FlcMap(a1, b1, b1, a1))
    s, t = a1 * a2 + b1 * b2, b1 * a2 + a1 * b2
    assert np.allclose(g.coeffs, (s, t, t, s))
    assert projectively_equal(compose(SWAP, SWAP), IDENTITY)
    assert (SWAP @ SWAP) == compose(SWAP, SWAP)


@given(maps(), maps(), st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False))
def test_compose_matches_sequential_application(f12, f23, z):
    f13 = compose(f23, f12)
    direct = apply(f23, apply(f12, z))
    via = apply(f13, z)
    if direct is INFINITY or via is INFINITY:
        # both sides blow up together, up to rounding near a pole
        other = via if direct is INFINITY else direct
        assert other is INFINITY or abs(other) > 1e6
    else:
        assert abs(direct - via) <= 1e-6 * max(1.0, abs(direct))


@given(maps(), st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False))
def test_point_and_state_action_agree(f, z):
    w = apply(f, z)
    s = apply_to_state(f, point_to_state(z))
    assert point_to_state(w).same_ray(s, 1e-8)


@given(maps(), coef.filter(lambda x: abs(x) > 1e-3))
def test_projective_scaling(f, lam):
    assert projectively_equal(f, f.scaled(lam), 1e-8)
    assert ratio_constraint_satisfied(f, 1e-8) == ratio_constraint_satisfied(f.scaled(lam), 1e-8)


def test_from_pauli_examples():
    assert from_pauli(PauliParams(alpha=1)) == IDENTITY
    assert from_pauli(PauliParams(alpha=2, beta=0.5j)).coeffs == (2, 0.5j, 0.5j, 2)
    assert from_pauli(PauliParams(zeta=1)).coeffs == (1, 0, 0, -1)
    with pytest.raises(ValueError):
        from_pauli(PauliParams())


def test_from_pauli_matches_matrix_sum():
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1, -1])
    p = PauliParams(0.3 + 1j, -0.2, 0.5j, 1.1)
    m = p.alpha * np.eye(2) + p.beta * sx + p.gamma * sy + p.zeta * sz
    assert np.allclose(from_pauli(p).matrix, m)


def test_classify_examples():
    t = 0.37
    assert classify(FlcMap(math.cos(t), math.sin(t), -math.sin(t), math.cos(t))).kind is MapKind.UNITARY
    c = classify(IDENTITY.scaled(3))
    assert c.kind is MapKind.UNITARY_SCALED and c.r == pytest.approx(9)
    assert classify(FlcMap(1.3, 0.4 + 0.7j, 0.4 + 0.7j, 1.3)).kind is MapKind.NON_LINEAR
    # a global phase does not change the class
    assert classify(FlcMap(1, 1j, 1j, 1).scaled(cmath.exp(0.3j)).normalized()).kind is MapKind.UNITARY


def test_nonlinearity_witness_examples():
    u = FlcMap(0.6, 0.8j, 0.8j, 0.6)
    assert classify(u).is_linear
    assert nonlinearity_witness(u, 0.3 + 0.1j, -0.9) <= 1e-12
    assert nonlinearity_witness(IDENTITY.scaled(5), 1, 1j) <= 1e-12
    # oracle: normalize (2,1) vs normalized (1,1)
    lhs = np.array([2, 1]) / math.sqrt(5)
    rhs = np.array([1, 1]) / math.sqrt(2)
    expect = math.sqrt(2 - 2 * abs(lhs @ rhs))
    got = nonlinearity_witness(FlcMap(2, 0, 0, 1), 1 / math.sqrt(2), 1 / math.sqrt(2))
    assert got > 0 and got == pytest.approx(expect, abs=1e-14)


def test_nonlinearity_witness_custom_basis():
    basis = (QubitState(1, 1), QubitState(1, -1))
    assert nonlinearity_witness(FlcMap(0.6, 0.8, -0.8, 0.6), 0.2, 0.7j, basis) <= 1e-12
    with pytest.raises(ValueError):
        nonlinearity_witness(IDENTITY, 1, 1, (UP, QubitState(1, 1)))


def test_ratio_constraint_examples():
    a, b = 1.3 - 0.2j, 0.4 + 0.9j
    assert ratio_constraint_satisfied(FlcMap(a, b, b, a))
    assert ratio_constraint_satisfied(FlcMap(a, b, b.conjugate(), a.conjugate()))
    assert not ratio_constraint_satisfied(FlcMap(2, 1, 1, 1))


@given(st.sampled_from("i ii iii iv".split()), coef, coef, st.sampled_from([1, -1]))
def test_ratio_form_rows_are_ratio_constrained(row, a, b, s):
    try:
        f = ratio_form_map(row, a, b, s)
    except ValueError:
        return
    assert ratio_constraint_satisfied(f, 1e-9)


@given(st.sampled_from("i ii iii iv".split()), coef, coef, coef, coef, st.sampled_from([1, -1]))
def test_ratio_form_rows_closed_under_composition(row, a1, b1, a2, b2, s):
    try:
        f = ratio_form_map(row, a1, b1, s)
        g = ratio_form_map(row, a2, b2, s)
        h = compose(g, f)
    except ValueError:
        return
    assert ratio_constraint_satisfied(h, 1e-8)


def test_ratio_form_unknown_row():
    with pytest.raises(ValueError):
        ratio_form_map("v", 1, 0)


def test_ratio_form_mixed_signs_not_closed():
    # (z + 2)/(-2z + 1) followed by (z + 2)/(-2z - 1)
    h = compose(ratio_form_map("ii", 1, 2, -1), ratio_form_map("ii", 1, 2, 1))
    assert not ratio_constraint_satisfied(h)


def test_witness_needs_other_basis_when_columns_have_equal_norm():
    f = FlcMap(2, 1, 1, 2)
    assert classify(f).kind is MapKind.NON_LINEAR
    assert nonlinearity_witness(f, 0.6, 0.8j) <= 1e-12
    basis = (QubitState(1, 1), QubitState(1, -1))
    assert nonlinearity_witness(f, 0.6, 0.8j, basis) > 1e-3
