import math

import numpy as np
import pytest

import oracle
from mobius_lgi.correlations import (
    CorrelationFactors,
    Protocol,
    TwoTimeJoint,
    correlation,
    correlation_closed_form,
    factors,
    joint_12,
    joint_13,
    joint_23,
    k3,
    k3_arrays,
    k3_ratio_constrained,
    one_time_probs,
    transition_matrix,
)
from mobius_lgi.extended import INFINITY
from mobius_lgi.maps import IDENTITY, SWAP, FlcMap
from mobius_lgi.sweep import UnitaryAngles, unitary_k3, unitary_maps

R1 = 1 + 0j  # a point with r = 1
LAM_I = FlcMap(1, 1j, 1j, 1)


def test_one_time_examples():
    p = Protocol(np.exp(0.4j), LAM_I, SWAP)
    assert one_time_probs(p, 1) == pytest.approx((0.5, 0.5))
    assert one_time_probs(Protocol(0j, IDENTITY, IDENTITY), 1) == (0.0, 1.0)
    assert one_time_probs(Protocol(0j, SWAP, IDENTITY), 2) == (1.0, 0.0)
    with pytest.raises(ValueError):
        one_time_probs(p, 4)


def test_joint_12_examples():
    assert np.allclose(joint_12(Protocol(R1, IDENTITY, IDENTITY)).table, [[0.5, 0], [0, 0.5]])
    assert np.allclose(joint_12(Protocol(R1, SWAP, IDENTITY)).table, [[0, 0.5], [0.5, 0]])
    assert np.allclose(joint_12(Protocol(R1, FlcMap(2, 2j, 2j, 2), IDENTITY)).table, 0.25)


def test_joint_13_examples():
    j = joint_13(Protocol(0.3 + 0.5j, IDENTITY, IDENTITY))
    assert j.pm == 0 and j.mp == 0
    assert np.allclose(joint_13(Protocol(R1, SWAP, SWAP)).table, [[0.5, 0], [0, 0.5]])


def test_joint_13_lambda_i_against_oracle():
    p = Protocol(0.7 - 0.2j, LAM_I, LAM_I)
    m = LAM_I.matrix
    ref = oracle.two_time(oracle.initial_vector(0.7 - 0.2j), [], [m, m])
    assert np.allclose(joint_13(p).table, ref, atol=1e-14)


def test_joint_23_examples():
    assert np.allclose(joint_23(Protocol(R1, IDENTITY, IDENTITY)).table, [[0.5, 0], [0, 0.5]])
    assert np.allclose(joint_23(Protocol(0j, SWAP, IDENTITY)).table, [[1, 0], [0, 0]])


def test_joint_23_conventions_differ():
    p = Protocol(0j, SWAP, IDENTITY)
    assert np.allclose(joint_23(p, "initial").table, [[0, 0], [0, 1]])
    with pytest.raises(ValueError):
        joint_23(p, "other")


def test_two_time_joint_access():
    j = TwoTimeJoint(0.1, 0.2, 0.3, 0.4)
    assert j[1, -1] == 0.2 and j["-", "+"] == 0.3
    assert j.total == pytest.approx(1)
    with pytest.raises(ValueError):
        j[0, 1]


def test_correlation_examples():
    assert correlation(TwoTimeJoint(0.5, 0, 0, 0.5)) == 1
    assert correlation(TwoTimeJoint(0, 0.5, 0.5, 0)) == -1
    assert correlation(TwoTimeJoint(0.25, 0.25, 0.25, 0.25)) == 0


def test_closed_form_examples():
    assert correlation_closed_form(CorrelationFactors(0.5, 1, 0)) == 1
    assert correlation_closed_form(CorrelationFactors(0.123, 0, 1)) == -1
    assert correlation_closed_form(CorrelationFactors(0.5, 0.5, 0.5)) == 0


def test_factors_examples():
    f = factors(Protocol(R1, IDENTITY, IDENTITY), "12")
    assert (f.x, f.y, f.z) == (0.5, 1.0, 0.0)
    f = factors(Protocol(R1, SWAP, IDENTITY), 12)
    assert (f.y, f.z) == (0.0, 1.0)
    f = factors(Protocol(R1, FlcMap(1.5, 1.5j, 1.5j, 1.5), IDENTITY), "12")
    assert f.y == pytest.approx(0.5) and f.z == pytest.approx(0.5)
    with pytest.raises(ValueError):
        factors(Protocol(R1, SWAP, IDENTITY), "21")


def test_closed_form_matches_joint_tables():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = Protocol(oracle.random_point(rng), FlcMap.from_matrix(oracle.random_matrix(rng)),
                     FlcMap.from_matrix(oracle.random_matrix(rng)))
        joints = {"12": joint_12(p), "23": joint_23(p), "13": joint_13(p)}
        for pair, j in joints.items():
            assert correlation_closed_form(factors(p, pair)) == pytest.approx(correlation(j), abs=1e-13)


def test_k3_examples():
    assert k3(Protocol(0.2j, IDENTITY, IDENTITY)).K3 == pytest.approx(1)
    res = k3(Protocol(0.2j, SWAP, SWAP))
    assert (res.C12, res.C23, res.C13, res.K3) == pytest.approx((-1, -1, 1, -3))
    f12, f23 = unitary_maps(math.pi / 6, math.pi / 6)
    assert k3(Protocol(0.4, f12, f23)).K3 == pytest.approx(1.5, abs=1e-12)
    assert set(res.to_dict()) == {"C12", "C23", "C13", "K3"}


def test_k3_ratio_constrained_examples():
    assert k3_ratio_constrained(0, 0, 0) == 1
    assert k3_ratio_constrained(1, 1, 1) == -1
    assert k3_ratio_constrained(0, 0, 1) == 3


def test_transition_matrix_rows_sum_to_one():
    t = transition_matrix(FlcMap(1, 2, 3, 4j))
    assert np.allclose(t.sum(axis=1), 1)


def test_infinite_initial_point():
    p = Protocol(INFINITY, SWAP, IDENTITY)
    assert one_time_probs(p, 1) == (1.0, 0.0)
    assert p.z2 == 0


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(2)
    n = 300
    m12 = [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(4)]
    m23 = [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(4)]
    u = rng.normal(size=n) + 1j * rng.normal(size=n)
    v = np.where(rng.random(n) < 0.1, 0, 1).astype(complex)
    for conv in ("evolved", "initial"):
        out = k3_arrays(m12, m23, u, v, conv)
        for k in range(n):
            z = INFINITY if v[k] == 0 else u[k]
            p = Protocol(z, FlcMap(*(c[k] for c in m12)), FlcMap(*(c[k] for c in m23)))
            r = k3(p, conv)
            assert np.allclose([o[k] for o in out], [r.C12, r.C23, r.C13, r.K3], atol=1e-12)


def test_unitary_examples_with_corrected_phase_term():
    assert unitary_k3(UnitaryAngles(0, 0, 0)) == 1
    assert unitary_k3(UnitaryAngles(math.pi / 4, math.pi / 4, 0)) == pytest.approx(1)
    assert unitary_k3(UnitaryAngles(math.pi / 4, math.pi / 4, math.pi)) == pytest.approx(-1)
    assert unitary_k3(UnitaryAngles(math.pi / 6, math.pi / 6, 0)) == pytest.approx(1.5)
    assert unitary_k3(UnitaryAngles(math.pi / 6, math.pi / 6, math.pi / 2)) == pytest.approx(0.75)
