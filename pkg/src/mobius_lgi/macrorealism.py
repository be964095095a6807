"""Arrow-of-time (AoT) and no-signalling-in-time (NSIT) checks.

Every condition compares a distribution with a marginal of a distribution in
which one more measurement was made; the residual is the largest absolute
difference over the outcome assignments.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .correlations import (
    Protocol,
    joint_12,
    joint_13,
    joint_23,
    one_time_probs,
    split,
    transition_matrix,
)
from .extended import INFINITY, Point, as_point
from .maps import FlcMap

__all__ = [
    "AOT_CONDITIONS",
    "NSIT_CONDITIONS",
    "ConditionResult",
    "LambdaPair",
    "MacrorealismReport",
    "TripleJoint",
    "check_aot",
    "check_nsit",
    "symmetric_protocol",
    "macrorealism_report",
    "nsit123_analytic",
    "nsit123_paper_conditions",
    "nsit_closed_forms",
    "triple_joint",
]

DEFAULT_TOL = 1e-10

AOT_CONDITIONS = ("AoT_1(2)", "AoT_1(3)", "AoT_2(3)", "AoT_12(3)", "AoT_1(23)")
NSIT_CONDITIONS = ("NSIT_(1)2", "NSIT_(2)3", "NSIT_(1)3", "NSIT_1(2)3", "NSIT_(1)23")


@dataclass(frozen=True)
class TripleJoint:
    """``P(m1, m2, m3)`` with every time measured; ``table[i, j, k]``, 0 is ``+``."""

    table: np.ndarray

    def __getitem__(self, outcomes) -> float:
        idx = tuple(0 if s in (1, "+") else 1 for s in outcomes)
        return float(self.table[idx])

    @property
    def total(self) -> float:
        return float(self.table.sum())

    def to_dict(self) -> dict:
        out = {}
        for i, s1 in enumerate("+-"):
            for j, s2 in enumerate("+-"):
                for k, s3 in enumerate("+-"):
                    out[s1 + s2 + s3] = float(self.table[i, j, k])
        return out


def triple_joint(p: Protocol) -> TripleJoint:
    p1 = np.asarray(split(p.z1))
    t12 = transition_matrix(p.f12)
    t23 = transition_matrix(p.f23)
    return TripleJoint(p1[:, None, None] * t12[:, :, None] * t23[None, :, :])


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    residual: float
    satisfied: bool


@dataclass
class MacrorealismReport:
    conditions: List[ConditionResult] = field(default_factory=list)
    triple: Optional[TripleJoint] = None

    def __getitem__(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.condition == name:
                return c
        raise KeyError(name)

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.conditions)

    def to_json_obj(self):
        rows = [asdict(c) for c in self.conditions]
        if self.triple is None:
            return rows
        return {"conditions": rows, "triple_joint": self.triple.to_dict()}


def _tables(p: Protocol):
    return dict(
        P1=np.asarray(one_time_probs(p, 1)),
        P2=np.asarray(one_time_probs(p, 2)),
        P3=np.asarray(one_time_probs(p, 3)),
        J12=joint_12(p).table,
        J13=joint_13(p).table,
        J23=joint_23(p).table,
        T=triple_joint(p).table,
    )


def _result(name, lhs, rhs, tol) -> ConditionResult:
    r = float(np.max(np.abs(np.asarray(lhs) - np.asarray(rhs))))
    return ConditionResult(name, r, r <= tol)


def check_aot(p: Protocol, tol: float = DEFAULT_TOL, _t=None) -> MacrorealismReport:
    t = _t or _tables(p)
    return MacrorealismReport([
        _result("AoT_1(2)", t["P1"], t["J12"].sum(axis=1), tol),
        _result("AoT_1(3)", t["P1"], t["J13"].sum(axis=1), tol),
        _result("AoT_2(3)", t["P2"], t["J23"].sum(axis=1), tol),
        _result("AoT_12(3)", t["J12"], t["T"].sum(axis=2), tol),
        _result("AoT_1(23)", t["P1"], t["T"].sum(axis=(1, 2)), tol),
    ])


def check_nsit(p: Protocol, tol: float = DEFAULT_TOL, _t=None) -> MacrorealismReport:
    t = _t or _tables(p)
    return MacrorealismReport([
        _result("NSIT_(1)2", t["P2"], t["J12"].sum(axis=0), tol),
        _result("NSIT_(2)3", t["P3"], t["J23"].sum(axis=0), tol),
        _result("NSIT_(1)3", t["P3"], t["J13"].sum(axis=0), tol),
        _result("NSIT_1(2)3", t["J13"], t["T"].sum(axis=1), tol),
        # J23 has no t1 measurement; the triple does
        _result("NSIT_(1)23", t["J23"], t["T"].sum(axis=0), tol),
    ])


def macrorealism_report(p: Protocol, tol: float = DEFAULT_TOL) -> MacrorealismReport:
    t = _tables(p)
    rows = check_aot(p, tol, t).conditions + check_nsit(p, tol, t).conditions
    return MacrorealismReport(rows, TripleJoint(t["T"]))


@dataclass(frozen=True)
class LambdaPair:
    """``lam1 = beta1/alpha1`` and ``lam2 = beta2/alpha2`` of two ``(az + b)/(bz + a)`` maps."""

    lam1: Point
    lam2: Point

    def __post_init__(self):
        object.__setattr__(self, "lam1", as_point(self.lam1))
        object.__setattr__(self, "lam2", as_point(self.lam2))


def _symmetric_map(lam: Point) -> FlcMap:
    if lam is INFINITY:
        return FlcMap(0, 1, 1, 0)
    return FlcMap(1, lam, lam, 1)


def symmetric_protocol(lam: LambdaPair, z1) -> Protocol:
    """Protocol with ``f_k(z) = (z + lam_k) / (lam_k z + 1)``."""
    return Protocol(z1, _symmetric_map(lam.lam1), _symmetric_map(lam.lam2))


def _finite_pair(lam: LambdaPair):
    if lam.lam1 is INFINITY or lam.lam2 is INFINITY:
        raise ValueError("closed forms need finite lambdas")
    return complex(lam.lam1), complex(lam.lam2)


def nsit123_analytic(lam: LambdaPair, tol: float = DEFAULT_TOL) -> bool:
    """Whether NSIT_1(2)3 holds for the symmetric-map protocol, for every initial state.

    All four comparisons collapse to one real equation,
    ``Re(l1 l2) (|l1|^2 + |l2|^2) = Re(l1 conj(l2)) (1 + |l1 l2|^2)``,
    tested after dividing by ``((1 + |l1|^2)(1 + |l2|^2))^2``. Lambdas of
    ``+-1`` give a singular map and are rejected.
    """
    l1, l2 = _finite_pair(lam)
    for l in (l1, l2):
        if abs(l * l - 1.0) <= 1e-12 * max(1.0, abs(l) ** 2):
            raise ValueError(f"lambda = {l} makes (z + l)/(l z + 1) singular")
    n1, n2 = abs(l1) ** 2, abs(l2) ** 2
    g = (l1 * l2).real * (n1 + n2) - (l1 * l2.conjugate()).real * (1.0 + n1 * n2)
    return abs(g) / ((1.0 + n1) * (1.0 + n2)) ** 2 <= tol


def nsit123_paper_conditions(lam: LambdaPair, tol: float = DEFAULT_TOL) -> bool:
    """``Re l1 = Im l2 = 0`` or ``Re l2 = Im l1 = 0``.

    Sufficient for NSIT_1(2)3 but not necessary: ``l1 = 0`` with any ``l2``
    also satisfies it, as does ``|l1| = 1`` paired with a real ``l2``.
    """
    l1, l2 = _finite_pair(lam)
    first = abs(l1.real) <= tol and abs(l2.imag) <= tol
    second = abs(l2.real) <= tol and abs(l1.imag) <= tol
    return first or second


def nsit_closed_forms(lam: LambdaPair, r: float):
    """``(P(+1, +3), P(+,+,+) + P(+,-,+))`` for the symmetric-map protocol at ``|z1| = r``."""
    l1, l2 = _finite_pair(lam)
    x = 1.0 if math.isinf(r) else r * r / (1.0 + r * r)
    s = abs(l1 * l2 + 1.0) ** 2
    t = abs(l1 + l2) ** 2
    p13 = x * s / (s + t)
    marg = x * (abs(l1 * l2) ** 2 + 1.0) / ((abs(l1) ** 2 + 1.0) * (abs(l2) ** 2 + 1.0))
    return p13, marg
