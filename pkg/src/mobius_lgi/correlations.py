"""Three-time Leggett-Garg protocol driven by Mobius maps.

The qubit starts at ``z1`` (time t1), is measured in the sigma-z basis, and
each collapsed eigenstate is evolved by the interval map before the next
measurement. ``up`` is the point at infinity and ``down`` the origin, so an
eigenstate evolved by ``f`` lands on ``f(inf) = a/c`` or ``f(0) = b/d`` and
the conditional outcome probabilities are ``weight`` of those points.

Outcome tables are indexed ``[i, j]`` with ``0`` for ``+1`` and ``1`` for ``-1``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Tuple

import numpy as np

from .extended import INFINITY, Point, as_point, polar_point
from .maps import FlcMap, apply, compose

__all__ = [
    "CorrelationFactors",
    "LGResult",
    "Protocol",
    "TwoTimeJoint",
    "correlation",
    "correlation_closed_form",
    "factors",
    "joint_12",
    "joint_13",
    "joint_23",
    "k3",
    "k3_arrays",
    "k3_ratio_constrained",
    "one_time_probs",
    "split",
    "transition_matrix",
]

X_CONVENTIONS = ("evolved", "initial")


def split(z) -> Tuple[float, float]:
    """``(weight(z), 1 - weight(z))`` with both parts computed without cancellation."""
    z = as_point(z)
    if z is INFINITY:
        return 1.0, 0.0
    m = abs(z)
    if m > 1e150:
        q = (1.0 / m) ** 2
        return 1.0 / (1.0 + q), q / (1.0 + q)
    m2 = m * m
    return m2 / (m2 + 1.0), 1.0 / (m2 + 1.0)


@dataclass(frozen=True)
class Protocol:
    """Initial point plus the two interval maps; ``f13`` is always ``f23 o f12``."""

    z1: Point
    f12: FlcMap
    f23: FlcMap
    f13: FlcMap = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "z1", as_point(self.z1))
        object.__setattr__(self, "f13", compose(self.f23, self.f12))

    @classmethod
    def from_polar(cls, r: float, phi: float, f12: FlcMap, f23: FlcMap) -> "Protocol":
        return cls(polar_point(r, phi), f12, f23)

    @property
    def z2(self) -> Point:
        """Unmeasured point at t2."""
        return apply(self.f12, self.z1)

    @property
    def z3(self) -> Point:
        """Unmeasured point at t3."""
        return apply(self.f13, self.z1)

    def interval_map(self, pair) -> FlcMap:
        return {"12": self.f12, "23": self.f23, "13": self.f13}[_pair_key(pair)]


def _pair_key(pair) -> str:
    key = str(pair)
    if key not in ("12", "23", "13"):
        raise ValueError(f"pair must be one of 12, 23, 13; got {pair!r}")
    return key


@dataclass(frozen=True)
class CorrelationFactors:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class TwoTimeJoint:
    pp: float
    pm: float
    mp: float
    mm: float

    @classmethod
    def from_table(cls, t) -> "TwoTimeJoint":
        t = np.asarray(t, dtype=float)
        return cls(t[0, 0], t[0, 1], t[1, 0], t[1, 1])

    @property
    def table(self) -> np.ndarray:
        return np.array([[self.pp, self.pm], [self.mp, self.mm]])

    def __getitem__(self, outcomes) -> float:
        s1, s2 = outcomes
        return self.table[_idx(s1), _idx(s2)]

    @property
    def total(self) -> float:
        return self.pp + self.pm + self.mp + self.mm


def _idx(s) -> int:
    if s in (1, "+"):
        return 0
    if s in (-1, "-"):
        return 1
    raise ValueError(f"outcome must be +1 or -1, got {s!r}")


@dataclass(frozen=True)
class LGResult:
    C12: float
    C23: float
    C13: float
    K3: float

    def to_dict(self) -> dict:
        return asdict(self)


def transition_matrix(f: FlcMap) -> np.ndarray:
    """``T[s, s']``: probability of outcome ``s'`` after evolving eigenstate ``s`` by ``f``."""
    return np.array([split(apply(f, INFINITY)), split(apply(f, 0j))])


def one_time_probs(p: Protocol, k: int) -> Tuple[float, float]:
    """``(P(+), P(-))`` at time ``t_k`` with no earlier measurement."""
    point = {1: p.z1, 2: p.z2, 3: p.z3}.get(k)
    if point is None:
        raise ValueError(f"time index must be 1, 2 or 3; got {k!r}")
    return split(point)


def _joint(marginal, f: FlcMap) -> TwoTimeJoint:
    return TwoTimeJoint.from_table(np.asarray(marginal)[:, None] * transition_matrix(f))


def joint_12(p: Protocol) -> TwoTimeJoint:
    return _joint(split(p.z1), p.f12)


def joint_13(p: Protocol) -> TwoTimeJoint:
    return _joint(split(p.z1), p.f13)


def joint_23(p: Protocol, x_convention: str = "evolved") -> TwoTimeJoint:
    """Measurements at t2 and t3 only; the t2 marginal comes from the unmeasured ``f12(z1)``.

    ``x_convention="initial"`` instead uses the t1 marginal ``weight(z1)``,
    the uniform ``x_ij`` reading of the closed-form correlators.
    """
    return _joint(split(_x_point(p, "23", x_convention)), p.f23)


def _x_point(p: Protocol, pair: str, x_convention: str) -> Point:
    if x_convention not in X_CONVENTIONS:
        raise ValueError(f"x_convention must be one of {X_CONVENTIONS}")
    if pair == "23" and x_convention == "evolved":
        return p.z2
    return p.z1


def correlation(j: TwoTimeJoint) -> float:
    return j.pp + j.mm - j.pm - j.mp


def correlation_closed_form(fac: CorrelationFactors) -> float:
    return 1.0 - 2.0 * fac.z + 2.0 * fac.x * (fac.y + fac.z - 1.0)


def factors(p: Protocol, pair, x_convention: str = "evolved") -> CorrelationFactors:
    key = _pair_key(pair)
    f = p.interval_map(key)
    x = split(_x_point(p, key, x_convention))[0]
    y = split(apply(f, INFINITY))[0]
    z = split(apply(f, 0j))[0]
    return CorrelationFactors(x, y, z)


def k3(p: Protocol, x_convention: str = "evolved") -> LGResult:
    c12 = correlation(joint_12(p))
    c23 = correlation(joint_23(p, x_convention))
    c13 = correlation(joint_13(p))
    return LGResult(c12, c23, c13, c12 + c23 - c13)


def k3_ratio_constrained(z12: float, z23: float, z13: float) -> float:
    """K3 when every map has ``y + z = 1``."""
    return 1.0 - 2.0 * z12 - 2.0 * z23 + 2.0 * z13


def _frac(num2, other2):
    # 0/0 only occurs for singular maps, which callers mask
    with np.errstate(invalid="ignore", divide="ignore"):
        return num2 / (num2 + other2)


def k3_arrays(m12, m23, u, v, x_convention: str = "evolved"):
    """Vectorized ``(C12, C23, C13, K3)`` over broadcastable coefficient arrays.

    ``m12`` and ``m23`` are ``(a, b, c, d)`` tuples of arrays; the initial
    state is given homogeneously as ``z1 = u / v`` so that ``v = 0`` encodes
    the point at infinity. Singular maps are not detected here.
    """
    if x_convention not in X_CONVENTIONS:
        raise ValueError(f"x_convention must be one of {X_CONVENTIONS}")
    a12, b12, c12, d12 = m12
    a23, b23, c23, d23 = m23
    a13 = a12 * a23 + c12 * b23
    b13 = b12 * a23 + d12 * b23
    c13 = a12 * c23 + c12 * d23
    d13 = b12 * c23 + d12 * d23

    u2, v2 = np.abs(u) ** 2, np.abs(v) ** 2
    x = _frac(u2, v2)
    if x_convention == "evolved":
        x23 = _frac(np.abs(a12 * u + b12 * v) ** 2, np.abs(c12 * u + d12 * v) ** 2)
    else:
        x23 = x

    def corr(a, b, c, d, xx):
        y = _frac(np.abs(a) ** 2, np.abs(c) ** 2)
        z = _frac(np.abs(b) ** 2, np.abs(d) ** 2)
        return 1.0 - 2.0 * z + 2.0 * xx * (y + z - 1.0)

    C12 = corr(a12, b12, c12, d12, x)
    C23 = corr(a23, b23, c23, d23, x23)
    C13 = corr(a13, b13, c13, d13, x)
    return C12, C23, C13, C12 + C23 - C13
