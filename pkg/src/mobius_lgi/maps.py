"""Fractional linear conformal (Mobius) maps ``z -> (a z + b) / (c z + d)``.

Besides application and composition this module sorts a map by how its
coefficient matrix acts on normalized states: a unitary, a unitary times a
positive scale (both linear on rays), or a genuinely non-linear action once
renormalization is taken into account.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .extended import DOWN, INFINITY, UP, Point, QubitState, as_point

__all__ = [
    "FlcMap",
    "IDENTITY",
    "SWAP",
    "MapClass",
    "MapKind",
    "PauliParams",
    "RATIO_FORMS",
    "apply",
    "apply_to_state",
    "classify",
    "compose",
    "from_pauli",
    "nonlinearity_witness",
    "projectively_equal",
    "ratio_constraint_satisfied",
    "ratio_defect",
    "ratio_form_map",
]

DET_TOL = 1e-12
STRUCT_TOL = 1e-10


@dataclass(frozen=True)
class FlcMap:
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        coeffs = [complex(x) for x in (self.a, self.b, self.c, self.d)]
        if not all(cmath.isfinite(x) for x in coeffs):
            raise ValueError("map coefficients must be finite")
        for name, x in zip("abcd", coeffs):
            object.__setattr__(self, name, x)
        scale = max(abs(x) for x in coeffs)
        if abs(self.det) <= DET_TOL * scale * scale:
            raise ValueError(
                f"singular map: ad - bc = {self.det!r} for coefficients {tuple(coeffs)!r}"
            )

    @classmethod
    def from_matrix(cls, m) -> "FlcMap":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def scaled(self, lam: complex) -> "FlcMap":
        return FlcMap(lam * self.a, lam * self.b, lam * self.c, lam * self.d)

    def normalized(self) -> "FlcMap":
        """Representative with determinant one (defined up to an overall sign)."""
        s = cmath.sqrt(self.det)
        return FlcMap(self.a / s, self.b / s, self.c / s, self.d / s)

    def __call__(self, z) -> Point:
        return apply(self, z)

    def __matmul__(self, other: "FlcMap") -> "FlcMap":
        # (f @ g)(z) == f(g(z))
        return compose(self, other)


IDENTITY = FlcMap(1, 0, 0, 1)
SWAP = FlcMap(0, 1, 1, 0)


def apply(f: FlcMap, z) -> Point:
    """Evaluate ``f`` on the extended plane, with ``f(-d/c) = inf`` and ``f(inf) = a/c``."""
    z = as_point(z)
    if z is INFINITY:
        if f.c == 0:
            return INFINITY
        return as_point(f.a / f.c)
    den = f.c * z + f.d
    if den == 0:
        return INFINITY
    return as_point((f.a * z + f.b) / den)


def apply_to_state(f: FlcMap, psi: QubitState) -> QubitState:
    """The renormalized image ``M psi / ||M psi||``."""
    return QubitState.from_vector(f.matrix @ psi.vector)


def compose(f23: FlcMap, f12: FlcMap) -> FlcMap:
    """``f13 = f23 o f12``, coefficient by coefficient."""
    a12, b12, c12, d12 = f12.coeffs
    a23, b23, c23, d23 = f23.coeffs
    return FlcMap(
        a12 * a23 + c12 * b23,
        b12 * a23 + d12 * b23,
        a12 * c23 + c12 * d23,
        b12 * c23 + d12 * d23,
    )


def projectively_equal(f: FlcMap, g: FlcMap, tol: float = STRUCT_TOL) -> bool:
    nf = np.array(f.normalized().coeffs)
    ng = np.array(g.normalized().coeffs)
    return min(np.max(np.abs(nf - ng)), np.max(np.abs(nf + ng))) <= tol


@dataclass(frozen=True)
class PauliParams:
    """Coefficients of ``alpha I + beta X + gamma Y + zeta Z``."""

    alpha: complex = 0.0
    beta: complex = 0.0
    gamma: complex = 0.0
    zeta: complex = 0.0


def from_pauli(p: PauliParams) -> FlcMap:
    """Map whose matrix is ``alpha I + beta sx + gamma sy + zeta sz``."""
    al, be, ga, ze = (complex(x) for x in (p.alpha, p.beta, p.gamma, p.zeta))
    return FlcMap(al + ze, be - 1j * ga, be + 1j * ga, al - ze)


class MapKind(enum.Enum):
    UNITARY = "Unitary"
    UNITARY_SCALED = "UnitaryScaled"
    NON_LINEAR = "NonLinear"


@dataclass(frozen=True)
class MapClass:
    kind: MapKind
    # |det| of the raw coefficients; |a|^2 + |b|^2 for a map of the form [[a, b], [-b*, a*]]
    r: Optional[float] = None

    @property
    def is_linear(self) -> bool:
        return self.kind is not MapKind.NON_LINEAR


def classify(f: FlcMap, tol: float = STRUCT_TOL) -> MapClass:
    """Sort ``f`` into Unitary, UnitaryScaled (with its scale ``r``) or NonLinear.

    The determinant-one representative is tested for ``d = a*`` and
    ``c = -b*``; that structure is invariant under the residual sign
    choice of the square root, so one representative suffices.
    """
    n = f.normalized()
    if abs(n.d - n.a.conjugate()) > tol or abs(n.c + n.b.conjugate()) > tol:
        return MapClass(MapKind.NON_LINEAR)
    r = abs(f.det)
    if abs(r - 1.0) <= tol:
        return MapClass(MapKind.UNITARY, r)
    return MapClass(MapKind.UNITARY_SCALED, r)


def _as_vector(s) -> np.ndarray:
    if isinstance(s, QubitState):
        return s.vector
    v = np.asarray(s, dtype=complex).ravel()
    return v / np.linalg.norm(v)


def nonlinearity_witness(
    f: FlcMap,
    eta1: complex,
    eta2: complex,
    basis: Optional[Sequence] = None,
) -> float:
    """Distance between the two sides of the superposition test on rays.

    Left: the normalized image of ``eta1 |psi1> + eta2 |psi2>``. Right: the
    normalized superposition of the normalized images of ``|psi1>`` and
    ``|psi2>``. The global phase between the two is optimized away, which
    gives ``sqrt(2 - 2 |<left|right>|)``; it is evaluated as the norm of the
    phase-aligned difference to avoid cancellation. If the right-hand
    superposition vanishes the overlap is taken as zero.
    """
    if basis is None:
        basis = (UP, DOWN)
    p1, p2 = (_as_vector(s) for s in basis)
    if abs(np.vdot(p1, p2)) > 1e-10:
        raise ValueError("basis states must be orthogonal")
    m = f.matrix
    psi = eta1 * p1 + eta2 * p2
    lhs = m @ psi
    lhs = lhs / np.linalg.norm(lhs)
    i1, i2 = m @ p1, m @ p2
    rhs = eta1 * i1 / np.linalg.norm(i1) + eta2 * i2 / np.linalg.norm(i2)
    n = np.linalg.norm(rhs)
    if n == 0:
        return math.sqrt(2.0)
    rhs = rhs / n
    ov = np.vdot(lhs, rhs)
    if abs(ov) == 0:
        return math.sqrt(2.0)
    return float(np.linalg.norm(lhs - (ov.conjugate() / abs(ov)) * rhs))


def ratio_defect(f: FlcMap) -> float:
    """``y + z - 1`` for this map, i.e. ``weight(a/c) + weight(b/d) - 1``.

    Written without division by ``c`` or ``d``:
    ``(|ab|^2 - |cd|^2) / ((|a|^2 + |c|^2)(|b|^2 + |d|^2))``.
    """
    scale = max(abs(x) for x in f.coeffs)
    a2, b2, c2, d2 = (abs(x / scale) ** 2 for x in f.coeffs)
    return (a2 * b2 - c2 * d2) / ((a2 + c2) * (b2 + d2))


def ratio_constraint_satisfied(f: FlcMap, tol: float = STRUCT_TOL) -> bool:
    """True when ``|a/c| = |d/b|`` (equivalently ``|a||b| = |c||d|``) within ``tol``."""
    return bool(abs(ratio_defect(f)) <= tol)


RATIO_FORMS = ("i", "ii", "iii", "iv")


def ratio_form_map(row: str, a: complex, b: complex, sign: int = 1) -> FlcMap:
    """Maps of the four ratio-constrained forms.

    ``i``: (az + sb)/(bz + sa), ``ii``: (az + b)/(-bz + sa),
    ``iii``: (az + sb)/(b*z + sa*), ``iv``: (az + b)/(-b*z + sa*).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a, b = complex(a), complex(b)
    if row == "i":
        return FlcMap(a, sign * b, b, sign * a)
    if row == "ii":
        return FlcMap(a, b, -b, sign * a)
    if row == "iii":
        return FlcMap(a, sign * b, b.conjugate(), sign * a.conjugate())
    if row == "iv":
        return FlcMap(a, b, -b.conjugate(), sign * a.conjugate())
    raise ValueError(f"unknown row {row!r}; expected one of {RATIO_FORMS}")
