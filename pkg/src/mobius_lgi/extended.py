"""Points of the extended complex plane and their pure qubit states.

A point is either a finite ``complex`` or the singleton :data:`INFINITY`.
Pure states ``(zeta1, zeta2)`` correspond to points ``z = zeta1 / zeta2``
via stereographic projection; ``|up> = (1, 0)`` sits at infinity and
``|down> = (0, 1)`` at the origin.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "INFINITY",
    "Infinity",
    "Point",
    "QubitState",
    "UP",
    "DOWN",
    "as_point",
    "is_infinite",
    "point_to_state",
    "polar_point",
    "state_to_point",
    "weight",
]

# relative cut below which zeta2 counts as zero
POLE_TOL = 1e-14


class Infinity:
    """The single unsigned point at infinity."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (Infinity, ())


INFINITY = Infinity()

Point = Union[complex, Infinity]


def is_infinite(z) -> bool:
    return z is INFINITY


def as_point(z) -> Point:
    """Coerce numbers (and the string ``"inf"``) to a point, rejecting NaN."""
    if z is INFINITY:
        return z
    if isinstance(z, str):
        if z.strip().lower() in ("inf", "infinity"):
            return INFINITY
        z = complex(z)
    z = complex(z)
    if cmath.isnan(z):
        raise ValueError("NaN is not a point of the extended plane")
    if cmath.isinf(z):
        return INFINITY
    return z


def polar_point(r: float, phi: float = 0.0) -> Point:
    """The point ``r * exp(i phi)``; ``r = inf`` gives :data:`INFINITY`."""
    if r < 0:
        raise ValueError(f"modulus must be non-negative, got {r}")
    if math.isinf(r):
        return INFINITY
    return as_point(r * cmath.exp(1j * phi))


def weight(z) -> float:
    """``|z|^2 / (|z|^2 + 1)``, i.e. the probability of ``up`` in the state of ``z``."""
    z = as_point(z)
    if z is INFINITY:
        return 1.0
    m = abs(z)
    if m > 1e150:
        return 1.0 / (1.0 + (1.0 / m) ** 2)
    m2 = m * m
    return m2 / (m2 + 1.0)


@dataclass(frozen=True)
class QubitState:
    """Normalized pure state; amplitudes are rescaled to unit norm on construction."""

    zeta1: complex
    zeta2: complex

    def __post_init__(self):
        z1, z2 = complex(self.zeta1), complex(self.zeta2)
        norm = math.hypot(abs(z1), abs(z2))
        if not norm > 0 or not math.isfinite(norm):
            raise ValueError("state amplitudes must be finite and not both zero")
        object.__setattr__(self, "zeta1", z1 / norm)
        object.__setattr__(self, "zeta2", z2 / norm)

    @classmethod
    def from_vector(cls, v) -> "QubitState":
        v = np.asarray(v, dtype=complex).ravel()
        if v.shape != (2,):
            raise ValueError("a qubit state has exactly two amplitudes")
        return cls(v[0], v[1])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.zeta1, self.zeta2], dtype=complex)

    def overlap(self, other: "QubitState") -> complex:
        """``<self|other>``."""
        return self.zeta1.conjugate() * other.zeta1 + self.zeta2.conjugate() * other.zeta2

    def fidelity(self, other: "QubitState") -> float:
        return abs(self.overlap(other)) ** 2

    def same_ray(self, other: "QubitState", tol: float = 1e-12) -> bool:
        """Equality up to a global phase."""
        return abs(1.0 - self.fidelity(other)) <= tol


UP = QubitState(1.0, 0.0)
DOWN = QubitState(0.0, 1.0)


def state_to_point(psi: QubitState) -> Point:
    """``zeta1 / zeta2``, or :data:`INFINITY` when ``zeta2`` vanishes."""
    if abs(psi.zeta2) <= POLE_TOL * abs(psi.zeta1):
        return INFINITY
    return psi.zeta1 / psi.zeta2


def point_to_state(z) -> QubitState:
    """``(z, 1) / sqrt(|z|^2 + 1)``; infinity maps to ``(1, 0)``."""
    z = as_point(z)
    if z is INFINITY:
        return UP
    return QubitState(z, 1.0)
