"""Maximizing K3 over families of map pairs.

A family is a parametrization of ``(f12, f23)`` (and, where K3 depends on
it, of the initial state) by real parameters. Two of them are surface axes;
the rest are free and maximized out. Search is a coarse grid (or a seeded
random sample for high-dimensional families) followed by coordinate-wise
bounded scalar refinement started from the best cells.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .correlations import Protocol, k3, k3_arrays, k3_ratio_constrained
from .extended import INFINITY
from .maps import FlcMap, ratio_constraint_satisfied
from .serialize import map_to_json, point_to_json

__all__ = [
    "FAMILIES",
    "LUDERS_BOUND",
    "ConstrainedParams",
    "Family",
    "ParamSpec",
    "SweepConfig",
    "SweepResult",
    "UnitaryAngles",
    "f13_relation_sides",
    "constrained_k3",
    "luders_violation_search",
    "optimal_k3_surface",
    "solve_f13_phase",
    "unitary_k3",
    "unitary_maps",
    "verify_c6_relation",
]

LUDERS_BOUND = 1.5
TWO_PI = 2.0 * math.pi


# --- unitary pairs ----------------------------------------------------------

@dataclass(frozen=True)
class UnitaryAngles:
    """Mixing angles of the two unitary steps and the phase ``gamma = g1 + g2 + g3 - g4``.

    The steps are ``a12 = cos(theta1) e^{i g1}``, ``b12 = sin(theta1) e^{i g2}``,
    ``a23 = cos(theta2) e^{i g3}``, ``b23 = sin(theta2) e^{i g4}`` with
    ``c = -b*`` and ``d = a*``.
    """

    theta1: float
    theta2: float
    gamma: float

    @classmethod
    def from_phases(cls, theta1, theta2, g1, g2, g3, g4) -> "UnitaryAngles":
        return cls(theta1, theta2, g1 + g2 + g3 - g4)


def unitary_maps(theta1, theta2, g1=0.0, g2=0.0, g3=0.0, g4=0.0) -> Tuple[FlcMap, FlcMap]:
    def step(theta, ga, gb):
        a = math.cos(theta) * complex(math.cos(ga), math.sin(ga))
        b = math.sin(theta) * complex(math.cos(gb), math.sin(gb))
        return FlcMap(a, b, -b.conjugate(), a.conjugate())

    return step(theta1, g1, g2), step(theta2, g3, g4)


def unitary_k3(u: UnitaryAngles) -> float:
    """Closed-form K3 for two unitary steps; independent of the initial state.

    ``cos 2t1 + cos 2t2 - cos 2t1 cos 2t2 + sin 2t1 sin 2t2 cos(gamma)``,
    whose maximum 3/2 sits at ``t1 = t2 = pi/6``, ``gamma = 0``.
    """
    c1, c2 = math.cos(2 * u.theta1), math.cos(2 * u.theta2)
    s1, s2 = math.sin(2 * u.theta1), math.sin(2 * u.theta2)
    return c1 + c2 - c1 * c2 + s1 * s2 * math.cos(u.gamma)


# --- ratio-constrained parametrization ---------------------------------------

@dataclass(frozen=True)
class ConstrainedParams:
    """Ratios of a map pair that satisfies ``|a/c| = |d/b|`` for f12, f23 and f13.

    ``b12/d12 = r1`` (phase fixed to zero), ``b23/d23 = r2``,
    ``a23/b23 = r3 e^{i theta3}``, ``c23/d23 = r4 e^{i theta4}`` and
    ``a12/c12 = e^{i psi} / r1``. The f23 constraint forces
    ``r4 = r3 r2^2``; the f13 constraint is the relation checked by
    :func:`verify_c6_relation`.
    """

    r1: float
    r2: float
    r3: float
    theta3: float = 0.0
    theta4: float = 0.0
    psi: float = 0.0
    r4: Optional[float] = None

    def __post_init__(self):
        for name in ("r1", "r2", "r3"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        r4 = self.r3 * self.r2 ** 2
        if self.r4 is None:
            object.__setattr__(self, "r4", r4)
        elif abs(self.r4 - r4) > 1e-10 * max(1.0, r4):
            raise ValueError(f"r4 = {self.r4} violates r4^2 = r3^2 r2^4 (expected {r4})")

    def maps(self) -> Tuple[FlcMap, FlcMap]:
        e = complex(math.cos(self.psi), math.sin(self.psi))
        f12 = FlcMap(e, self.r1, self.r1, 1.0)
        b23 = self.r2
        a23 = self.r3 * complex(math.cos(self.theta3), math.sin(self.theta3)) * b23
        c23 = self.r4 * complex(math.cos(self.theta4), math.sin(self.theta4))
        return f12, FlcMap(a23, b23, c23, 1.0)

    def z_values(self) -> Tuple[float, float, float]:
        r1, r2, r3, r4 = self.r1, self.r2, self.r3, self.r4
        A = r2 ** 2 * (r1 ** 2 * r3 ** 2 + 1 + 2 * r1 * r3 * math.cos(self.theta3))
        B = r1 ** 2 * r4 ** 2 + 1 + 2 * r1 * r4 * math.cos(self.theta4)
        return r1 ** 2 / (1 + r1 ** 2), r2 ** 2 / (1 + r2 ** 2), A / (A + B)


def constrained_k3(c: ConstrainedParams) -> float:
    return k3_ratio_constrained(*c.z_values())


def f13_relation_sides(c: ConstrainedParams) -> Tuple[float, float]:
    """Both sides of the f13 ratio constraint written in the ratio parameters."""
    r1, r2, r3, r4 = c.r1, c.r2, c.r3, c.r4
    x = r1 ** 2 + r3 ** 2 + 2 * r1 * r3 * math.cos(c.psi + c.theta3)
    y = r1 ** 2 + r4 ** 2 + 2 * r1 * r4 * math.cos(c.psi + c.theta4)
    a = r1 ** 2 * r3 ** 2 + 1 + 2 * r1 * r3 * math.cos(c.theta3)
    b = r1 ** 2 * r4 ** 2 + 1 + 2 * r1 * r4 * math.cos(c.theta4)
    lhs = r2 ** 4 * x / y if y > 0 else math.inf
    rhs = b / a if a > 0 else math.inf
    return lhs, rhs


def verify_c6_relation(c: ConstrainedParams) -> float:
    lhs, rhs = f13_relation_sides(c)
    if math.isinf(lhs) or math.isinf(rhs):
        return 0.0 if lhs == rhs else math.inf
    return abs(lhs - rhs)


def solve_f13_phase(r1, r2, r3, theta3, theta4):
    """Phases ``psi`` (two branches) solving the f13 relation; NaN where none exists.

    The relation is ``u cos(psi) + v sin(psi) = w``. Works elementwise on arrays.
    """
    r1, r2, r3, theta3, theta4 = np.broadcast_arrays(
        *(np.asarray(t, dtype=float) for t in (r1, r2, r3, theta3, theta4)))
    r4 = r3 * r2 ** 2
    a = r1 ** 2 * r3 ** 2 + 1 + 2 * r1 * r3 * np.cos(theta3)
    b = r1 ** 2 * r4 ** 2 + 1 + 2 * r1 * r4 * np.cos(theta4)
    p = 2 * r2 ** 4 * a * r1 * r3
    q = 2 * b * r1 * r4
    w = b * (r4 ** 2 + r1 ** 2) - r2 ** 4 * a * (r3 ** 2 + r1 ** 2)
    u = p * np.cos(theta3) - q * np.cos(theta4)
    v = q * np.sin(theta4) - p * np.sin(theta3)
    rr = np.hypot(u, v)
    delta = np.arctan2(v, u)
    scale = np.maximum(np.abs(w), rr)
    with np.errstate(invalid="ignore", divide="ignore"):
        cosarg = np.where(rr > 0, w / rr, np.where(np.abs(w) <= 1e-14 * scale, 1.0, np.nan))
    # rounding can push a tangent solution just past 1
    cosarg = np.where(np.abs(cosarg) > 1, np.where(np.abs(cosarg) <= 1 + 1e-12, np.sign(cosarg), np.nan), cosarg)
    ac = np.arccos(cosarg)
    return np.mod(delta + ac, TWO_PI), np.mod(delta - ac, TWO_PI)


# --- families -----------------------------------------------------------------

@dataclass(frozen=True)
class ParamSpec:
    name: str
    lo: float
    hi: float
    n: int
    periodic: bool = False
    discrete: bool = False

    def grid(self) -> np.ndarray:
        if self.periodic:
            return self.lo + (self.hi - self.lo) * np.arange(self.n) / self.n
        if self.n == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.n)

    def sample(self, rng, size) -> np.ndarray:
        if self.discrete:
            return self.grid()[rng.integers(0, self.n, size)]
        return rng.uniform(self.lo, self.hi, size)


def _cis(t):
    return np.cos(t) + 1j * np.sin(t)


def _mask_singular(val, *maps):
    ok = np.ones(np.shape(val), dtype=bool)
    for a, b, c, d in maps:
        det = a * d - b * c
        scale = np.maximum.reduce([np.abs(a), np.abs(b), np.abs(c), np.abs(d)])
        ok &= np.abs(det) > 1e-12 * scale ** 2
    return np.where(ok, val, -np.inf)


def _state_from_bloch(P):
    t = P["bloch_theta"] / 2
    return np.sin(t) * _cis(P["bloch_phi"]), np.cos(t) + 0j


def _eval_maps(build):
    def evaluate(P, u, v):
        m12, m23 = build(P)
        shape = np.broadcast_shapes(*(np.shape(x) for x in (*m12, *m23)))
        m12 = tuple(np.broadcast_to(x, shape) for x in m12)
        m23 = tuple(np.broadcast_to(x, shape) for x in m23)
        val = k3_arrays(m12, m23, u, v)[3]
        return _mask_singular(val, m12, m23)

    return evaluate


def _build_a(P):
    l1 = P["abs_lambda1"] * _cis(P["arg_lambda1"])
    l2 = P["abs_lambda2"] * _cis(P["arg_lambda2"])
    one = np.ones_like(l1)
    return (one, l1, l1, one), (np.ones_like(l2), l2, l2, np.ones_like(l2))


def _build_b(P):
    l1 = P["abs_lambda1"] * _cis(P["arg_lambda1"])
    l2 = P["abs_lambda2"] * _cis(P["arg_lambda2"])
    one = np.ones_like(l1)
    return (one, l1, np.conj(l1), one), (np.ones_like(l2), l2, np.conj(l2), np.ones_like(l2))


def _build_unitary(P):
    t1, t2 = P["theta1"], P["theta2"]
    a12 = np.cos(t1) * _cis(P["gamma"])
    b12 = np.sin(t1) + 0j
    a23 = np.cos(t2) + 0j
    b23 = np.sin(t2) + 0j
    return (a12, b12, -np.conj(b12), np.conj(a12)), (a23, b23, -np.conj(b23), np.conj(a23))


def _build_general(P):
    def one(k):
        beta = P[f"abs_beta{k}"] * _cis(P[f"arg_beta{k}"])
        gamma = P[f"re_gamma{k}"] + 1j * P[f"im_gamma{k}"]
        zeta = P[f"re_zeta{k}"] + 1j * P[f"im_zeta{k}"]
        return (1 + zeta, beta - 1j * gamma, beta + 1j * gamma, 1 - zeta)

    return one(1), one(2)


def _ratio_form_builder(row):
    def build(P):
        def one(k):
            a = _cis(P[f"arg_a{k}"])
            b = P[f"abs_b{k}"] * _cis(P[f"arg_b{k}"])
            s = np.where(P[f"sign{k}"] < 0.5, 1.0, -1.0)
            if row == "i":
                return (a, s * b, b, s * a)
            if row == "ii":
                return (a, b, -b, s * a)
            if row == "iii":
                return (a, s * b, np.conj(b), s * np.conj(a))
            return (a, b, -np.conj(b), s * np.conj(a))

        return one(1), one(2)

    return build


def _eval_constrained(P, u, v):
    r1, r2, r3 = P["r1"], P["r2"], P["r3"]
    t3, t4 = P["theta3"], P["theta4"]
    r4 = r3 * r2 ** 2
    A = r2 ** 2 * (r1 ** 2 * r3 ** 2 + 1 + 2 * r1 * r3 * np.cos(t3))
    B = r1 ** 2 * r4 ** 2 + 1 + 2 * r1 * r4 * np.cos(t4)
    val = 1 - 2 * r1 ** 2 / (1 + r1 ** 2) - 2 * r2 ** 2 / (1 + r2 ** 2) + 2 * A / (A + B)
    psi = solve_f13_phase(r1, r2, r3, t3, t4)[0]
    return np.where(np.isnan(psi), -np.inf, val)


def _constrained_params(P) -> ConstrainedParams:
    psi = float(solve_f13_phase(P["r1"], P["r2"], P["r3"], P["theta3"], P["theta4"])[0])
    if math.isnan(psi):
        raise ValueError("no phase psi satisfies the f13 ratio constraint at these parameters")
    return ConstrainedParams(P["r1"], P["r2"], P["r3"], P["theta3"], P["theta4"], psi)


@dataclass(frozen=True)
class Family:
    name: str
    description: str
    axes: Tuple[ParamSpec, ParamSpec]
    free: Tuple[ParamSpec, ...]
    evaluate: Callable
    build_maps: Callable
    state_dependent: bool = False
    n_random: int = 0

    @property
    def params(self) -> Tuple[ParamSpec, ...]:
        return self.axes + self.free


def _scalar_maps(build):
    def maps(P):
        m12, m23 = build({k: np.asarray(v) for k, v in P.items()})
        return FlcMap(*(complex(x) for x in m12)), FlcMap(*(complex(x) for x in m23))

    return maps


_PHASE = dict(lo=0.0, hi=TWO_PI, periodic=True)
_BLOCH = (
    ParamSpec("bloch_theta", 0.0, math.pi, 9),
    ParamSpec("bloch_phi", 0.0, TWO_PI, 8, periodic=True),
)


def _sym_family(name, desc, build):
    return Family(
        name, desc,
        (ParamSpec("abs_lambda1", 0.0, 4.0, 201), ParamSpec("abs_lambda2", 0.0, 4.0, 201)),
        (ParamSpec("arg_lambda1", n=64, **_PHASE), ParamSpec("arg_lambda2", n=64, **_PHASE)),
        _eval_maps(build), _scalar_maps(build),
    )


def _ratio_form_family(row):
    build = _ratio_form_builder(row)
    free = []
    for k in (1, 2):
        free += [
            ParamSpec(f"arg_a{k}", n=8, **_PHASE),
            ParamSpec(f"arg_b{k}", n=8, **_PHASE),
            ParamSpec(f"sign{k}", 0.0, 1.0, 2, discrete=True),
        ]
    return Family(
        f"form-{row}", f"both maps of ratio-constrained form ({row})",
        (ParamSpec("abs_b1", 0.0, 4.0, 41), ParamSpec("abs_b2", 0.0, 4.0, 41)),
        tuple(free), _eval_maps(build), _scalar_maps(build),
    )


def _general_family():
    free = [ParamSpec("arg_beta1", n=4, **_PHASE), ParamSpec("arg_beta2", n=4, **_PHASE)]
    for k in (1, 2):
        for part in ("re", "im"):
            free.append(ParamSpec(f"{part}_gamma{k}", -2.0, 2.0, 3))
            free.append(ParamSpec(f"{part}_zeta{k}", -2.0, 2.0, 3))
    return Family(
        "general", "alpha I + beta sx + gamma sy + zeta sz with alpha = 1, both steps",
        (ParamSpec("abs_beta1", 0.0, 2.0, 11), ParamSpec("abs_beta2", 0.0, 2.0, 11)),
        tuple(free) + _BLOCH, _eval_maps(_build_general), _scalar_maps(_build_general),
        state_dependent=True, n_random=4096,
    )


FAMILIES: Dict[str, Family] = {
    "a": _sym_family("a", "(az + b)/(bz + a) for both steps", _build_a),
    "b": _sym_family("b", "(az + b)/(b*z + a*) for both steps", _build_b),
    "unitary": Family(
        "unitary", "two unitary steps; gamma is the combined phase",
        (ParamSpec("theta1", 0.0, math.pi, 201), ParamSpec("theta2", 0.0, math.pi, 201)),
        (ParamSpec("gamma", n=64, **_PHASE),),
        _eval_maps(_build_unitary), _scalar_maps(_build_unitary),
    ),
    "constrained": Family(
        "constrained", "ratio parameters with all three maps ratio-constrained",
        (ParamSpec("r1", 0.0, 4.0, 41), ParamSpec("r2", 0.0, 4.0, 41)),
        (ParamSpec("r3", 0.0, 4.0, 16), ParamSpec("theta3", n=32, **_PHASE),
         ParamSpec("theta4", n=32, **_PHASE)),
        _eval_constrained, lambda P: _constrained_params(P).maps(),
    ),
    "general": _general_family(),
}
for _row in ("i", "ii", "iii", "iv"):
    FAMILIES[f"form-{_row}"] = _ratio_form_family(_row)


# --- configuration and results ---------------------------------------------------

@dataclass
class SweepConfig:
    """Which family to sweep and how finely.

    ``ranges`` and ``grid`` override the family defaults per parameter name.
    ``n_random > 0`` replaces the free-parameter grid by that many seeded
    uniform samples. ``initial_state`` is ``(r, phi)`` of ``z1`` for
    families whose parameters do not include the state.
    """

    family: str = "a"
    ranges: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    grid: Dict[str, int] = field(default_factory=dict)
    refine_steps: int = 60
    refine_top: int = 4
    n_random: Optional[int] = None
    restarts: int = 16
    seed: int = 0
    initial_state: Tuple[float, float] = (1.0, 0.0)
    witness_margin: float = 1e-3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}; choose from {', '.join(sorted(FAMILIES))}")
        names = {p.name for p in FAMILIES[self.family].params}
        for key in list(self.ranges) + list(self.grid):
            if key not in names:
                raise ValueError(f"family {self.family!r} has no parameter {key!r}")
        for key, (lo, hi) in self.ranges.items():
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
                raise ValueError(f"empty or non-finite range for {key}: [{lo}, {hi}]")
        for key, n in self.grid.items():
            if int(n) < 1:
                raise ValueError(f"grid count for {key} must be >= 1")
        if self.refine_steps < 0 or self.refine_top < 0 or self.restarts < 0:
            raise ValueError("refinement counts must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        if "ranges" in d:
            d["ranges"] = {k: tuple(map(float, v)) for k, v in d["ranges"].items()}
        if "initial_state" in d:
            d["initial_state"] = tuple(map(float, d["initial_state"]))
        return cls(**d)

    @property
    def family_def(self) -> Family:
        return FAMILIES[self.family]

    def specs(self) -> List[ParamSpec]:
        out = []
        for p in self.family_def.params:
            lo, hi = self.ranges.get(p.name, (p.lo, p.hi))
            n = int(self.grid.get(p.name, p.n))
            out.append(ParamSpec(p.name, lo, hi, n, p.periodic, p.discrete))
        return out

    def state(self):
        r, phi = self.initial_state
        if math.isinf(r):
            return 1.0 + 0j, 0j
        return complex(r * math.cos(phi), r * math.sin(phi)), 1.0 + 0j


@dataclass
class SweepResult:
    family: str
    names: List[str]
    axis_values: Tuple[np.ndarray, np.ndarray]
    surface: np.ndarray
    # argmax of the free parameters at each grid point, shape (n1, n2, n_free)
    surface_args: np.ndarray
    best_value: float
    best_params: Dict[str, float]
    evaluations: int
    seed: int
    wall_time: float = 0.0
    trace: List[Tuple[Dict[str, float], float]] = field(default_factory=list)
    witness: Optional[dict] = None

    def rows(self):
        a1, a2 = self.axis_values
        for i, x in enumerate(a1):
            for j, y in enumerate(a2):
                yield [float(x), float(y), *map(float, self.surface_args[i, j]), float(self.surface[i, j])]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.names + ["K3"])
        for row in self.rows():
            w.writerow([repr(v) for v in row])
        return buf.getvalue()

    def summary(self, include_timing: bool = False) -> dict:
        out = {
            "family": self.family,
            "max": self.best_value,
            "argmax": self.best_params,
            "evaluations": self.evaluations,
            "seed": self.seed,
        }
        if self.witness is not None or self.family == "general":
            out["witness"] = self.witness
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


# --- search machinery ------------------------------------------------------------------

class _Objective:
    def __init__(self, cfg: SweepConfig, specs: Sequence[ParamSpec]):
        self.fam = cfg.family_def
        self.specs = list(specs)
        self.names = [s.name for s in self.specs]
        self.u, self.v = cfg.state()
        self.count = 0

    def batch(self, P: Dict[str, np.ndarray]) -> np.ndarray:
        if self.fam.state_dependent:
            u, v = _state_from_bloch(P)
        else:
            u, v = self.u, self.v
        val = np.asarray(self.fam.evaluate(P, u, v), dtype=float)
        self.count += val.size
        return np.where(np.isnan(val), -np.inf, val)

    def __call__(self, x: Sequence[float]) -> float:
        P = {n: np.asarray(float(t)) for n, t in zip(self.names, x)}
        return float(self.batch(P))


def _refine(obj: _Objective, x0, f0, steps: int):
    """Coordinate-wise bounded scalar maximization from ``x0``."""
    x = [float(t) for t in x0]
    fx = f0
    if steps <= 0 or not math.isfinite(fx):
        return x, fx
    widths = []
    for s in obj.specs:
        span = s.hi - s.lo
        widths.append(2.0 * span / max(s.n, 1) if span > 0 else 0.0)
    for _ in range(steps):
        start = fx
        for k, s in enumerate(obj.specs):
            if s.discrete or widths[k] == 0.0:
                continue
            lo, hi = x[k] - widths[k], x[k] + widths[k]
            if not s.periodic:
                lo, hi = max(lo, s.lo), min(hi, s.hi)
            if hi <= lo:
                continue

            def neg(t, k=k):
                trial = list(x)
                trial[k] = t
                val = obj(trial)
                return -val if math.isfinite(val) else 1e300

            res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12})
            if -res.fun > fx:
                t = float(res.x)
                if s.periodic:
                    t = s.lo + math.fmod(t - s.lo, s.hi - s.lo) % (s.hi - s.lo)
                x[k] = t
                fx = obj(x)
        if fx - start <= 1e-15:
            break
    return x, fx


def _pick_best(cands):
    # highest value; ties go to the lexicographically smallest parameter tuple
    return min(cands, key=lambda c: (-c[1], tuple(c[0])))


def optimal_k3_surface(cfg: SweepConfig) -> SweepResult:
    """Best K3 at every grid point of the two axes, free parameters maximized out."""
    t0 = time.perf_counter()
    specs = cfg.specs()
    obj = _Objective(cfg, specs)
    ax1, ax2, free = specs[0], specs[1], specs[2:]
    g1, g2 = ax1.grid(), ax2.grid()
    n_random = cfg.n_random if cfg.n_random is not None else cfg.family_def.n_random

    if n_random:
        rng = np.random.default_rng(cfg.seed)
        fvals = [s.sample(rng, n_random) for s in free]
    else:
        mesh = np.meshgrid(*[s.grid() for s in free], indexing="ij")
        fvals = [m.ravel() for m in mesh]
    nf = len(fvals[0]) if fvals else 1

    surface = np.empty((len(g1), len(g2)))
    args = np.empty((len(g1), len(g2), len(free)))
    for i, x in enumerate(g1):
        P = {ax1.name: np.full((len(g2), nf), x), ax2.name: np.repeat(g2[:, None], nf, axis=1)}
        for s, fv in zip(free, fvals):
            P[s.name] = np.broadcast_to(fv[None, :], (len(g2), nf))
        vals = obj.batch(P)
        best = np.argmax(vals, axis=1)
        surface[i] = vals[np.arange(len(g2)), best]
        for k, fv in enumerate(fvals):
            args[i, :, k] = fv[best]

    # candidate cells: top values, ties broken lexicographically by construction of argsort
    order = np.lexsort((np.arange(surface.size), -surface.ravel()))[: max(cfg.refine_top, 1)]
    cands = []
    trace = []
    for flat in order:
        i, j = np.unravel_index(flat, surface.shape)
        x0 = [g1[i], g2[j], *args[i, j]]
        f0 = surface[i, j]
        cands.append(([float(t) for t in x0], float(f0)))
        if cfg.refine_top > 0:
            xr, fr = _refine(obj, x0, f0, cfg.refine_steps)
            trace.append((dict(zip(obj.names, xr)), fr))
            cands.append((xr, fr))
    bx, bf = _pick_best(cands)
    return SweepResult(
        family=cfg.family,
        names=obj.names,
        axis_values=(g1, g2),
        surface=surface,
        surface_args=args,
        best_value=bf,
        best_params=dict(zip(obj.names, bx)),
        evaluations=obj.count,
        seed=cfg.seed,
        wall_time=time.perf_counter() - t0,
        trace=trace,
    )


def family_protocol(cfg: SweepConfig, params: Dict[str, float]) -> Protocol:
    """Rebuild the protocol behind a parameter point, for re-verification."""
    fam = cfg.family_def
    f12, f23 = fam.build_maps(params)
    if fam.state_dependent:
        u, v = _state_from_bloch({k: np.asarray(params[k]) for k in ("bloch_theta", "bloch_phi")})
        u, v = complex(u), complex(v)
    else:
        u, v = cfg.state()
    z1 = INFINITY if v == 0 else u / v
    return Protocol(z1, f12, f23)


def luders_violation_search(cfg: SweepConfig) -> SweepResult:
    """Look for K3 above 3/2 with random restarts plus coordinate refinement.

    The best point is rebuilt as a :class:`Protocol` and re-evaluated through
    the scalar probability pipeline. It is reported as a witness when that
    value exceeds ``1.5 + witness_margin``, together with the ratio-constraint
    status of f12, f23 and f13.
    """
    t0 = time.perf_counter()
    specs = cfg.specs()
    obj = _Objective(cfg, specs)
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_random if cfg.n_random else 20000
    P = {s.name: s.sample(rng, n) for s in specs}
    vals = obj.batch(P)
    order = np.lexsort((np.arange(n), -vals))[: max(cfg.restarts, 1)]
    cands, trace = [], []
    for idx in order:
        x0 = [float(P[s.name][idx]) for s in specs]
        cands.append((x0, float(vals[idx])))
        xr, fr = _refine(obj, x0, float(vals[idx]), cfg.refine_steps)
        trace.append((dict(zip(obj.names, xr)), fr))
        cands.append((xr, fr))
    bx, bf = _pick_best(cands)
    best = dict(zip(obj.names, bx))

    witness = None
    if bf > LUDERS_BOUND + cfg.witness_margin:
        p = family_protocol(cfg, best)
        res = k3(p)
        flags = {k: bool(ratio_constraint_satisfied(p.interval_map(k))) for k in ("12", "23", "13")}
        witness = {
            "K3": res.K3,
            "K3_search": bf,
            "pipeline_agrees": bool(abs(res.K3 - bf) <= 1e-9),
            "ratio_constraint": flags,
            "verified": bool(abs(res.K3 - bf) <= 1e-9 and res.K3 > LUDERS_BOUND and not all(flags.values())),
            "z1": point_to_json(p.z1),
            "f12": map_to_json(p.f12),
            "f23": map_to_json(p.f23),
        }
    surface = np.array([[bf]])
    return SweepResult(
        family=cfg.family,
        names=obj.names,
        axis_values=(np.array([best[specs[0].name]]), np.array([best[specs[1].name]])),
        surface=surface,
        surface_args=np.array([[bx[2:]]]),
        best_value=bf,
        best_params=best,
        evaluations=obj.count,
        seed=cfg.seed,
        wall_time=time.perf_counter() - t0,
        trace=trace,
        witness=witness,
    )

