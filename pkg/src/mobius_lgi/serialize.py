"""JSON forms of points, maps and protocols.

Complex numbers are ``[re, im]`` pairs. A point is ``{"r": .., "phi": ..}``
or the string ``"inf"``; a map is ``{"a": .., "b": .., "c": .., "d": ..}``.
"""

from __future__ import annotations

import math

from .correlations import Protocol
from .extended import INFINITY, Point, polar_point
from .maps import FlcMap


class SchemaError(ValueError):
    """Input that does not match the expected JSON layout; ``path`` locates the field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _number(x, path) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(x).__name__}")
    x = float(x)
    if not math.isfinite(x):
        raise SchemaError(path, "must be finite")
    return x


def complex_from_json(v, path="$") -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(_number(v, path))
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise SchemaError(path, "expected [re, im]")
    return complex(_number(v[0], f"{path}[0]"), _number(v[1], f"{path}[1]"))


def complex_to_json(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def point_from_json(v, path="$") -> Point:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity"):
            return INFINITY
        raise SchemaError(path, f"unknown point {v!r}; use {{r, phi}} or \"inf\"")
    if not isinstance(v, dict):
        raise SchemaError(path, "expected {r, phi} or \"inf\"")
    if "r" not in v:
        raise SchemaError(f"{path}.r", "missing")
    r = v["r"]
    if r == "inf":
        return INFINITY
    r = _number(r, f"{path}.r")
    if r < 0:
        raise SchemaError(f"{path}.r", "must be non-negative")
    return polar_point(r, _number(v.get("phi", 0.0), f"{path}.phi"))


def point_to_json(z: Point):
    if z is INFINITY:
        return "inf"
    return {"r": abs(z), "phi": math.atan2(z.imag, z.real)}


def map_from_json(v, path="$") -> FlcMap:
    if not isinstance(v, dict):
        raise SchemaError(path, "expected an object with fields a, b, c, d")
    coeffs = []
    for k in "abcd":
        if k not in v:
            raise SchemaError(f"{path}.{k}", "missing")
        coeffs.append(complex_from_json(v[k], f"{path}.{k}"))
    try:
        return FlcMap(*coeffs)
    except ValueError as e:
        raise SchemaError(path, str(e)) from None


def map_to_json(f: FlcMap) -> dict:
    return {k: complex_to_json(x) for k, x in zip("abcd", f.coeffs)}


def protocol_from_json(v, path="$") -> Protocol:
    if not isinstance(v, dict):
        raise SchemaError(path, "expected an object with fields z1, f12, f23")
    for k in ("z1", "f12", "f23"):
        if k not in v:
            raise SchemaError(f"{path}.{k}", "missing")
    return Protocol(
        point_from_json(v["z1"], f"{path}.z1"),
        map_from_json(v["f12"], f"{path}.f12"),
        map_from_json(v["f23"], f"{path}.f23"),
    )


def protocol_to_json(p: Protocol) -> dict:
    return {"z1": point_to_json(p.z1), "f12": map_to_json(p.f12), "f23": map_to_json(p.f23)}
