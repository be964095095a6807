"""Command-line entry point: ``mobius-lgi <command> [options]``.

Exit codes: 0 success, 2 usage or validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional

from .correlations import factors, k3
from .macrorealism import DEFAULT_TOL, macrorealism_report
from .maps import STRUCT_TOL, MapKind, classify, ratio_constraint_satisfied
from .serialize import SchemaError, map_from_json, protocol_from_json
from .sweep import FAMILIES, SweepConfig, luders_violation_search, optimal_k3_surface

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

PAIRS = ("12", "23", "13")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_input(spec: Optional[str]):
    if spec is None:
        return None
    text = spec
    if not spec.lstrip().startswith(("{", "[")):
        try:
            if spec == "-":
                text = sys.stdin.read()
            else:
                with open(spec, encoding="utf-8") as fh:
                    text = fh.read()
        except OSError as e:
            raise CliError(f"cannot read {spec}: {e.strerror or e}", EXIT_IO) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CliError(f"$: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", EXIT_USAGE) from None


def _write_output(spec: Optional[str], text: str):
    if not text.endswith("\n"):
        text += "\n"
    if spec in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(spec, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise CliError(f"cannot write {spec}: {e.strerror or e}", EXIT_IO) from None


def _dumps(obj) -> str:
    # json uses repr for floats, which round-trips exactly
    return json.dumps(obj, indent=2, allow_nan=True)


def _csv(header: List[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _require(data, what):
    if data is None:
        raise CliError(f"{what} requires --input", EXIT_USAGE)
    return data


def run_evaluate(data, args) -> str:
    p = protocol_from_json(_require(data, "evaluate"))
    res = k3(p)
    fac = {k: factors(p, k) for k in PAIRS}
    flags = {k: ratio_constraint_satisfied(p.interval_map(k), args.tol or STRUCT_TOL) for k in PAIRS}
    if args.format == "csv":
        header = ["C12", "C23", "C13", "K3"]
        row = [res.C12, res.C23, res.C13, res.K3]
        for k in PAIRS:
            header += [f"x{k}", f"y{k}", f"z{k}"]
            row += [fac[k].x, fac[k].y, fac[k].z]
        header += [f"ratio_constraint_{k}" for k in PAIRS]
        row += [str(flags[k]).lower() for k in PAIRS]
        return _csv(header, [row])
    out = res.to_dict()
    out["factors"] = {k: {"x": f.x, "y": f.y, "z": f.z} for k, f in fac.items()}
    out["ratio_constraint"] = flags
    return _dumps(out)


def classify_json(f, tol=STRUCT_TOL) -> dict:
    cls = classify(f, tol)
    ratio = ratio_constraint_satisfied(f, tol)
    out = {"class": cls.kind.value}
    if cls.kind is MapKind.UNITARY_SCALED:
        out["r"] = cls.r
    out["ratio_constraint"] = ratio
    # unitary and ratio-constrained maps keep K3 within 3/2
    out["predicted_luders"] = "respected" if (cls.is_linear or ratio) else "may violate"
    return out


def run_classify(data, args) -> str:
    out = classify_json(map_from_json(_require(data, "classify")), args.tol or STRUCT_TOL)
    if args.format == "csv":
        keys = list(out)
        return _csv(keys, [[str(v).lower() if isinstance(v, bool) else v for v in out.values()]])
    return _dumps(out)


def run_macroreal(data, args) -> str:
    rep = macrorealism_report(protocol_from_json(_require(data, "macroreal")), args.tol or DEFAULT_TOL)
    if args.format == "csv":
        rows = [[c.condition, c.residual, str(c.satisfied).lower()] for c in rep.conditions]
        rows += [[f"P{k}", v, ""] for k, v in rep.triple.to_dict().items()]
        return _csv(["condition", "residual", "satisfied"], rows)
    return _dumps(rep.to_json_obj())


def _sweep_config(data, args, default_family) -> SweepConfig:
    d = dict(data) if data else {}
    if not isinstance(d, dict):
        raise SchemaError("$", "sweep config must be an object")
    if args.family:
        d["family"] = args.family
    d.setdefault("family", default_family)
    if args.seed is not None:
        d["seed"] = args.seed
    if args.grid is not None:
        fam = FAMILIES.get(d["family"])
        if fam is not None:
            grid = dict(d.get("grid", {}))
            for p in fam.axes:
                grid[p.name] = args.grid
            d["grid"] = grid
    try:
        return SweepConfig.from_dict(d)
    except TypeError as e:
        raise SchemaError("$", str(e)) from None


def _sweep_output(res, args) -> str:
    if args.format == "csv":
        return res.to_csv()
    return _dumps(res.summary())


def run_sweep(data, args) -> str:
    return _sweep_output(optimal_k3_surface(_sweep_config(data, args, "a")), args)


def run_witness(data, args) -> str:
    cfg = _sweep_config(data, args, "general")
    res = luders_violation_search(cfg)
    if args.format == "csv":
        rows = [[*p.values(), v] for p, v in res.trace]
        return _csv(res.names + ["K3"], rows)
    return _dumps(res.summary())


COMMANDS = {
    "evaluate": (run_evaluate, "K3, correlators and factors of a protocol"),
    "classify": (run_classify, "linearity class and ratio constraint of a map"),
    "sweep": (run_sweep, "optimal K3 surface over a map family"),
    "macroreal": (run_macroreal, "arrow-of-time and NSIT residuals of a protocol"),
    "witness": (run_witness, "search for K3 above 3/2"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mobius-lgi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--input", "-i", help="JSON file, '-' for stdin, or inline JSON")
        sp.add_argument("--output", "-o", default="-", help="output file or '-' (default)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--grid", type=int, default=None, help="points per surface axis")
        sp.add_argument("--family", choices=sorted(FAMILIES), default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    handler = COMMANDS[args.command][0]
    try:
        data = _read_input(args.input)
        text = handler(data, args)
        _write_output(args.output, text)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except ValueError as e:
        # SchemaError, singular maps, bad sweep configs
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
