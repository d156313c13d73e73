"""Command-line front end.

Every command prints one JSON report on stdout with sorted keys.  Exit codes:
0 pass, 1 fail or obstructed, 2 bad input or library error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .analytic import default_sample_points
from .cech import Atlas, check_atlas_cocycle
from .errors import Obstructed, SchemaError, SuperliftError
from .grassmann import GrassmannNumber
from .nsalg import FAMILIES, loop_exponential, loop_exponential_operator, verify_ns_relations
from .sphere import sphere_degree, uniformize_sphere
from .supermap import (N1Map, N2Map, check_n1_superconformal, check_n2_superconformal,
                       compose, f1_functor, f2_functor, map_from_json)
from .torus import (ThetaType, is_trivial_type, make_supertorus, types_equivalent,
                    validate_theta_type)

log = logging.getLogger("superlift")

EXIT = {"pass": 0, "fail": 1, "obstructed": 1, "error": 2}


class InputError(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _resize(obj, L: int | None):
    if L is None:
        return obj
    if obj.L > L:
        raise SchemaError(f"input uses {obj.L} generators, more than --L {L}", "L")
    return obj.extend(L) if obj.L < L else obj


def _points(args):
    return default_sample_points(args.samples) if args.samples else None


def _check(H, args):
    if isinstance(H, N1Map):
        return check_n1_superconformal(H, args.tol, _points(args))
    return check_n2_superconformal(H, args.tol, _points(args))


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# commands

def cmd_verify(args) -> dict:
    H = _resize(map_from_json(_load(args.map), "map"), args.L)
    rep = _check(H, args)
    return {"status": _status(rep.passed), "kind": "n1" if isinstance(H, N1Map) else "n2",
            "residuals": rep.residuals, "sampled": rep.sampled}


def cmd_compose(args) -> dict:
    H1 = _resize(map_from_json(_load(args.m1), "m1"), args.L)
    H2 = _resize(map_from_json(_load(args.m2), "m2"), args.L)
    if H1.L != H2.L:
        L = max(H1.L, H2.L)
        H1, H2 = H1.extend(L), H2.extend(L)
    H = compose(H1, H2)
    rep = _check(H, args)
    return {"status": _status(rep.passed), "map": H.to_json(), "sampled": rep.sampled}


def cmd_f1(args) -> dict:
    H = _resize(map_from_json(_load(args.map), "map"), args.L)
    if not isinstance(H, N2Map):
        raise SchemaError("f1 takes an N=2 map", "map.kind")
    out = f1_functor(H, tol=args.tol)
    back = f2_functor(out).max_difference(H._h())
    return {"status": _status(back < args.tol), "map": out.to_json(), "round_trip": back}


def cmd_f2(args) -> dict:
    H = _resize(map_from_json(_load(args.map), "map"), args.L)
    if not isinstance(H, N1Map):
        raise SchemaError("f2 takes an N=1 map", "map.kind")
    out = f2_functor(H)
    back = f1_functor(out, check=False).max_difference(H)
    return {"status": _status(back < args.tol), "map": out.to_json(), "round_trip": back}


def _sphere_atlas(args) -> Atlas:
    atlas = Atlas.from_json(_load(args.atlas), args.L)
    if atlas.cover != "sphere2":
        raise SchemaError("expected cover 'sphere2'", "atlas.cover")
    return atlas


def cmd_classify(args) -> dict:
    atlas = _sphere_atlas(args)
    H = atlas.transition("sou", "nor")
    rep = check_n2_superconformal(H, args.tol, _points(args))
    return {"status": _status(rep.passed), "degree": sphere_degree(H)}


def cmd_uniformize(args) -> dict:
    atlas = _sphere_atlas(args)
    try:
        res = uniformize_sphere(atlas, tol=args.tol)
    except Obstructed as exc:
        obs = exc.obstruction.to_json() if exc.obstruction is not None else None
        return {"status": "obstructed", "message": str(exc), "obstruction": obs}
    if args.emit_changes:
        with open(args.emit_changes, "w", encoding="utf-8") as fh:
            json.dump({k: v.to_json() for k, v in res.chart_changes.items()}, fh, sort_keys=True, indent=1)
    return {"status": _status(res.residual < args.tol), "degree": res.degree,
            "residual": res.residual, "stages": res.stages}


def _theta_type(path: str, L):
    return ThetaType.from_json(_load(path), L)


def cmd_torus_check(args) -> dict:
    t = _theta_type(args.type, args.L)
    try:
        chern = validate_theta_type(t, args.tol)
    except SuperliftError as exc:
        return {"status": "fail", "message": str(exc), "operation": exc.operation}
    T = make_supertorus(t, args.tol)
    rep = check_atlas_cocycle(T.atlas(), args.tol, _points(args) if args.samples else None)
    return {"status": _status(rep.passed), "chern": chern, "trivial": is_trivial_type(t, args.tol),
            "cocycle": rep.checks}


def cmd_torus_equiv(args) -> dict:
    t1 = _theta_type(args.t1, args.L)
    t2 = _theta_type(args.t2, args.L)
    eq = types_equivalent(t1, t2, args.tol)
    return {"status": _status(eq), "equivalent": eq,
            "chern": [validate_theta_type(t1, args.tol), validate_theta_type(t2, args.tol)]}


def cmd_ns(args) -> dict:
    rep = verify_ns_relations(args.family, args.max_n)
    return {"status": _status(rep.passed), "family": rep.family, "max_n": rep.max_n,
            "checked": rep.checked, "mismatches": rep.mismatches}


def _loop_input(data, L_override):
    if not isinstance(data, dict):
        raise SchemaError("expected an object with 'A' and 'a0'", "coeffs")
    L = data.get("L", L_override)
    if not isinstance(L, int) or isinstance(L, bool):
        raise SchemaError("'L' must be an integer", "coeffs.L")
    if L_override is not None:
        L = max(L, L_override)
    A = data.get("A", {})
    if not isinstance(A, dict):
        raise SchemaError("'A' maps integer powers to even coefficients", "coeffs.A")
    coeffs = {}
    for k, v in A.items():
        try:
            n = int(k)
        except ValueError:
            raise SchemaError("power keys must be integers", f"coeffs.A.{k}") from None
        coeffs[n] = _grassmann(v, f"coeffs.A.{k}", L)
    a0 = _grassmann(data.get("a0", 1.0), "coeffs.a0", L)
    return coeffs, a0, L


def _grassmann(v, path: str, L: int) -> GrassmannNumber:
    if isinstance(v, dict) and "terms" not in v:
        try:
            return GrassmannNumber.scalar(complex(float(v.get("re", 0)), float(v.get("im", 0))), L)
        except (TypeError, ValueError):
            raise SchemaError("'re'/'im' must be numbers", path) from None
    g = GrassmannNumber.from_json(v, path, None if isinstance(v, dict) else L)
    return _resize(g, L)


def cmd_loop(args) -> dict:
    A, a0, L = _loop_input(_load(args.coeffs), args.L)
    H = loop_exponential(A, a0, L)
    rep = check_n2_superconformal(H, args.tol, _points(args))
    out = {"map": H.to_json(), "sampled": rep.sampled}
    ok = rep.passed
    if all(abs(a.body()) == 0 for a in A.values()):
        gap = H.max_difference(loop_exponential_operator(A, a0, L))
        out["operator_gap"] = gap
        ok = ok and gap < args.tol
    out["status"] = _status(ok)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superlift", description="N=1/N=2 superconformal calculus")
    p.add_argument("--tol", type=float, default=1e-9, help="residual tolerance (default 1e-9)")
    p.add_argument("--L", type=int, default=None, help="override the number of Grassmann generators")
    p.add_argument("--samples", type=int, default=None, help="number of sample points for residuals")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-superconformal")
    s.add_argument("map")
    s.set_defaults(fn=cmd_verify)
    s = sub.add_parser("compose", help="m1 o m2 (m2 applied first)")
    s.add_argument("m1")
    s.add_argument("m2")
    s.set_defaults(fn=cmd_compose)
    s = sub.add_parser("f1")
    s.add_argument("map")
    s.set_defaults(fn=cmd_f1)
    s = sub.add_parser("f2")
    s.add_argument("map")
    s.set_defaults(fn=cmd_f2)
    s = sub.add_parser("classify-sphere")
    s.add_argument("atlas")
    s.set_defaults(fn=cmd_classify)
    s = sub.add_parser("uniformize")
    s.add_argument("atlas")
    s.add_argument("--emit-changes", metavar="OUT", default=None)
    s.set_defaults(fn=cmd_uniformize)
    s = sub.add_parser("torus-check")
    s.add_argument("type")
    s.set_defaults(fn=cmd_torus_check)
    s = sub.add_parser("torus-equiv")
    s.add_argument("t1")
    s.add_argument("t2")
    s.set_defaults(fn=cmd_torus_equiv)
    s = sub.add_parser("ns-verify")
    s.add_argument("--family", required=True, choices=sorted(FAMILIES))
    s.add_argument("--max-n", type=int, default=3)
    s.set_defaults(fn=cmd_ns)
    s = sub.add_parser("loop-exp")
    s.add_argument("coeffs")
    s.set_defaults(fn=cmd_loop)
    return p


def _configure_logging():
    level = os.environ.get("SUPERLIFT_LOG")
    if level:
        logging.basicConfig(stream=sys.stderr, level=getattr(logging, level.upper(), logging.INFO),
                            format="%(levelname)s %(name)s: %(message)s")


def run(argv=None) -> tuple[dict, int]:
    """Parse arguments, run one command, return (report, exit code)."""
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        report = args.fn(args)
    except (InputError, SchemaError) as exc:
        report = {"status": "error", "message": str(exc), "operation": "input",
                  "field": getattr(exc, "path", "")}
    except SuperliftError as exc:
        report = {"status": "error", "message": str(exc), "operation": exc.operation}
    report["command"] = args.command
    log.info("%s -> %s", args.command, report["status"])
    return report, EXIT[report["status"]]


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, float) and x != x:
        return None
    raise TypeError(f"not serialisable: {type(x).__name__}")


def main(argv=None) -> int:
    report, code = run(argv)
    sys.stdout.write(json.dumps(report, sort_keys=True, default=_jsonable) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
