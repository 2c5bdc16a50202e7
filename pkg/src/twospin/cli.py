"""Command-line front end.

Subcommands: ``propagate`` (evolve a problem file), ``spectrum``
(constant-problem levels), ``scan`` (resonance sweep to CSV) and
``verify`` (self-check suite).

Exit codes: 0 success, 1 verification failure, 2 input or schema error,
3 no closed form available under --method closed, 4 oracle
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import linalg, oracle, resonance, spectrum, verify
from .errors import (NoClosedForm, NoConvergence, OutOfRange, SchemaError,
                     TwoSpinError)
from .model import (ConstantField, ConstantProfile, ParallelZField, RabiField,
                    SampledProfile, TwoSpinProblem, ZeroField)
from .propagators import (RabiParams, prop_constant_parallel,
                          prop_equal_fields, prop_equal_rabi,
                          prop_free_interaction, prop_noninteracting,
                          prop_rabi_second_spin)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_NO_CLOSED_FORM = 3
EXIT_NUMERIC = 4


# ---------------------------------------------------------------------------
# problem-file schema
# ---------------------------------------------------------------------------


def _require_keys(obj: dict, required: set, optional: set, what: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{what} must be an object, got {type(obj).__name__}")
    keys = set(obj)
    missing = required - keys
    if missing:
        raise SchemaError(f"{what} missing keys: {sorted(missing)}")
    unknown = keys - required - optional
    if unknown:
        raise SchemaError(f"{what} has unknown keys: {sorted(unknown)}")


def _number(x, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{what} must be a number, got {x!r}")
    return float(x)


def parse_profile(obj, what: str = "profile"):
    _require_keys(obj, {"type"}, {"value", "knots", "interp"}, what)
    kind = obj["type"]
    if kind == "constant":
        _require_keys(obj, {"type", "value"}, set(), what)
        return ConstantProfile(_number(obj["value"], f"{what}.value"))
    if kind == "samples":
        _require_keys(obj, {"type", "knots"}, {"interp"}, what)
        knots = obj["knots"]
        if (not isinstance(knots, list) or len(knots) < 2
                or not all(isinstance(k, list) and len(k) == 2 for k in knots)):
            raise SchemaError(f"{what}.knots must be a list of [t, value] pairs")
        pairs = tuple((_number(k[0], f"{what}.knots[t]"),
                       _number(k[1], f"{what}.knots[value]")) for k in knots)
        interp = obj.get("interp", "cubic")
        if interp not in ("cubic", "linear"):
            raise SchemaError(f"{what}.interp must be 'cubic' or 'linear'")
        try:
            return SampledProfile(pairs, interp=interp)
        except ValueError as exc:
            raise SchemaError(f"{what}: {exc}") from exc
    raise SchemaError(f"{what}.type must be 'constant' or 'samples'")


def parse_field(obj, what: str = "field"):
    _require_keys(obj, {"type"},
                  {"vector", "A", "A0", "omega", "phi", "profile"}, what)
    kind = obj["type"]
    if kind == "zero":
        _require_keys(obj, {"type"}, set(), what)
        return ZeroField()
    if kind == "constant":
        _require_keys(obj, {"type", "vector"}, set(), what)
        vec = obj["vector"]
        if not isinstance(vec, list) or len(vec) != 3:
            raise SchemaError(f"{what}.vector must be a list of 3 numbers")
        return ConstantField(tuple(_number(x, f"{what}.vector") for x in vec))
    if kind == "rabi":
        _require_keys(obj, {"type", "A", "A0", "omega"}, {"phi"}, what)
        omega = _number(obj["omega"], f"{what}.omega")
        if omega == 0.0:
            raise SchemaError(f"{what}.omega must be nonzero")
        return RabiField(A=_number(obj["A"], f"{what}.A"),
                         A0=_number(obj["A0"], f"{what}.A0"),
                         omega=omega,
                         phi=_number(obj.get("phi", 0.0), f"{what}.phi"))
    if kind == "parallel_z":
        _require_keys(obj, {"type", "profile"}, set(), what)
        return ParallelZField(parse_profile(obj["profile"], f"{what}.profile"))
    raise SchemaError(
        f"{what}.type must be one of zero/constant/rabi/parallel_z")


def parse_problem(doc) -> TwoSpinProblem:
    _require_keys(doc, {"G", "F", "J"}, {"t0"}, "problem")
    return TwoSpinProblem(G=parse_field(doc["G"], "G"),
                          F=parse_field(doc["F"], "F"),
                          J=parse_profile(doc["J"], "J"),
                          t0=_number(doc.get("t0", 0.0), "t0"))


def serialize_field(f) -> dict:
    if isinstance(f, ZeroField):
        return {"type": "zero"}
    if isinstance(f, ConstantField):
        return {"type": "constant", "vector": list(f.vector)}
    if isinstance(f, RabiField):
        out = {"type": "rabi", "A": f.A, "A0": f.A0, "omega": f.omega}
        if f.phi:
            out["phi"] = f.phi
        return out
    if isinstance(f, ParallelZField):
        return {"type": "parallel_z", "profile": serialize_profile(f.profile)}
    raise TypeError(f"not a field spec: {f!r}")


def serialize_profile(p) -> dict:
    if isinstance(p, ConstantProfile):
        return {"type": "constant", "value": p.value}
    return {"type": "samples", "knots": [[t, v] for t, v in p.knots],
            "interp": p.interp}


def serialize_problem(p: TwoSpinProblem) -> dict:
    out = {"G": serialize_field(p.G), "F": serialize_field(p.F),
           "J": serialize_profile(p.J)}
    if p.t0:
        out["t0"] = p.t0
    return out


def load_problem(path: str) -> TwoSpinProblem:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"problem file is not valid JSON: {exc}") from exc
    return parse_problem(doc)


# ---------------------------------------------------------------------------
# closed-form dispatch
# ---------------------------------------------------------------------------


def _z_component(f):
    """z strength of a purely longitudinal constant field, else None."""
    if isinstance(f, ZeroField):
        return 0.0
    if isinstance(f, ConstantField) and f.vector[0] == f.vector[1] == 0.0:
        return f.vector[2]
    if isinstance(f, ParallelZField) and isinstance(f.profile, ConstantProfile):
        return f.profile.value
    return None


def dispatch_closed_form(p: TwoSpinProblem, t: float):
    """Pick a closed-form propagator for the problem, or return None."""
    if p.G == p.F:
        if isinstance(p.G, ZeroField):
            return prop_free_interaction(p.J, p.t0, t)
        if isinstance(p.G, RabiField) and p.G.phi == 0.0:
            rp = RabiParams(p.G.A, p.G.A0, p.G.omega)
            return prop_equal_rabi(rp, p.J, p.t0, t)
        return prop_equal_fields(p.G, p.J, p.t0, t)
    coupling_off = isinstance(p.J, ConstantProfile) and p.J.value == 0.0
    if coupling_off:
        if (isinstance(p.G, ZeroField) and isinstance(p.F, RabiField)
                and p.F.phi == 0.0 and p.t0 == 0.0):
            rp = RabiParams(p.F.A, p.F.A0, p.F.omega)
            return prop_rabi_second_spin(rp, t)
        return prop_noninteracting(p.G, p.F, p.t0, t)
    gz, fz = _z_component(p.G), _z_component(p.F)
    if gz is not None and fz is not None and isinstance(p.J, ConstantProfile):
        return prop_constant_parallel(p.J.value / 2.0, gz, fz, t - p.t0)
    return None


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _reim(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_to_json(m: np.ndarray) -> list:
    return [[_reim(z) for z in row] for row in np.asarray(m)]


def vector_to_json(v: np.ndarray) -> list:
    return [_reim(z) for z in np.asarray(v)]


def _write_text(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _write_json(path: str | None, doc):
    _write_text(path, json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_propagate(args) -> int:
    problem = load_problem(args.problem)
    t = args.t
    method = args.method

    prop = None
    if method in ("auto", "closed"):
        prop = dispatch_closed_form(problem, t)
        if prop is None and method == "closed":
            raise NoClosedForm(
                "no closed-form family covers this problem; "
                "use --method auto or --method oracle")
    if prop is None:
        prop = oracle.integrate_propagator(problem, problem.t0, t)

    doc = {
        "method": prop.method,
        "t0": problem.t0,
        "t1": t,
        "unitarity_defect": prop.unitarity_defect,
    }
    if prop.stats:
        doc["stats"] = {k: v for k, v in prop.stats.items()}
    if args.check and prop.method != "rk4_oracle":
        truth = oracle.integrate_propagator(problem, problem.t0, t)
        doc["oracle_max_diff"] = linalg.max_abs(prop.matrix - truth.matrix)

    if args.state is not None:
        try:
            with open(args.state, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot read state file: {exc}") from exc
        if (not isinstance(raw, list) or len(raw) != 4
                or not all(isinstance(x, list) and len(x) == 2 for x in raw)):
            raise SchemaError("state file must hold 4 [re, im] pairs")
        psi0 = np.array([complex(a, b) for a, b in raw])
        doc["state"] = vector_to_json(prop.matrix @ psi0)
    else:
        doc["matrix"] = matrix_to_json(prop.matrix)
    _write_json(args.out, doc)
    return EXIT_OK


def _parse_triple(text: str, what: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise SchemaError(f"{what} must be three comma-separated numbers")
    try:
        return tuple(float(x) for x in parts)
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from exc


def cmd_spectrum(args) -> int:
    a = _parse_triple(args.a, "--a")
    b = _parse_triple(args.b, "--b")
    res = spectrum.solve_levels(args.gamma, a, b)
    doc = {
        "gamma": args.gamma,
        "a": list(a),
        "b": list(b),
        "scale": res.scale,
        "roots": [float(x) for x in res.roots],
        "quartic": [float(c) for c in res.quartic],
        "eigenvectors": [vector_to_json(v) for v in res.vectors],
        "poly_residuals": [float(x) for x in res.poly_residuals],
        "vector_residuals": [float(x) for x in res.vector_residuals],
    }
    _write_json(args.out, doc)
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.points < 1:
        raise SchemaError("--points must be positive")
    grid = np.linspace(args.omega_min, args.omega_max, args.points)
    if np.any(grid == 0.0):
        raise SchemaError("omega grid must exclude 0")
    result = resonance.scan(args.A, args.A0, args.J, grid)
    lines = ["omega,p14_max,p21_max,p24_max,p3_leak,t14,t21,t24"]
    for r in result.rows:
        lines.append(",".join(repr(float(x)) for x in
                              (r.omega, r.p14_max, r.p21_max, r.p24_max,
                               r.p3_leak, r.t14, r.t21, r.t24)))
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    mutate = os.environ.get("TWOSPIN_MUTATE")
    outcomes = verify.run_checks(quick=args.quick, mutate=mutate,
                                 emit=lambda line: print(line))
    failed = [o for o in outcomes if not o.ok]
    total = sum(o.seconds for o in outcomes)
    print(f"{len(outcomes) - len(failed)}/{len(outcomes)} checks passed "
          f"in {total:.1f}s")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twospin",
        description="Evolution, spectra and resonances of two coupled spins")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="evolve a problem file to time t")
    p.add_argument("--problem", required=True, help="problem JSON path")
    p.add_argument("--t", type=float, required=True, help="end time")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--state", help="initial state JSON (4 [re,im] pairs)")
    group.add_argument("--full-matrix", action="store_true",
                       help="emit the full propagator matrix (default)")
    p.add_argument("--method", choices=("auto", "closed", "oracle"),
                   default="auto")
    p.add_argument("--check", action="store_true",
                   help="cross-check a closed form against the oracle")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(fn=cmd_propagate)

    s = sub.add_parser("spectrum", help="levels for constant fields/coupling")
    s.add_argument("--gamma", type=float, required=True,
                   help="half the constant coupling")
    s.add_argument("--a", required=True, help="second-spin field x,y,z")
    s.add_argument("--b", required=True, help="first-spin field x,y,z")
    s.add_argument("--out", help="output path (default stdout)")
    s.set_defaults(fn=cmd_spectrum)

    c = sub.add_parser("scan", help="resonance sweep over drive frequency")
    c.add_argument("--A", type=float, required=True)
    c.add_argument("--A0", type=float, required=True)
    c.add_argument("--J", type=float, required=True)
    c.add_argument("--omega-min", type=float, required=True)
    c.add_argument("--omega-max", type=float, required=True)
    c.add_argument("--points", type=int, default=101)
    c.add_argument("--out", help="CSV path (default stdout)")
    c.set_defaults(fn=cmd_scan)

    v = sub.add_parser("verify", help="run the invariant suite")
    v.add_argument("--quick", action="store_true",
                   help="algebraic identities only")
    v.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaError, OutOfRange, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoClosedForm as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CLOSED_FORM
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except TwoSpinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
