"""Command line front end.

Subcommands: frenet, solve-lambda, associate, verify, example. Outputs are
deterministic (no timestamps, repr-formatted floats, atomic writes).

Exit codes: 0 verification passed, 1 verification failed, 2 formula audit
flag raised, 64 usage or parse error, 65 data error (grid misalignment,
domain violations, degenerate configurations). No other codes occur.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import io as cio
from .association import AssociationSpec, associate
from .errors import (
    AlignmentError,
    CurveMatesError,
    ParseError,
    SpecificationError,
    UsageError,
)
from .geometry import CurveSpec, SampledCurve, sample_curve
from .solvers import (
    LambdaSolution,
    lambda_constant,
    lambda_half_curvature,
    lambda_helix_hyperbolic,
    lambda_involute,
    solve_constraint_ode,
    solve_linear,
    solve_riccati,
)
from .verify import Tolerances, check_association

DEFAULT_GRID = (0.0, 2.0 * math.pi, 2001)
_VERDICT_EXIT = {"pass": 0, "fail": 1, "formula-audit-flag": 2}
ENV_TOL_PREFIX = "CURVEMATES_TOL_"

_PLOT_SCRIPT = """\
#!/usr/bin/env python3
\"\"\"Plot a base curve and its associated mate from the emitted CSV files.\"\"\"
import csv
import sys

import matplotlib.pyplot as plt


def read_columns(path):
    with open(path) as handle:
        rows = [r for r in csv.reader(line for line in handle if not line.startswith("#"))]
    header, data = rows[0], rows[1:]
    return {name: [float(r[i]) for r in data] for i, name in enumerate(header)}


def main(argv):
    mate = read_columns(argv[1] if len(argv) > 1 else "mate.csv")
    ax = plt.figure().add_subplot(projection="3d")
    ax.plot(mate["x"], mate["y"], mate["z"], label="base")
    ax.plot(mate["xs"], mate["ys"], mate["zs"], label="mate")
    ax.legend()
    plt.show()


if __name__ == "__main__":
    main(sys.argv)
"""


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting (argparse's own exit code 2
    would collide with the audit-flag exit code)."""

    def error(self, message):
        raise UsageError(message)


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo_s, hi_s, n_s = text.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError:
        raise UsageError(f"--grid expects min:max:n, got {text!r}") from None
    if not (lo < hi and n >= 7):
        raise UsageError("--grid requires min < max and n >= 7")
    return np.linspace(lo, hi, n)


def _parse_curve(text: str) -> CurveSpec:
    text = text.strip()
    if text.startswith("{"):
        return cio.curve_from_json(text)
    if not os.path.exists(text):
        raise UsageError(f"curve file not found: {text}")
    with open(text) as handle:
        return cio.curve_from_json(handle.read())


def _parse_coeffs(text: str) -> tuple[float, float]:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"--coeffs expects two comma-separated reals, got {text!r}") from None
    if len(parts) != 2:
        raise UsageError("--coeffs expects exactly two values")
    return parts[0], parts[1]


def _family_spec(family: str, coeffs: tuple[float, float] | None) -> AssociationSpec:
    family = family.upper()
    if len(family) != 2 or family[0] not in "TNB" or family[1] not in "OPR":
        raise UsageError(f"--family must be one of TO,TP,TR,NO,NP,NR,BO,BP,BR, got {family!r}")
    if coeffs is None:
        coeffs = (1.0, 1.0)
    try:
        return AssociationSpec(vector=family[0], plane=family[1], coeffs=coeffs)
    except SpecificationError as exc:
        raise UsageError(str(exc)) from None


def _tolerances(args) -> Tolerances:
    tols = Tolerances()
    overrides = {}
    for key, value in os.environ.items():
        if key.startswith(ENV_TOL_PREFIX):
            overrides[key[len(ENV_TOL_PREFIX):].lower()] = value
    for item in args.tol or []:
        if "=" not in item:
            raise UsageError(f"--tol expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    try:
        return tols.replace(**overrides) if overrides else tols
    except (SpecificationError, ValueError) as exc:
        raise UsageError(f"bad tolerance override: {exc}") from None


def _named_constants(curve: CurveSpec) -> tuple[float, float]:
    if not curve.is_analytic:
        raise UsageError("this solver needs a named analytic curve (constant kappa, tau)")
    return curve.closed_form_curvature(), curve.closed_form_torsion()


def _solve_family_lambda(
    spec: AssociationSpec, curve: CurveSpec, base: SampledCurve, args
) -> LambdaSolution:
    """Default offset solver per family, driven by the CLI constants."""
    grid = base.grid
    code = spec.code
    kappa_arr = base.frames.kappa
    if code in ("TO", "TR"):
        ratio = spec.ratio()
        if args.c1 is not None:
            c1 = args.c1
        else:
            kappa0 = float(kappa_arr[0])
            if abs(ratio * kappa0) < 1e-12:
                raise UsageError("cannot derive c1 from c0: ratio*kappa vanishes")
            c1 = 1.0 / (ratio * kappa0) + (args.c0 or 0.0)
        return solve_linear(kappa_arr, ratio, c1, grid)
    if code == "TP":
        return lambda_involute(args.c0 or 0.0, grid)
    if code == "NO":
        kappa, tau = _named_constants(curve)
        if args.c1 is not None or args.c2 is not None:
            a, b = spec.coeffs
            return lambda_helix_hyperbolic(a, b, kappa, tau,
                                           args.c1 or 0.0, args.c2 or 0.0, grid)
        return lambda_half_curvature(kappa, grid)
    if code == "NR":
        kappa, tau = _named_constants(curve)
        return solve_constraint_ode("NR", kappa, tau, (0.0, 0.0), grid, ansatz="constant")
    if code in ("NP", "BP"):
        value = args.lambda0 if args.lambda0 is not None else 1.0
        return lambda_constant(value, grid)
    if code == "BO":
        kappa, tau = _named_constants(curve)
        lam0 = args.lambda0 if args.lambda0 is not None else 0.0
        return solve_riccati(kappa, tau, lam0, grid)
    if code == "BR":
        kappa, tau = _named_constants(curve)
        lam0 = args.lambda0 if args.lambda0 is not None else 0.5
        lam0p = args.lambda0_prime if args.lambda0_prime is not None else 0.0
        return solve_constraint_ode("BR", kappa, tau, (lam0, lam0p), grid)
    raise UsageError(f"no default solver for family {code}")


def _write(path: str, text: str) -> None:
    cio.atomic_write_text(path, text)


def _out_path(args, name: str) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return os.path.join(out, name)


def _load_lambda(path: str) -> LambdaSolution:
    if not os.path.exists(path):
        raise UsageError(f"lambda file not found: {path}")
    with open(path) as handle:
        return cio.lambda_from_csv(handle.read())


def cmd_frenet(args) -> int:
    curve = _parse_curve(args.curve)
    grid = _parse_grid(args.grid)
    base = sample_curve(curve, grid)
    if args.format == "json":
        import json

        f = base.frames
        obj = {
            "s": base.grid.tolist(),
            "position": base.positions.tolist(),
            "T": f.T.tolist(), "N": f.N.tolist(), "B": f.B.tolist(),
            "kappa": f.kappa.tolist(), "tau": f.tau.tolist(),
        }
        _write(_out_path(args, "frenet.json"), json.dumps(obj, sort_keys=True) + "\n")
    else:
        _write(_out_path(args, "base.csv"), cio.sampled_curve_to_csv(base))
    return 0


def cmd_solve_lambda(args) -> int:
    curve = _parse_curve(args.curve)
    grid = _parse_grid(args.grid)
    base = sample_curve(curve, grid)
    spec = _family_spec(args.family, _parse_coeffs(args.coeffs) if args.coeffs else None)
    sol = _solve_family_lambda(spec, curve, base, args)
    _write(_out_path(args, "lambda.csv"), cio.lambda_to_csv(sol))
    return 0


def cmd_associate(args) -> int:
    curve = _parse_curve(args.curve)
    grid = _parse_grid(args.grid)
    base = sample_curve(curve, grid)
    spec = _family_spec(args.family, _parse_coeffs(args.coeffs) if args.coeffs else None)
    if args.lambda_csv:
        sol = _load_lambda(args.lambda_csv)
    else:
        sol = _solve_family_lambda(spec, curve, base, args)
    pred = associate(base, spec, sol)
    _write(_out_path(args, "mate.csv"), cio.mate_to_csv(pred))
    return 0


def cmd_verify(args) -> int:
    curve = _parse_curve(args.curve)
    grid = _parse_grid(args.grid)
    base = sample_curve(curve, grid)
    spec = _family_spec(args.family, _parse_coeffs(args.coeffs) if args.coeffs else None)
    tols = _tolerances(args)
    if args.lambda_csv:
        sol = _load_lambda(args.lambda_csv)
        sol.require_grid(grid)
    else:
        sol = _solve_family_lambda(spec, curve, base, args)
    pred = associate(base, spec, sol)
    mate = pred.mate
    if args.mate:
        if not os.path.exists(args.mate):
            raise UsageError(f"mate file not found: {args.mate}")
        with open(args.mate) as handle:
            mate_grid, mate_pos, _ = cio.mate_positions_from_csv(handle.read())
        if mate_grid.shape != grid.shape or not np.allclose(mate_grid, grid, atol=1e-12):
            raise AlignmentError("mate file grid does not match --grid")
        mate = SampledCurve(grid=mate_grid, positions=mate_pos)
    report = check_association(base, mate, spec, lam_sol=sol, predicted=pred,
                               tolerances=tols)
    _write(_out_path(args, "report.json"), cio.report_to_json(report))
    print(f"verdict: {report.verdict}")
    return _VERDICT_EXIT[report.verdict]


def _example_setup(index: int, c0: float, grid: np.ndarray):
    """Base curve, family spec, and offset solution of the worked examples."""
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    if index == 1:
        curve = CurveSpec.circle(1.0)
        base = sample_curve(curve, grid)
        spec = AssociationSpec(vector="T", plane="O", coeffs=(1.0, 1.0))
        sol = solve_linear(base.frames.kappa, 1.0, 1.0 + c0, grid)
    elif index == 2:
        curve = CurveSpec.helix(inv_sqrt2, inv_sqrt2)
        base = sample_curve(curve, grid)
        spec = AssociationSpec(vector="T", plane="P", coeffs=(-inv_sqrt2, inv_sqrt2))
        sol = lambda_involute(c0, grid)
    elif index == 3:
        curve = CurveSpec.helix(inv_sqrt2, inv_sqrt2)
        base = sample_curve(curve, grid)
        spec = AssociationSpec(vector="T", plane="R", coeffs=(1.0, 1.0))
        sol = solve_linear(base.frames.kappa, 1.0, math.sqrt(2.0) + c0, grid)
    else:
        raise UsageError("example index must be 1, 2, or 3")
    return base, spec, sol


def cmd_example(args) -> int:
    grid = _parse_grid(args.grid)
    c0 = args.c0 if args.c0 is not None else 0.0
    base, spec, sol = _example_setup(args.index, c0, grid)
    tols = _tolerances(args)
    pred = associate(base, spec, sol)
    report = check_association(base, pred.mate, spec, lam_sol=sol, predicted=pred,
                               tolerances=tols)
    _write(_out_path(args, "base.csv"), cio.sampled_curve_to_csv(base))
    _write(_out_path(args, "lambda.csv"), cio.lambda_to_csv(sol))
    _write(_out_path(args, "mate.csv"), cio.mate_to_csv(pred))
    _write(_out_path(args, "report.json"), cio.report_to_json(report))
    if args.emit_plot_script:
        _write(_out_path(args, "plot_mates.py"), _PLOT_SCRIPT)
    print(f"verdict: {report.verdict}")
    return _VERDICT_EXIT[report.verdict]


def _add_common(sub: argparse.ArgumentParser, curve_required: bool = True) -> None:
    sub.add_argument("--grid", default=f"{DEFAULT_GRID[0]}:{DEFAULT_GRID[1]}:{DEFAULT_GRID[2]}",
                     help="sample grid as min:max:n (default [0, 2pi] with 2001 points)")
    sub.add_argument("--out", default=None, help="output directory (default .)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--tol", action="append", metavar="KEY=VAL",
                     help="tolerance override (also CURVEMATES_TOL_<KEY> env vars)")
    if curve_required:
        sub.add_argument("--curve", required=True,
                         help="curve JSON (inline or a file path)")
    sub.add_argument("--family", help="family code: TO TP TR NO NP NR BO BP BR")
    sub.add_argument("--coeffs", help="plane coefficients, e.g. 1,1")
    sub.add_argument("--c0", type=float, default=None)
    sub.add_argument("--c1", type=float, default=None)
    sub.add_argument("--c2", type=float, default=None)
    sub.add_argument("--lambda0", type=float, default=None)
    sub.add_argument("--lambda0-prime", dest="lambda0_prime", type=float, default=None)
    sub.add_argument("--lambda-csv", dest="lambda_csv", default=None,
                     help="load the offset function from a CSV instead of solving")


def build_parser() -> _Parser:
    parser = _Parser(prog="curvemates",
                     description="Frenet frames, offset functions, associated mates, verification")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("frenet", help="sample a curve with its Frenet frames")
    _add_common(p)

    p = subs.add_parser("solve-lambda", help="solve the offset function of a family")
    _add_common(p)

    p = subs.add_parser("associate", help="construct an associated mate")
    _add_common(p)

    p = subs.add_parser("verify", help="verify a mate against its family relations")
    _add_common(p)
    p.add_argument("--mate", default=None, help="verify this mate CSV instead of a fresh construction")

    p = subs.add_parser("example", help="reproduce one of the three worked examples")
    p.add_argument("index", type=int, choices=(1, 2, 3))
    _add_common(p, curve_required=False)
    p.add_argument("--emit-plot-script", action="store_true")
    return parser


_COMMANDS = {
    "frenet": cmd_frenet,
    "solve-lambda": cmd_solve_lambda,
    "associate": cmd_associate,
    "verify": cmd_verify,
    "example": cmd_example,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        required_family = args.command in ("solve-lambda", "associate", "verify")
        if required_family and not args.family:
            raise UsageError(f"{args.command} requires --family")
        return _COMMANDS[args.command](args)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    except CurveMatesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 65


if __name__ == "__main__":
    sys.exit(main())
