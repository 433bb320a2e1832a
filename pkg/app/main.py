from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.modules.analytic import (
    hbar_formula,
    hbar_stripes_linearized,
    invariant_measure_for_control,
    lbar_constant_control,
    quad1d_alpha_star,
)
from app.modules.cell_pde import CellSolver
from app.modules.dirichlet import Arrangement, DirichletSolver, build_medium, homogenized_for
from app.modules.errors import HomogError, SolverError, ValidationError
from app.modules.exporter import (
    CORRECTOR_COLUMNS_1D,
    CORRECTOR_COLUMNS_2D,
    ERRORMAP_COLUMNS,
    FIELD_COLUMNS,
    MEASURE_COLUMNS_1D,
    MEASURE_COLUMNS_2D,
    RATE_COLUMNS,
    SWEEP_COLUMNS,
    RunStore,
    write_csv,
    write_json,
)
from app.modules.grids import ControlGrid, IntervalGrid, PeriodicGrid
from app.modules.invariant_lp import InvariantMeasureLP
from app.modules.operators import ControlPoint, OperatorKind, OperatorSpec, SymMat, constituents, envelopes
from app.modules.rates import NORMS, RateStudyConfig, error_norms, run_study
from app.modules.settings import Settings

logger = logging.getLogger("hjb_homog")

PRESETS: Dict[str, Dict[str, Any]] = {
    "max2lin": {"kind": "max_two_linear", "a0": {"alternating": [1.0, 0.5], "pieces": 2},
                "a1": {"alternating": [1.5, 2.5], "pieces": 2}, "A": 1.0, "h": 1.0},
    "max2lin20": {"kind": "max_two_linear", "a0": {"alternating": [1.0, 0.5], "pieces": 20},
                  "a1": {"alternating": [1.5, 2.5], "pieces": 20}, "A": 1.0, "h": 1.0},
    "max2lin2d": {"kind": "max_two_linear", "dim": 2, "a0": {"alternating": [1.0, 0.5], "pieces": 2},
                  "a1": {"alternating": [1.5, 2.5], "pieces": 2}, "A": [1.0, 0.0, 2.0], "h": 1.0},
    "quad": {"kind": "quad_1d", "a": 1.0, "b": {"breakpoints": [0.0, 0.5], "values": [0.0, 1.0]}, "c": 1.0},
    "stripes": {"kind": "stripes_pucci", "a": 1.0, "b": {"breakpoints": [0.0, 0.5], "values": [0.0, 2.0]}},
}

COLUMN_HELP = """CSV column orders:
  homogenize (pde)  y1[,y2],u,H
  homogenize (lp)   node,y1[,y2],alpha,orientation,weight
  measure           node,y1[,y2],alpha,orientation,weight
  errormap          lambda1,lambda2,phi,hbar_formula,hbar_pde,abs_error,hbar_linearized,linearized_error,status
  sweep             Q,hbar,envelope_lower,envelope_upper,status
  rates             eps,sample,norm,error
  dirichlet         x,u,ubar
"""


# ---------------------------------------------------------------- input parsing

def load_operator(raw: str, alpha_cap: float = 10.0) -> OperatorSpec:
    """Preset name, path to a JSON file, or inline JSON; ``alpha_cap`` fills in a missing quadratic cap."""
    if raw in PRESETS:
        return OperatorSpec.from_dict(dict(PRESETS[raw]), alpha_cap)
    try:
        if os.path.isfile(raw):
            with open(raw, encoding="utf-8") as f:
                data = json.load(f)
        else:
            data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"--op is neither a preset, a JSON file nor inline JSON: {exc}") from exc
    return OperatorSpec.from_dict(data, alpha_cap)


def parse_floats(raw: str) -> List[float]:
    """Comma-separated numbers; fractions such as 1/20 are accepted."""
    try:
        return [float(Fraction(p.strip())) for p in raw.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse number list {raw!r}") from exc


def parse_range(raw: str) -> List[float]:
    """Either a list `a,b,c` or an inclusive range `lo:hi:count`."""
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ValidationError(f"range must be lo:hi:count, got {raw!r}")
        try:
            lo, hi = (float(Fraction(p)) for p in parts[:2])
            count = int(parts[2])
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse range {raw!r}") from exc
        if count < 1:
            raise ValidationError(f"range count must be at least 1, got {count}")
        return [float(v) for v in np.linspace(lo, hi, count)]
    return parse_floats(raw)


def parse_bool(raw: str) -> bool:
    key = raw.strip().lower()
    if key in ("1", "true", "yes", "on"):
        return True
    if key in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {raw!r}")


def resolve_q(args: argparse.Namespace, op: OperatorSpec) -> SymMat:
    if args.eigs:
        eigs = parse_floats(args.eigs)
        if len(eigs) != 2:
            raise ValidationError("--eigs takes l1,l2")
        Q = SymMat.from_eigs(eigs[0], eigs[1], args.phi)
    elif args.Q is not None:
        Q = SymMat.parse(args.Q)
    else:
        raise ValidationError("give --Q or --eigs")
    if Q.dim != op.dim:
        raise ValidationError(f"Q is {Q.dim}D but the operator is {op.dim}D")
    return Q


def reported(op: OperatorSpec, value: float, subtract: bool) -> float:
    return value - op.constant_term if subtract else value


def grid_size(args: argparse.Namespace, op: OperatorSpec) -> int:
    return args.grid_n or (20 if op.dim == 1 else 32)


def control_count(args: argparse.Namespace, op: OperatorSpec, settings: Settings) -> int:
    if args.n_alpha:
        return args.n_alpha
    return 2 if op.kind is OperatorKind.MAX_TWO_LINEAR else settings.n_alpha


def cell_solver(args: argparse.Namespace, settings: Settings, op: OperatorSpec) -> CellSolver:
    return CellSolver(tol=args.tol or settings.tol_for(op.dim), max_iter=settings.max_iter, cfl=settings.cfl)


def resolved_config(args: argparse.Namespace, settings: Settings, **extra: Any) -> Dict[str, Any]:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    config.update(extra)
    config["settings"] = settings.as_dict()
    return config


# ---------------------------------------------------------------- commands

Rows = Tuple[Sequence[str], Iterable[Sequence[Any]]]
CommandOutput = Tuple[Dict[str, Any], Optional[Rows]]


def cmd_homogenize(args: argparse.Namespace, settings: Settings) -> CommandOutput:
    op = load_operator(args.op, settings.alpha_cap)
    Q = resolve_q(args, op)
    rows: Optional[Rows] = None
    extra: Dict[str, Any] = {}
    if args.method == "formula":
        raw = hbar_formula(op, Q)
        result: Dict[str, Any] = {"hbar_raw": raw, "method": "formula",
                                  "lower_bound": op.kind is OperatorKind.STRIPES_PUCCI}
    elif args.method == "pde":
        n = grid_size(args, op)
        homog, corrector = cell_solver(args, settings, op).solve(op, Q, PeriodicGrid(op.dim, n))
        raw = homog.hbar
        result = homog.to_dict() | {"hbar_raw": raw}
        rows = (CORRECTOR_COLUMNS_1D if op.dim == 1 else CORRECTOR_COLUMNS_2D, corrector.rows(op, Q))
        extra["grid_n"] = n
    else:
        n = grid_size(args, op)
        n_alpha = control_count(args, op, settings)
        homog, measure = InvariantMeasureLP(n_alpha, args.tol or settings.lp_tol).solve(op, Q, PeriodicGrid(op.dim, n))
        raw = homog.hbar
        result = homog.to_dict() | {"hbar_raw": raw}
        rows = (MEASURE_COLUMNS_1D if op.dim == 1 else MEASURE_COLUMNS_2D, measure.rows())
        extra.update(grid_n=n, n_alpha=n_alpha)
    result["hbar"] = reported(op, raw, args.subtract_constant)
    result["Q"] = Q.as_list()
    return {"command": "homogenize", "config": resolved_config(args, settings, **extra), "result": result}, rows


def _errormap_point(task: Tuple[Dict[str, Any], float, float, float, int, float, int, float]) -> Dict[str, Any]:
    op_dict, l1, l2, phi, n, tol, max_iter, cfl = task
    op = OperatorSpec.from_dict(op_dict)
    Q = SymMat.from_eigs(l1, l2, phi)
    point: Dict[str, Any] = {"lambda1": l1, "lambda2": l2, "phi": phi}
    formula = hbar_formula(op, Q)
    linearized = hbar_stripes_linearized(op, Q)
    try:
        pde = CellSolver(tol=tol, max_iter=max_iter, cfl=cfl).hbar(op, Q, n)
    except SolverError as exc:
        return point | {"hbar_formula": formula, "hbar_pde": math.nan, "abs_error": math.nan,
                        "hbar_linearized": linearized, "linearized_error": math.nan, "status": f"failed: {exc}"}
    return point | {"hbar_formula": formula, "hbar_pde": pde, "abs_error": abs(pde - formula),
                    "hbar_linearized": linearized, "linearized_error": abs(pde - linearized), "status": "ok"}


def fan_out(fn: Callable[[Any], Dict[str, Any]], tasks: List[Any], workers: int) -> List[Dict[str, Any]]:
    """Map in order; a process pool when workers > 1."""
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(task) for task in tasks]


def cmd_errormap(args: argparse.Namespace, settings: Settings) -> CommandOutput:
    op = load_operator(args.op, settings.alpha_cap)
    if op.kind is not OperatorKind.STRIPES_PUCCI:
        raise ValidationError("the error map is defined for the stripes operator")
    lambdas = parse_range(args.lambdas)
    phis = parse_floats(args.phis)
    n = grid_size(args, op)
    workers = args.workers or settings.workers
    tol = args.tol or settings.tol_2d
    tasks = [(op.to_dict(), l1, l2, phi, n, tol, settings.max_iter, settings.cfl)
             for phi in phis for l1 in lambdas for l2 in lambdas]
    points = fan_out(_errormap_point, tasks, workers)
    for point in points:
        if point["status"] != "ok":
            logger.warning("error map point (%g, %g, %g) %s", point["lambda1"], point["lambda2"], point["phi"],
                           point["status"])

    errors = np.array([p["abs_error"] for p in points], dtype=float)
    finite = errors[np.isfinite(errors)]
    summary: Dict[str, Any] = {"points": len(points), "failed": int(len(points) - finite.size)}
    if finite.size:
        q50, q90, q99 = np.quantile(finite, [0.5, 0.9, 0.99])
        summary.update(median=float(q50), q90=float(q90), q99=float(q99), max=float(finite.max()),
                       above_1e_2=int((finite > 1e-2).sum()))
    rows = [[p[c] for c in ERRORMAP_COLUMNS] for p in points]
    payload = {"command": "errormap", "config": resolved_config(args, settings, grid_n=n, workers=workers),
               "result": {"summary": summary, "map": points}}
    return payload, (ERRORMAP_COLUMNS, rows)


def cmd_rates(args: argparse.Namespace, settings: Settings) -> CommandOutput:
    op = load_operator(args.op, settings.alpha_cap)
    cfg = RateStudyConfig(
        op=op,
        arrangement=Arrangement.parse(args.arrangement),
        eps_list=tuple(parse_floats(args.eps_list)),
        samples=args.samples,
        base_seed=args.seed,
        rhs=args.rhs,
        norms=tuple(args.norms.split(",")),
        tol=settings.dirichlet_tol,
        max_iter=settings.max_iter,
        workers=args.workers or settings.workers,
    )
    result = run_study(cfg)
    config = resolved_config(args, settings, study=cfg.to_dict())
    return {"command": "rates", "config": config, "result": result.to_dict()}, (RATE_COLUMNS, result.csv_rows())


def cmd_dirichlet(args: argparse.Namespace, settings: Settings) -> CommandOutput:
    op = load_operator(args.op, settings.alpha_cap)
    eps = parse_floats(args.eps)
    if len(eps) != 1:
        raise ValidationError("--eps takes a single value")
    medium = build_medium(eps[0], Arrangement.parse(args.arrangement), args.seed)
    homogenized = homogenized_for(op, args.rhs)
    guess = homogenized(IntervalGrid(medium.cells).nodes)
    solution = DirichletSolver(settings.dirichlet_tol, settings.max_iter).solve(constituents(op), medium, args.rhs,
                                                                               u0=guess)
    result = {
        "eps": medium.eps,
        "cells": medium.cells,
        "arrangement": medium.arrangement.value,
        "seed": medium.seed,
        "rhs": args.rhs,
        "r": homogenized.r,
        "iterations": solution.iterations,
        "residual": solution.residual,
        "errors": error_norms(solution.values - homogenized(solution.nodes), medium.eps),
        "labels": medium.labels.tolist(),
    }
    payload = {"command": "dirichlet", "config": resolved_config(args, settings), "result": result}
    return payload, (FIELD_COLUMNS, solution.rows(homogenized))


def best_constant_control(op: OperatorSpec, Q: SymMat, count: int) -> Optional[ControlPoint]:
    """The constant control with the largest homogenized linearization, when one is computable."""
    if op.kind is OperatorKind.QUAD_1D:
        try:
            return ControlPoint(quad1d_alpha_star(op, Q))
        except ValidationError:
            pass
    best, best_value = None, -math.inf
    for control in ControlGrid.uniform(op, count).points:
        try:
            value = lbar_constant_control(op, Q, control)
        except ValidationError:
            continue
        if value > best_value:
            best, best_value = control, value
    return best


def cmd_measure(args: argparse.Namespace, settings: Settings) -> CommandOutput:
    op = load_operator(args.op, settings.alpha_cap)
    Q = resolve_q(args, op)
    n = grid_size(args, op)
    n_alpha = control_count(args, op, settings)
    grid = PeriodicGrid(op.dim, n)
    homog, measure = InvariantMeasureLP(n_alpha, args.tol or settings.lp_tol).solve(op, Q, grid)
    density = measure.y1_density()
    result: Dict[str, Any] = {
        "hbar_raw": homog.hbar,
        "hbar": reported(op, homog.hbar, args.subtract_constant),
        "adjoint_residual": measure.adjoint_residual,
        "y1": grid.axis.tolist(),
        "y1_density": density.tolist(),
        "control_marginal": [{"alpha": c.value, "orientation": c.orientation, "weight": float(w)}
                             for c, w in zip(measure.controls.points, measure.control_marginal())],
    }
    control = best_constant_control(op, Q, n_alpha)
    if control is not None:
        try:
            analytic = invariant_measure_for_control(op, control)
        except ValidationError as exc:
            logger.info("no closed-form measure for this operator: %s", exc)
        else:
            expected = np.asarray(analytic(grid.axis), dtype=float)
            result["analytic"] = {"alpha": control.value, "orientation": control.orientation,
                                  "density": analytic.to_dict(),
                                  "max_density_gap": float(np.abs(expected - density).max())}
    payload = {"command": "measure", "config": resolved_config(args, settings, grid_n=n, n_alpha=n_alpha),
               "result": result}
    return payload, (MEASURE_COLUMNS_1D if op.dim == 1 else MEASURE_COLUMNS_2D, measure.rows())


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> CommandOutput:
    op = load_operator(args.op, settings.alpha_cap)
    if op.dim != 1:
        raise ValidationError("sweep tabulates 1D operators")
    n = grid_size(args, op)
    n_alpha = control_count(args, op, settings)
    points = []
    for q in parse_range(args.q_list):
        Q = SymMat.scalar(q)
        lower, upper = envelopes(op, Q)
        try:
            if args.method == "formula":
                value = hbar_formula(op, Q)
            elif args.method == "pde":
                value = cell_solver(args, settings, op).hbar(op, Q, n)
            else:
                value = InvariantMeasureLP(n_alpha, args.tol or settings.lp_tol).solve(op, Q, PeriodicGrid(1, n))[0].hbar
            status = "ok"
        except SolverError as exc:
            logger.warning("sweep Q=%g failed: %s", q, exc)
            value, status = math.nan, f"failed: {exc}"
        shift = op.constant_term if args.subtract_constant else 0.0
        points.append({"Q": q, "hbar": value - shift, "envelope_lower": lower - shift,
                       "envelope_upper": upper - shift, "status": status})
    payload = {"command": "sweep", "config": resolved_config(args, settings, grid_n=n, n_alpha=n_alpha),
               "result": {"points": points}}
    return payload, (SWEEP_COLUMNS, [[p[c] for c in SWEEP_COLUMNS] for p in points])


def cmd_runs(args: argparse.Namespace, settings: Settings) -> CommandOutput:
    runs = run_store(settings).list_runs(limit=args.limit)
    return {"command": "runs", "result": [{"run_id": r, "command": c, "created_at": t} for r, c, t in runs]}, None


def cmd_rerun(args: argparse.Namespace, settings: Settings) -> CommandOutput:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config!r}: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError(f"config {args.config!r} is not a JSON object")
        config = data.get("config", data)
        source = args.config
    else:
        if not args.run_id:
            raise ValidationError("give a run id or --config")
        record = run_store(settings).load_run(args.run_id)
        if record is None:
            raise ValidationError(f"no stored run {args.run_id!r}")
        config = record["config"]
        source = args.run_id
    command = config.get("command")
    if command not in RERUNNABLE:
        raise ValidationError(f"stored config has no re-runnable command: {command!r}")
    replay = build_parser().parse_args([command, "--op", "_"])
    for key, value in config.items():
        if key != "settings" and hasattr(replay, key):
            setattr(replay, key, value)
    payload, rows = COMMANDS[command](replay, settings)
    payload["rerun_of"] = source
    return payload, rows


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], CommandOutput]] = {
    "homogenize": cmd_homogenize,
    "errormap": cmd_errormap,
    "rates": cmd_rates,
    "dirichlet": cmd_dirichlet,
    "measure": cmd_measure,
    "sweep": cmd_sweep,
    "runs": cmd_runs,
    "rerun": cmd_rerun,
}
RERUNNABLE = ("homogenize", "errormap", "rates", "dirichlet", "measure", "sweep")


# ---------------------------------------------------------------- plumbing

def run_store(settings: Settings) -> RunStore:
    return RunStore(os.path.join(settings.data_dir, "runs.sqlite"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hjb-homog",
        description="Numerical homogenization of HJB operators: cell problems, invariant measures, rate studies.",
        epilog=COLUMN_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default from settings)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_q: bool = True) -> None:
        p.add_argument("--op", required=True, help=f"preset ({', '.join(PRESETS)}), JSON file or inline JSON")
        if needs_q:
            p.add_argument("--Q", default=None, help="q11 or q11,q12,q22")
            p.add_argument("--eigs", default=None, help="l1,l2 with Q = R_phi^T diag(l1, l2) R_phi (write --eigs=-1,2 for negative values)")
            p.add_argument("--phi", type=float, default=0.0, help="rotation angle in radians")
        p.add_argument("--grid-n", type=int, default=None, help="points per dimension (20 in 1D, 32 in 2D)")
        p.add_argument("--n-alpha", type=int, default=None, help="control grid size for the LP")
        p.add_argument("--tol", type=float, default=None, help="solver tolerance")
        p.add_argument("--subtract-constant", type=parse_bool, nargs="?", const=True, default=True,
                       help="report H̄ minus the operator's constant term (true or false)")
        p.add_argument("--no-subtract-constant", dest="subtract_constant", action="store_false")
        outputs(p)

    def outputs(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default=None, help="output file")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--no-store", action="store_true", help="do not record the run")

    p = sub.add_parser("homogenize", help="H̄(Q) by one route")
    common(p)
    p.add_argument("--method", choices=("pde", "lp", "formula"), default="formula")

    p = sub.add_parser("errormap", help="formula vs PDE over rotated diagonal Q (stripes operator)")
    common(p, needs_q=False)
    p.add_argument("--lambdas", default="-2:2:21", help="eigenvalue list or lo:hi:count (write --lambdas=-1:1:5)")
    p.add_argument("--phis", default="0", help="rotation angles in radians")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("rates", help="eps-convergence study of the 1D Dirichlet problem")
    p.add_argument("--op", required=True, help=f"preset ({', '.join(PRESETS)}), JSON file or inline JSON")
    p.add_argument("--arrangement", choices=[a.value for a in Arrangement], default="periodic")
    p.add_argument("--eps-list", default="1/10,1/20,1/40,1/80,1/160,1/320")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rhs", type=float, default=2.0)
    p.add_argument("--norms", default=",".join(NORMS))
    p.add_argument("--workers", type=int, default=None)
    outputs(p)

    p = sub.add_parser("dirichlet", help="one eps-scale Dirichlet solve against the homogenized solution")
    p.add_argument("--op", required=True, help=f"preset ({', '.join(PRESETS)}), JSON file or inline JSON")
    p.add_argument("--eps", default="1/40", help="cell width, 1/eps an integer")
    p.add_argument("--arrangement", choices=[a.value for a in Arrangement], default="periodic")
    p.add_argument("--seed", type=int, default=0, help="medium seed for the random arrangement")
    p.add_argument("--rhs", type=float, default=2.0)
    outputs(p)

    p = sub.add_parser("measure", help="optimal discrete invariant measure from the LP")
    common(p)

    p = sub.add_parser("sweep", help="H̄ and the operator envelopes over a list of scalar Q")
    common(p, needs_q=False)
    p.add_argument("--q-list", default="-2:2:9", help="Q list or lo:hi:count")
    p.add_argument("--method", choices=("pde", "lp", "formula"), default="formula")

    p = sub.add_parser("runs", help="list stored runs")
    p.add_argument("--limit", type=int, default=10)
    outputs(p)

    p = sub.add_parser("rerun", help="re-execute a stored or emitted configuration")
    p.add_argument("run_id", nargs="?", default=None)
    p.add_argument("--config", default=None, help="JSON file emitted by an earlier run")
    outputs(p)
    return parser


def emit(args: argparse.Namespace, payload: Dict[str, Any], rows: Optional[Rows]) -> None:
    if args.out:
        if args.format == "csv" and rows is not None:
            write_csv(rows[0], rows[1], args.out)
        else:
            write_json(payload, args.out)
        logger.info("wrote %s", args.out)
        write_json(payload, stream=sys.stdout)
    elif args.format == "csv" and rows is not None:
        write_csv(rows[0], rows[1], stream=sys.stdout)
    else:
        write_json(payload, stream=sys.stdout)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.load()
        logging.basicConfig(
            level=(args.log_level or settings.log_level).upper(),
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        payload, rows = COMMANDS[args.command](args, settings)
        if args.command != "runs" and not args.no_store:
            payload["run_id"] = run_store(settings).save_run(payload["command"], payload["config"],
                                                             payload["result"])
        emit(args, payload, rows)
    except HomogError as exc:
        logger.error("%s: %s", exc.__class__.__name__, exc)
        write_json({"error": {"type": exc.__class__.__name__, "message": str(exc)}}, stream=sys.stdout)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
