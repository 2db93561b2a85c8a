"""Command-line front end: ``eucone <command> [options]``.

Exit status: 0 when the verdict holds or the command completed cleanly,
1 when the verdict is negative, 2 on usage or input errors (with a JSON
error object on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import first_order, oracle, scalarization, zero_order
from .certificate import Verdict
from .cones import EuclideanCone, family_bounds, ideal_direction
from .errors import EuconeError
from .io import as_finite, load_problem, make_report, write_atomic
from .problems import SmoothProblem


COMMANDS = ("certify", "frontier", "sweep", "scalarize", "firstorder", "dualcheck")
SWEEP_POINTS = 9
GEOMETRY_TOL = 1e-9
RESIDUAL_TOL = 1e-6


class UsageError(EuconeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    problem_path: str | None = None
    s: str = "upper"
    mode: str = "strong"
    tol: float | None = None
    output_format: str = "json"
    seed: int = 0
    point: str | None = None
    weights: str | None = None
    samples: int = 10_000
    n: int | None = None
    out: str | None = None


def resolve_s(spec, n):
    bounds = family_bounds(n)
    named = {"upper": bounds.s_min, "lower": bounds.s_max, "selfdual": 1.0 / math.sqrt(2.0)}
    if spec in named:
        return named[spec]
    try:
        return float(spec)
    except ValueError:
        raise UsageError(f"--s must be a number or one of upper/lower/selfdual, got {spec!r}") from None


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return "" if v is None else str(v)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _is_upper(s, n):
    return abs(s - family_bounds(n).s_min) <= 1e-12


def _need_problem(cfg):
    if cfg.problem_path is None:
        raise UsageError(f"{cfg.command} requires --problem")
    return load_problem(cfg.problem_path)


def _need_point(cfg):
    if cfg.point is None:
        raise UsageError(f"{cfg.command} requires --point")
    return cfg.point


# ---------------------------------------------------------------------------
# commands; each returns (exit_status, problem, parameters, result, csv_text)


def cmd_certify(cfg):
    problem = as_finite(_need_problem(cfg))
    pid = _need_point(cfg)
    s = resolve_s(cfg.s, problem.n)
    tol = cfg.tol or GEOMETRY_TOL
    if cfg.mode == "weak":
        certs = [scalarization.weak_optimal(problem, pid, s, tol)]
        if _is_upper(s, problem.n):
            certs.append(zero_order.weak_upper_optimal(problem, pid, tol))
    else:
        certs = [scalarization.strong_optimal(problem, pid, s, tol)]
        if _is_upper(s, problem.n):
            certs.append(zero_order.strong_upper_optimal(problem, pid, tol))
    verdict = certs[0].verdict
    result = {"verdict": verdict.value, "certificates": [c.to_dict() for c in certs]}
    rows = [
        (c.test, c.verdict.value, c.point, c.witness, c.reason, *(c.residuals.get(k) for k in ("gap", "max_cross")))
        for c in certs
    ]
    text = _csv(["test", "verdict", "point", "witness", "reason", "gap", "max_cross"], rows)
    params = {"s": s, "mode": cfg.mode, "tol": tol, "point": pid}
    return (0 if verdict is Verdict.OPTIMAL else 1), problem, params, result, text


def cmd_frontier(cfg):
    problem = as_finite(_need_problem(cfg))
    s = resolve_s(cfg.s, problem.n)
    tol = cfg.tol or GEOMETRY_TOL
    rep = oracle.brute_force_optimal_set(problem, s, cfg.mode, tol)
    opt, par = set(rep.optimal_ids), set(rep.pareto_ids)
    header = ["id", *(f"F{i + 1}" for i in range(problem.n)), "optimal", "pareto"]
    rows = [
        (i, *(float(v) for v in u), int(i in opt), int(i in par))
        for i, u in zip(problem.ids, problem.utilities)
    ]
    params = {"s": s, "mode": cfg.mode, "tol": tol}
    return 0, problem, params, rep.to_dict(), _csv(header, rows)


def cmd_sweep(cfg):
    problem = as_finite(_need_problem(cfg))
    tol = cfg.tol or GEOMETRY_TOL
    grid = family_bounds(problem.n).grid(SWEEP_POINTS)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = oracle.nesting_check(problem, grid, cfg.mode, tol)
    rows = [(float(s), cfg.mode, size, rep.pareto_size) for s, size in zip(rep.s_grid, rep.sizes)]
    text = _csv(["s", "mode", "optimal_count", "pareto_count"], rows)
    params = {"mode": cfg.mode, "tol": tol, "points": SWEEP_POINTS}
    return (0 if rep.ok else 1), problem, params, rep.to_dict(), text


def cmd_scalarize(cfg):
    problem = as_finite(_need_problem(cfg))
    if cfg.weights is None:
        raise UsageError("scalarize requires --lambda")
    try:
        w = np.array([float(v) for v in cfg.weights.split(",")])
    except ValueError:
        raise UsageError(f"--lambda must be comma-separated numbers, got {cfg.weights!r}") from None
    s = resolve_s(cfg.s, problem.n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", zero_order.UnsupportedWeightWarning)
        cert = zero_order.weighted_scalarize(problem, w, s)
    winners = set(cert.details["maximizer_ids"])
    scores = problem.utilities @ w
    rows = [(i, float(v), int(i in winners)) for i, v in zip(problem.ids, scores)]
    params = {"s": s, "lambda": w.tolist()}
    status = 0 if cert.verdict is Verdict.OPTIMAL else 1
    return status, problem, params, cert.to_dict(), _csv(["id", "score", "maximizer"], rows)


def _decision_point(problem, label):
    fp = problem.discretize()
    if label in fp:
        return np.array(fp.point(label))
    try:
        return np.array([float(v) for v in label.split(",")])
    except ValueError:
        raise UsageError(f"--point {label!r} is neither a grid id nor comma-separated coordinates") from None


def cmd_firstorder(cfg):
    problem = _need_problem(cfg)
    if not isinstance(problem, SmoothProblem):
        raise UsageError("firstorder requires a smooth problem file")
    x = _decision_point(problem, _need_point(cfg))
    s = resolve_s(cfg.s, problem.n)
    tol = cfg.tol or RESIDUAL_TOL
    mult = first_order.multiplier_exists(problem, x, s)
    pair = first_order.pair_at(problem, x, s)
    pair_ok = pair.status != "ok" or (pair.residual.stationarity <= tol and pair.residual.boundary <= tol)
    result = {
        "point": x.tolist(),
        "s": s,
        "multiplier": mult.to_dict(),
        "pair": {
            "status": pair.status,
            "ystar": pair.ystar.tolist(),
            "residual": None if pair.residual is None else pair.residual.to_dict(),
        },
    }
    rows = [("multiplier_exists", int(mult.exists)), ("axial_projection_norm", mult.axial_projection_norm),
            ("threshold", mult.threshold), ("rank", mult.gradient_matrix_rank), ("pair_status", pair.status)]
    if pair.residual is not None:
        rows += [(k, v) for k, v in pair.residual.to_dict().items()]
    params = {"s": s, "tol": tol, "point": cfg.point}
    status = 0 if mult.exists and pair_ok else 1
    return status, problem, params, result, _csv(["key", "value"], rows)


def cmd_dualcheck(cfg):
    problem = None
    if cfg.problem_path is not None:
        problem = as_finite(load_problem(cfg.problem_path))
        n = problem.n
    elif cfg.n is not None:
        n = cfg.n
    else:
        raise UsageError("dualcheck requires --problem or --n")
    s = resolve_s(cfg.s, n)
    cone = EuclideanCone(ideal_direction(n), s)
    rep = oracle.sampled_dual_check(cone, cfg.samples, cfg.seed, tol=cfg.tol or GEOMETRY_TOL)
    d = rep.to_dict()
    params = {"s": s, "n": n, "samples": cfg.samples, "seed": cfg.seed}
    return (0 if rep.ok else 1), problem, params, d, _csv(["key", "value"], list(d.items()))


_HANDLERS = {
    "certify": cmd_certify,
    "frontier": cmd_frontier,
    "sweep": cmd_sweep,
    "scalarize": cmd_scalarize,
    "firstorder": cmd_firstorder,
    "dualcheck": cmd_dualcheck,
}


def run(cfg):
    """Execute one command; returns (exit_status, output_text)."""
    status, problem, params, result, text = _HANDLERS[cfg.command](cfg)
    if cfg.output_format == "json":
        report = make_report(cfg.command, problem, params, result, status)
        text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    return status, text


def build_parser():
    parser = _Parser(prog="eucone", description="Optimality certificates under Euclidean preference cones.")
    common = _Parser(add_help=False)
    common.add_argument("--problem", dest="problem_path", metavar="PATH")
    common.add_argument("--s", default="upper", help="number or upper|lower|selfdual")
    common.add_argument("--mode", choices=("weak", "strong"), default="strong")
    common.add_argument("--tol", type=float)
    common.add_argument("--point", help="decision id (or comma-separated coordinates for smooth problems)")
    common.add_argument("--lambda", dest="weights", metavar="CSV", help="comma-separated weights")
    common.add_argument("--samples", type=int, default=10_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n", type=int, help="dimension for dualcheck without a problem file")
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig(**vars(ns))
        if cfg.tol is not None and not cfg.tol > 0:
            raise UsageError("--tol must be positive")
        status, text = run(cfg)
        if cfg.out:
            write_atomic(cfg.out, text)
        else:
            sys.stdout.write(text)
        return status
    except (EuconeError, OSError, ValueError, KeyError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
