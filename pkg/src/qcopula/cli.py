"""Command-line surface: single-state copula solves, batch experiment
suites, and the classical doubly-stochastic scaler.

All outputs are deterministic JSON (17-significant-digit floats); the only
run-dependent field is ``timing_ms``. Exit codes: 0 success, 1 experiment
suite reported failing cases (or an internal bug surfaced as a traceback),
2 solver did not converge, 3 invalid input or usage, 4 unknown suite name.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import copula as copmod
from . import jsonio, pmetric, sinkhorn, states
from .choi import choi_from_state
from .copula import SolverConfig
from .errors import NotConverged, QcopulaError

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_NOT_CONVERGED = 2
EXIT_INVALID = 3
EXIT_UNKNOWN_SUITE = 4

SUITES = ("preserve-separability", "uniqueness", "convergence", "lambda", "metric-axioms")
THREADS_ENV = "QCOPULA_THREADS"


class _Parser(argparse.ArgumentParser):
    # Bad invocations are validation failures, not solver failures.
    def error(self, message):
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file mirroring the solver config fields")
    p.add_argument("--tol", type=float, help="fixed-point tolerance in the projective metric")
    p.add_argument("--max-iter", type=int, help="iteration cap")
    p.add_argument("--regularize", action="store_true", default=None,
                   help="mix the input with eps*I/(nm) before solving")
    p.add_argument("--reg-eps", type=float, help="regularization weight")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcopula", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_cop = sub.add_parser("copula", parents=[], help="compute the copula of a state file")
    p_cop.add_argument("input", help="density-matrix JSON file")
    p_cop.add_argument("--output", help="output path (stdout when omitted)")
    _add_solver_flags(p_cop)

    p_exp = sub.add_parser("experiment", help="run a batch property suite")
    p_exp.add_argument("suite", help="one of: " + ", ".join(SUITES))
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.add_argument("--count", type=int, default=50)
    p_exp.add_argument("--dims", default="2,2", help="bipartite dims as n,m")
    p_exp.add_argument("--output", help="output path (stdout when omitted)")
    _add_solver_flags(p_exp)

    p_cls = sub.add_parser("classical", help="doubly stochastic scaling of a positive matrix")
    p_cls.add_argument("input", help="real matrix JSON file")
    p_cls.add_argument("--output", help="output path (stdout when omitted)")
    p_cls.add_argument("--tol", type=float, default=sinkhorn.DEFAULT_TOL)
    p_cls.add_argument("--max-iter", type=int, default=sinkhorn.DEFAULT_MAX_ITER)

    return parser


def _resolve_config(args) -> SolverConfig:
    """Defaults <- config file <- explicit flags."""
    cfg = SolverConfig()
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = SolverConfig.from_dict(json.load(fh), base=cfg)
    if getattr(args, "tol", None) is not None:
        cfg.tol = args.tol
    if getattr(args, "max_iter", None) is not None:
        cfg.max_iter = args.max_iter
    if getattr(args, "regularize", None) is not None:
        cfg.regularize = args.regularize
    if getattr(args, "reg_eps", None) is not None:
        cfg.reg_eps = args.reg_eps
    return cfg


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _digest(raw: bytes) -> str:
    return "sha256:" + hashlib.sha256(raw).hexdigest()


def _verdict_dict(v: states.SeparabilityVerdict) -> dict:
    return {"tag": v.tag, "min_pt_eigenvalue": v.min_pt_eigenvalue}


def _workers(count: int) -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        cap = int(raw)
    except ValueError:
        cap = 1
    if cap == 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, count))


def _run_cases(fn, count: int, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def cmd_copula(args) -> int:
    with open(args.input, "rb") as fh:
        raw = fh.read()
    obj = json.loads(raw.decode("utf-8"))
    rho = states.state_from_dict(obj)
    cfg = _resolve_config(args)
    start = time.perf_counter()
    try:
        result = copmod.copula_of(rho, cfg)
    except NotConverged as exc:
        report = exc.report
        doc = {
            "report": {
                "input_digest": _digest(raw),
                "result": {
                    "marginal_residual": None,
                    "iterations": report.iterations if report else cfg.max_iter,
                    "lambda": report.lam if report else None,
                    "converged": False,
                },
                "timing_ms": (time.perf_counter() - start) * 1000.0,
                "config": cfg.to_dict(),
                "error": str(exc),
            }
        }
        _write(jsonio.canonical_dumps(doc), args.output)
        return EXIT_NOT_CONVERGED
    timing_ms = (time.perf_counter() - start) * 1000.0
    doc = {
        "copula": states.state_to_dict(result.chi),
        "psi0": jsonio.complex_matrix_to_pairs(result.scalers.psi0),
        "psi1": jsonio.complex_matrix_to_pairs(result.scalers.psi1),
        "report": {
            "input_digest": _digest(raw),
            "result": {
                "marginal_residual": result.marginal_residual,
                "iterations": result.report.iterations,
                "lambda": result.report.lam,
                "converged": True,
            },
            "verdicts": {
                "input": _verdict_dict(states.ppt_verdict(rho)),
                "copula": _verdict_dict(states.ppt_verdict(result.chi)),
            },
            "timing_ms": timing_ms,
            "config": cfg.to_dict(),
            "regularized": result.regularized,
        },
    }
    _write(jsonio.canonical_dumps(doc), args.output)
    return EXIT_OK


def cmd_classical(args) -> int:
    with open(args.input, "rb") as fh:
        raw = fh.read()
    obj = json.loads(raw.decode("utf-8"))
    mat = jsonio.real_matrix_from_json(obj)
    if mat.shape[0] != mat.shape[1]:
        raise QcopulaError(f"matrix must be square, got shape {mat.shape}")
    start = time.perf_counter()
    try:
        pair = sinkhorn.sinkhorn_scale(mat, tol=args.tol, max_iter=args.max_iter)
    except NotConverged as exc:
        doc = {
            "input_digest": _digest(raw),
            "converged": False,
            "error": str(exc),
            "timing_ms": (time.perf_counter() - start) * 1000.0,
        }
        _write(jsonio.canonical_dumps(doc), args.output)
        return EXIT_NOT_CONVERGED
    doc = {
        "input_digest": _digest(raw),
        "d1": [float(x) for x in pair.d1],
        "d2": [float(x) for x in pair.d2],
        "scaled": [[float(x) for x in row] for row in pair.scaled],
        "iterations": pair.iterations,
        "max_deviation": pair.max_deviation,
        "converged": True,
        "timing_ms": (time.perf_counter() - start) * 1000.0,
    }
    _write(jsonio.canonical_dumps(doc), args.output)
    return EXIT_OK


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise QcopulaError(f"dims must be 'n,m', got {text!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise QcopulaError(f"dims must be integers, got {text!r}") from exc
    if n < 1 or m < 1:
        raise QcopulaError("dims must be positive")
    return n, m


def _iteration_histogram(counts: list[int]) -> list[list[int]]:
    hist: dict[int, int] = {}
    for c in counts:
        hist[c] = hist.get(c, 0) + 1
    return [[k, hist[k]] for k in sorted(hist)]


def _suite_lambda(seed, count, dims, cfg):
    n, m = dims
    target = n / m

    def one(i):
        rho = states.random_full_rank_state(n, m, seed + i)
        result = copmod.copula_of(rho, cfg)
        err = abs(result.report.lam - target)
        return {
            "index": i,
            "lambda": result.report.lam,
            "lambda_error": err,
            "iterations": result.report.iterations,
            "pass": bool(err <= 1e-8),
        }

    return one, lambda recs: {
        "max_lambda_error": max(r["lambda_error"] for r in recs),
        "iteration_histogram": _iteration_histogram([r["iterations"] for r in recs]),
    }


def _suite_convergence(seed, count, dims, cfg):
    n, m = dims

    def one(i):
        rho = states.random_full_rank_state(n, m, seed + i)
        result = copmod.copula_of(rho, cfg)
        its = result.report.iterations
        return {
            "index": i,
            "iterations": its,
            "final_step": result.report.final_step,
            "marginal_residual": result.marginal_residual,
            "pass": bool(its < 200),
        }

    def agg(recs):
        its = sorted(r["iterations"] for r in recs)
        return {
            "max_iterations": its[-1],
            "median_iterations": its[len(its) // 2],
            "iteration_histogram": _iteration_histogram(its),
        }

    return one, agg


def _suite_preserve_separability(seed, count, dims, cfg):
    n, m = dims

    def one(i):
        if i < count // 2:
            rho = states.random_separable_state(n, m, terms=2 * n * m, seed=seed + i)
        else:
            rng = np.random.default_rng(seed + i)
            for _ in range(1000):
                rho = states.random_full_rank_state(n, m, rng)
                if states.ppt_verdict(rho).tag == states.ENTANGLED:
                    break
            else:
                raise QcopulaError(
                    f"could not sample an entangled state at dims ({n}, {m})"
                )
        result = copmod.copula_of(rho, cfg)
        tag_in = states.ppt_verdict(rho).tag
        tag_out = states.ppt_verdict(result.chi).tag
        return {
            "index": i,
            "input_tag": tag_in,
            "copula_tag": tag_out,
            "marginal_residual": result.marginal_residual,
            "pass": bool(tag_in == tag_out),
        }

    def agg(recs):
        return {
            "verdict_agreements": sum(1 for r in recs if r["pass"]),
            "max_marginal_residual": max(r["marginal_residual"] for r in recs),
        }

    return one, agg


def _suite_uniqueness(seed, count, dims, cfg):
    n, m = dims
    inits = 5

    def one(i):
        rho = states.random_full_rank_state(n, m, seed + i)
        phi = choi_from_state(rho)
        rng = np.random.default_rng((seed, i, 7))
        rays = []
        for _ in range(inits):
            init = states.wishart_state_matrix(n, rng)
            rep = copmod.fixed_point_iterate(phi, tol=cfg.tol, max_iter=cfg.max_iter, init=init)
            if not rep.converged:
                return {"index": i, "max_ray_gap": math.inf, "pass": False}
            rays.append(rep.phi_ray)
        gap = max(pmetric.hilbert_distance(rays[0], ray) for ray in rays[1:])
        return {"index": i, "max_ray_gap": gap, "pass": bool(gap <= 1e-8)}

    def agg(recs):
        return {"max_ray_gap": max(r["max_ray_gap"] for r in recs)}

    return one, agg


def _suite_metric_axioms(seed, count, dims, cfg):
    d = dims[0] * dims[1]

    def one(i):
        rng = np.random.default_rng((seed, i))
        a = states.wishart_state_matrix(d, rng)
        b = states.wishart_state_matrix(d, rng)
        c = states.wishart_state_matrix(d, rng)
        dab = pmetric.hilbert_distance(a, b)
        dba = pmetric.hilbert_distance(b, a)
        dac = pmetric.hilbert_distance(a, c)
        dbc = pmetric.hilbert_distance(b, c)
        sym = abs(dab - dba)
        triangle = dac - (dab + dbc)
        scale = abs(pmetric.hilbert_distance(float(rng.uniform(1e-3, 1e3)) * a, b) - dab)
        inv_gap = abs(
            pmetric.hilbert_distance(np.linalg.inv(a), np.linalg.inv(b)) - dab
        )
        u = states.random_haar_unitary(d, rng)
        p1 = np.outer(u[:, 0], u[:, 0].conj())
        p2 = np.outer(u[:, 1], u[:, 1].conj())
        infinite = math.isinf(pmetric.hilbert_distance(p1, p2))
        ok = (
            sym <= 1e-10
            and triangle <= 1e-10
            and scale <= 1e-12
            and inv_gap <= 1e-10
            and infinite
        )
        return {
            "index": i,
            "symmetry_gap": sym,
            "triangle_excess": triangle,
            "scale_gap": scale,
            "inversion_gap": inv_gap,
            "support_mismatch_infinite": infinite,
            "pass": bool(ok),
        }

    def agg(recs):
        return {
            "max_symmetry_gap": max(r["symmetry_gap"] for r in recs),
            "max_triangle_excess": max(r["triangle_excess"] for r in recs),
            "max_scale_gap": max(r["scale_gap"] for r in recs),
            "max_inversion_gap": max(r["inversion_gap"] for r in recs),
        }

    return one, agg


_SUITE_BUILDERS = {
    "lambda": _suite_lambda,
    "convergence": _suite_convergence,
    "preserve-separability": _suite_preserve_separability,
    "uniqueness": _suite_uniqueness,
    "metric-axioms": _suite_metric_axioms,
}


def cmd_experiment(args) -> int:
    if args.suite not in _SUITE_BUILDERS:
        sys.stderr.write(
            f"unknown suite {args.suite!r}; expected one of: {', '.join(SUITES)}\n"
        )
        return EXIT_UNKNOWN_SUITE
    dims = _parse_dims(args.dims)
    cfg = _resolve_config(args)
    if args.count < 1:
        raise QcopulaError("count must be >= 1")
    one, agg = _SUITE_BUILDERS[args.suite](args.seed, args.count, dims, cfg)
    workers = _workers(args.count)
    start = time.perf_counter()
    records = _run_cases(one, args.count, workers)
    timing_ms = (time.perf_counter() - start) * 1000.0
    passed = sum(1 for r in records if r["pass"])
    doc = {
        "suite": args.suite,
        "seed": args.seed,
        "count": args.count,
        "dims": list(dims),
        "workers": workers,
        "config": cfg.to_dict(),
        "passed": passed,
        "failed": args.count - passed,
        "all_passed": passed == args.count,
        "aggregates": agg(records),
        "timing_ms": timing_ms,
        "cases": records,
    }
    _write(jsonio.canonical_dumps(doc), args.output)
    return EXIT_OK if passed == args.count else EXIT_SUITE_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "copula": cmd_copula,
        "experiment": cmd_experiment,
        "classical": cmd_classical,
    }
    try:
        return handlers[args.command](args)
    except NotConverged as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOT_CONVERGED
    except (QcopulaError, OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
