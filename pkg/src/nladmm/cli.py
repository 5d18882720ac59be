"""Command-line harness: run the benchmark examples and the two
applications on synthetic data, writing per-iteration traces as CSV.

Exit codes: 0 when the solve converged, 2 when it hit the iteration cap,
1 on any error; bad flags exit with 64.
"""

from __future__ import annotations

import argparse
import csv
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import datagen, maxop, scalar_examples, sphere
from .diagnostics import diagnose_result, write_report_csv
from .engine import RhoSchedule, StopCriteria, TraceRow
from .errors import SolverError
from .inner import FistaConfig
from .terms import CompositeObjective, l1_term, logistic_loss, zero_prox

TRACE_HEADER = ["iter", "objective", "primal_residual", "dual_residual", "rho"]
DIAG_HEADER = TRACE_HEADER + ["bound", "gap", "lyapunov", "vi_norm"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_ITER = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def write_trace(path, rows: Sequence[TraceRow],
                extra_header: Optional[List[str]] = None,
                extra_cols: Optional[Sequence[Sequence[float]]] = None) -> None:
    """Trace CSV with shortest round-trip float formatting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER + (extra_header or []))
        for i, row in enumerate(rows):
            rec = [row.k, repr(row.objective), repr(row.r_norm),
                   repr(row.s_norm), repr(row.rho)]
            if extra_cols is not None:
                rec.extend(repr(float(v)) for v in extra_cols[i])
            writer.writerow(rec)


def read_trace(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [{k: (int(v) if k == "iter" else float(v)) for k, v in row.items()}
                for row in reader]


def _schedule(args) -> RhoSchedule:
    if args.rho_schedule == "constant":
        return RhoSchedule.constant(args.rho0)
    return RhoSchedule.increment(args.rho0, args.rho_delta)


def _add_common(p, rho0: float, max_iter: int):
    p.add_argument("--rho0", type=float, default=rho0)
    p.add_argument("--rho-schedule", choices=["constant", "increment"],
                   default="constant", dest="rho_schedule")
    p.add_argument("--rho-delta", type=float, default=0.01, dest="rho_delta")
    p.add_argument("--max-iter", type=int, default=max_iter, dest="max_iter")
    p.add_argument("--tol-primal", type=float, default=1e-6, dest="tol_primal")
    p.add_argument("--tol-dual", type=float, default=1e-6, dest="tol_dual")
    p.add_argument("--output", default=None, help="trace CSV path")


def build_parser() -> _Parser:
    parser = _Parser(prog="nladmm",
                     description="Solvers for nonlinearly constrained problems "
                                 "via alternating block minimization.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    for name in (scalar_examples.EXAMPLE_SQRT, scalar_examples.EXAMPLE_CIRCLE):
        p = sub.add_parser(name, help=f"run the scalar benchmark {name}")
        _add_common(p, rho0=1.0, max_iter=30)
        p.add_argument("--diagnose", action="store_true",
                       help="append bound/gap/Lyapunov/VI columns (constant rho only)")

    p = sub.add_parser("onebit-cs", help="1-bit compressive sensing on synthetic data")
    _add_common(p, rho0=1000.0, max_iter=100)
    p.add_argument("--n", type=int, default=128, help="signal length")
    p.add_argument("--m", type=int, default=64, help="number of measurements")
    p.add_argument("--k", type=int, default=16, help="signal sparsity")
    p.add_argument("--lambda", type=float, default=10.0, dest="lam")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("multi-instance", help="max-rule multi-instance learning")
    _add_common(p, rho0=0.1, max_iter=1000)
    p.add_argument("--input", default=None, help="bag dataset CSV (generated if omitted)")
    p.add_argument("--bags", type=int, default=20)
    p.add_argument("--instances", type=int, default=5)
    p.add_argument("--features", type=int, default=4)
    p.add_argument("--lambda", type=float, default=1.0, dest="lam")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("generate-bags", help="write a synthetic bag dataset CSV")
    p.add_argument("--bags", type=int, default=20)
    p.add_argument("--instances", type=int, default=5)
    p.add_argument("--features", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    return parser


def _run_example(args) -> int:
    schedule = _schedule(args)
    run = scalar_examples.run_example(args.subcommand, schedule,
                                      max_iter=args.max_iter,
                                      tol_primal=args.tol_primal,
                                      tol_dual=args.tol_dual)
    trace = run.result.trace
    extra_header = extra_cols = None
    if args.diagnose:
        ref = scalar_examples.example_reference(args.subcommand)
        problem = scalar_examples.build_example(args.subcommand)
        rows = diagnose_result(run.result, ref, problem.f1, problem.f2,
                               run.x1_history, run.x2_history)
        extra_header = ["bound", "gap", "lyapunov", "vi_norm"]
        extra_cols = [(r.bound, r.gap, r.lyapunov, r.vi_norm) for r in rows]
    if args.output:
        write_trace(args.output, trace, extra_header, extra_cols)
    last = trace[-1]
    print(f"{args.subcommand}: iterations={len(trace)} objective={last.objective:.6f} "
          f"r={last.r_norm:.3e} s={last.s_norm:.3e}")
    return EXIT_OK if run.result.converged else EXIT_MAX_ITER


def _run_onebit(args) -> int:
    problem, x_true = datagen.generate_onebit(args.n, args.m, args.k,
                                              args.seed, lam=args.lam)
    # Matched-filter start: the normalized back-projection of the signs is
    # already correlated with the signal and sits in a good basin.
    x0 = problem.signed_matrix.T @ np.ones(args.m)
    x0 /= np.linalg.norm(x0)
    init = sphere.OneBitCsState(x=x0.copy(), w=x0.copy(),
                                z=problem.signed_matrix @ x0,
                                y1=0.0, y2=np.zeros(args.m), y3=np.zeros(args.n),
                                rho=args.rho0)
    stop = StopCriteria(tol_primal=args.tol_primal, tol_dual=args.tol_dual,
                        max_iter=args.max_iter)
    state, trace, converged = sphere.onebit_solve(problem, init,
                                                  _schedule(args), stop)
    if args.output:
        write_trace(args.output, trace)
    corr = abs(float(state.x @ x_true)) / max(np.linalg.norm(state.x), 1e-30)
    print(f"onebit-cs: iterations={len(trace)} objective={trace[-1].objective:.4f} "
          f"sphere_residual={abs(float(state.x @ state.x) - 1.0):.3e} "
          f"correlation={corr:.4f}")
    return EXIT_OK if converged else EXIT_MAX_ITER


def _run_multi_instance(args) -> int:
    if args.input:
        data = maxop.load_bags_csv(args.input)
    else:
        data, _ = datagen.generate_bags(args.bags, args.instances,
                                        args.features, args.seed)
    loss = CompositeObjective(logistic_loss(data.labels), zero_prox())
    reg = l1_term(args.lam)
    init = maxop.MaxOpState.zeros(data, args.rho0)
    stop = StopCriteria(tol_primal=args.tol_primal, tol_dual=args.tol_dual,
                        max_iter=args.max_iter)
    state, trace, converged = maxop.maxop_solve(data, loss, reg, init,
                                                _schedule(args), stop)
    if args.output:
        write_trace(args.output, trace)
    gap = float(np.max(np.abs(state.q - data.bag_max(state.t))))
    print(f"multi-instance: iterations={len(trace)} objective={trace[-1].objective:.4f} "
          f"r={trace[-1].r_norm:.3e} max_rule_gap={gap:.3e}")
    return EXIT_OK if converged else EXIT_MAX_ITER


def _run_generate_bags(args) -> int:
    data, _ = datagen.generate_bags(args.bags, args.instances,
                                    args.features, args.seed)
    maxop.save_bags_csv(args.output, data)
    positives = int(np.sum(data.labels == 1.0))
    print(f"generate-bags: wrote {data.X.shape[0]} instances in {data.n_bags} bags "
          f"({positives} positive) to {args.output}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        scalar_examples.EXAMPLE_SQRT: _run_example,
        scalar_examples.EXAMPLE_CIRCLE: _run_example,
        "onebit-cs": _run_onebit,
        "multi-instance": _run_multi_instance,
        "generate-bags": _run_generate_bags,
    }
    try:
        return handlers[args.subcommand](args)
    except SolverError as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
