"""Two scalar benchmark problems with closed-form block updates:

    square-root constraint:  min x + z  s.t.  sqrt(x) + sqrt(z) = 1
    circle constraint:       min x + z  s.t.  x^2 + z^2 = 1

Both have known optima (objective 0.5 at (0.25, 0.25), and -sqrt(2) at
(-sqrt(2)/2, -sqrt(2)/2)) and are the primary convergence benchmarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import engine
from .diagnostics import OptimumReference
from .engine import IterateState, Problem, RhoSchedule, StopCriteria
from .errors import NoCandidate
from .inner import cubic_real_roots
from .terms import ConstraintTerm

EXAMPLE_SQRT = "example1"
EXAMPLE_CIRCLE = "example2"

_SQRT_EPS = 1e-12  # designated finite Jacobian element at the sqrt boundary


@dataclass(frozen=True)
class ScalarExampleProblem:
    which: str
    x_star: float
    z_star: float
    p_star: float
    y_star: float


def example_problem(which: str) -> ScalarExampleProblem:
    if which == EXAMPLE_SQRT:
        return ScalarExampleProblem(which, 0.25, 0.25, 0.5, -1.0)
    if which == EXAMPLE_CIRCLE:
        s = -math.sqrt(2.0) / 2.0
        # The saddle dual maximizes -y - 1/(2y) over y > 0, i.e. y* = +sqrt(2)/2.
        return ScalarExampleProblem(which, s, s, -math.sqrt(2.0), -s)
    raise ValueError(f"unknown example {which!r}")


def example1_block_update(c: float, rho: float) -> float:
    """Exact argmin over x >= 0 of x + (rho/2)(sqrt(x) + c)^2.

    In s = sqrt(x) the objective is an upward parabola with vertex at
    s = -rho c / (2 + rho), clamped to the domain s >= 0.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    s = max(0.0, -rho * c / (2.0 + rho))
    return s * s


def example2_block_update(c: float, rho: float) -> float:
    """Global argmin over R of x + (rho/2)(x^2 + c)^2.

    Stationary points solve 2 rho x^3 + 2 rho c x + 1 = 0; every real root
    is scored and the best (smallest on ties) returned.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    roots = cubic_real_roots(2.0 * rho, 0.0, 2.0 * rho * c, 1.0).roots
    if not roots:
        raise NoCandidate("stationarity cubic has no real root")

    def objective(x):
        return x + 0.5 * rho * (x * x + c) ** 2

    best = min(roots, key=lambda x: (objective(x), x))
    return best


def _sqrt_constraint(offset: float) -> ConstraintTerm:
    # sqrt(x) + offset; the subgradient at 0 is taken one-sided.
    return ConstraintTerm(
        dim_in=1, dim_out=1,
        eval=lambda x: np.sqrt(np.maximum(x, 0.0)) + offset,
        jacobian=lambda x: np.array([[0.5 / math.sqrt(max(float(x[0]), _SQRT_EPS))]]),
    )


def _square_constraint(offset: float) -> ConstraintTerm:
    return ConstraintTerm(
        dim_in=1, dim_out=1,
        eval=lambda x: x * x + offset,
        jacobian=lambda x: np.array([[2.0 * float(x[0])]]),
    )


def build_example(which: str) -> Problem:
    """Assemble the generic-problem description with exact block solvers."""
    lin = lambda v: float(v[0])
    if which == EXAMPLE_SQRT:
        f1 = _sqrt_constraint(0.0)
        f2 = _sqrt_constraint(-1.0)

        def solve_x1(x1, x2, y, rho):
            c = math.sqrt(max(float(x2[0]), 0.0)) - 1.0 + float(y[0]) / rho
            return np.array([example1_block_update(c, rho)])

        def solve_x2(x1, x2, y, rho):
            c = math.sqrt(max(float(x1[0]), 0.0)) - 1.0 + float(y[0]) / rho
            return np.array([example1_block_update(c, rho)])

    elif which == EXAMPLE_CIRCLE:
        f1 = _square_constraint(0.0)
        f2 = _square_constraint(-1.0)

        def solve_x1(x1, x2, y, rho):
            c = float(x2[0]) ** 2 - 1.0 + float(y[0]) / rho
            return np.array([example2_block_update(c, rho)])

        def solve_x2(x1, x2, y, rho):
            c = float(x1[0]) ** 2 - 1.0 + float(y[0]) / rho
            return np.array([example2_block_update(c, rho)])

    else:
        raise ValueError(f"unknown example {which!r}")

    return Problem(F1=lin, F2=lin, f1=f1, f2=f2,
                   solve_x1=solve_x1, solve_x2=solve_x2)


def example_reference(which: str) -> OptimumReference:
    ex = example_problem(which)
    return OptimumReference(x1_star=np.array([ex.x_star]),
                            x2_star=np.array([ex.z_star]),
                            y_star=np.array([ex.y_star]),
                            p_star=ex.p_star)


@dataclass
class ExampleRun:
    result: engine.SolveResult
    x1_history: List[np.ndarray]
    x2_history: List[np.ndarray]


def run_example(which: str, schedule: RhoSchedule, max_iter: int = 30,
                x0: float = 1.0, z0: float = 1.0, y0: float = 0.0,
                tol_primal: float = 1e-12, tol_dual: float = 1e-12) -> ExampleRun:
    """Run one scalar benchmark, recording the primal iterates so the
    diagnostics can be evaluated afterwards."""
    problem = build_example(which)
    x1_hist = [np.array([float(x0)])]
    x2_hist = [np.array([float(z0)])]

    def wrap(solver, hist):
        def inner(x1, x2, y, rho):
            out = solver(x1, x2, y, rho)
            hist.append(out.copy())
            return out
        return inner

    wrapped = Problem(F1=problem.F1, F2=problem.F2, f1=problem.f1, f2=problem.f2,
                      solve_x1=wrap(problem.solve_x1, x1_hist),
                      solve_x2=wrap(problem.solve_x2, x2_hist))
    init = IterateState(x1=np.array([float(x0)]), x2=np.array([float(z0)]),
                        y=np.array([float(y0)]), rho=schedule.at(0))
    stop = StopCriteria(tol_primal=tol_primal, tol_dual=tol_dual, max_iter=max_iter)
    result = engine.solve(wrapped, init, schedule, stop)
    return ExampleRun(result=result, x1_history=x1_hist, x2_history=x2_hist)
