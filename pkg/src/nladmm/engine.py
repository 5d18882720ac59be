"""Generic alternating solver for problems with a nonlinear equality
constraint f1(x1) + f2(x2) = 0.

Each outer iteration minimizes the augmented Lagrangian in the x1 block,
then in the x2 block, then takes a dual ascent step. Block minimizers are
supplied by the caller; the engine owns residuals, the penalty schedule,
stopping, and trace recording.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .errors import DimensionMismatch, NonFiniteIterate, SubproblemFailure
from .terms import ConstraintTerm


@dataclass(frozen=True)
class RhoSchedule:
    """Penalty parameter as a function of the iteration counter.

    ``delta == 0`` keeps rho constant; ``delta > 0`` grows it linearly,
    which preserves convergence as long as the growth is slow.
    """

    rho0: float
    delta: float = 0.0

    def __post_init__(self):
        if self.rho0 <= 0:
            raise ValueError("rho0 must be positive")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    @classmethod
    def constant(cls, rho0: float) -> "RhoSchedule":
        return cls(rho0, 0.0)

    @classmethod
    def increment(cls, rho0: float, delta: float) -> "RhoSchedule":
        return cls(rho0, delta)

    @property
    def is_constant(self) -> bool:
        return self.delta == 0.0

    def at(self, k: int) -> float:
        return self.rho0 + k * self.delta


@dataclass(frozen=True)
class StopCriteria:
    tol_primal: float = 1e-6
    tol_dual: float = 1e-6
    max_iter: int = 1000

    def __post_init__(self):
        if self.tol_primal <= 0 or self.tol_dual <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class IterateState:
    x1: np.ndarray
    x2: np.ndarray
    y: np.ndarray
    rho: float
    k: int = 0
    primal_residual: np.ndarray | None = None
    dual_residual: np.ndarray | None = None


@dataclass(frozen=True)
class TraceRow:
    k: int
    objective: float
    r_norm: float
    s_norm: float
    rho: float


# Block solvers receive (x1, x2, y, rho) and return the new block value.
BlockSolver = Callable[[np.ndarray, np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class Problem:
    """Objective values, constraint maps, and block minimizers of one solve.

    The block solvers are expected to return (approximate) minimizers of
    the augmented Lagrangian in their own block. Existence of those
    minimizers (e.g. via strong convexity of the objectives or linearity
    of the constraint maps) is the caller's responsibility.
    """

    F1: Callable[[np.ndarray], float]
    F2: Callable[[np.ndarray], float]
    f1: ConstraintTerm
    f2: ConstraintTerm
    solve_x1: BlockSolver
    solve_x2: BlockSolver


@dataclass
class SolveResult:
    state: IterateState
    trace: List[TraceRow]
    converged: bool
    # Stacked (f1(x1), f2(x2), y) per iterate and the companion predicted
    # sequence, recorded for the variational-inequality diagnostics.
    w_history: List[np.ndarray] = field(default_factory=list)
    w_tilde_history: List[np.ndarray] = field(default_factory=list)


def augmented_lagrangian(F1, F2, f1: ConstraintTerm, f2: ConstraintTerm,
                         x1, x2, y, rho: float) -> float:
    """F1(x1) + F2(x2) + y'(f1(x1)+f2(x2)) + (rho/2)||f1(x1)+f2(x2)||^2."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    c = f1.eval(x1) + f2.eval(x2)
    y = np.asarray(y, dtype=float)
    if y.shape != c.shape:
        raise DimensionMismatch(f"dual dimension {y.shape} != constraint dimension {c.shape}")
    return float(F1(x1) + F2(x2) + y @ c + 0.5 * rho * (c @ c))


def dual_update(y: np.ndarray, rho: float, f1x1: np.ndarray, f2x2: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    f1x1 = np.asarray(f1x1, dtype=float)
    f2x2 = np.asarray(f2x2, dtype=float)
    if not (y.shape == f1x1.shape == f2x2.shape):
        raise DimensionMismatch("dual and constraint blocks must share dimension")
    return y + rho * (f1x1 + f2x2)


def residuals(f1: ConstraintTerm, f2: ConstraintTerm, x1_new, x2_new, x2_old,
              rho: float):
    """Primal residual f1(x1)+f2(x2) and dual residual rho*J1' (f2 change)."""
    primal = f1.eval(x1_new) + f2.eval(x2_new)
    delta2 = f2.eval(x2_new) - f2.eval(x2_old)
    dual = rho * (f1.jacobian(x1_new).T @ delta2)
    return primal, dual


def _require_finite(v: np.ndarray, what: str, trace, exc=NonFiniteIterate):
    if not np.all(np.isfinite(v)):
        raise exc(f"non-finite values in {what}", trace=trace)


def solve(problem: Problem, init: IterateState, schedule: RhoSchedule,
          stop: StopCriteria) -> SolveResult:
    """Run the alternating iteration until both residual norms pass their
    tolerances or ``stop.max_iter`` is reached."""
    x1 = np.asarray(init.x1, dtype=float).copy()
    x2 = np.asarray(init.x2, dtype=float).copy()
    y = np.asarray(init.y, dtype=float).copy()

    trace: List[TraceRow] = []
    w_hist = [np.concatenate([problem.f1.eval(x1), problem.f2.eval(x2), y])]
    wt_hist: List[np.ndarray] = []
    converged = False
    primal = dual = None
    rho = schedule.at(0)

    for k in range(stop.max_iter):
        # The schedule value is fixed at iteration start and used for every
        # update within the iteration.
        rho = schedule.at(k)
        x2_old = x2
        f2_old = problem.f2.eval(x2)
        y_old = y

        x1 = np.asarray(problem.solve_x1(x1, x2, y, rho), dtype=float)
        _require_finite(x1, "x1 block update", trace, SubproblemFailure)
        x2 = np.asarray(problem.solve_x2(x1, x2, y, rho), dtype=float)
        _require_finite(x2, "x2 block update", trace, SubproblemFailure)

        f1x1 = problem.f1.eval(x1)
        f2x2 = problem.f2.eval(x2)
        wt_hist.append(np.concatenate([f1x1, f2x2, y_old + rho * (f1x1 + f2_old)]))

        y = dual_update(y, rho, f1x1, f2x2)
        primal, dual = residuals(problem.f1, problem.f2, x1, x2, x2_old, rho)
        _require_finite(y, "dual variable", trace)
        _require_finite(primal, "primal residual", trace)
        _require_finite(dual, "dual residual", trace)
        w_hist.append(np.concatenate([f1x1, f2x2, y]))

        obj = float(problem.F1(x1) + problem.F2(x2))
        r_norm = float(np.linalg.norm(primal))
        s_norm = float(np.linalg.norm(dual))
        trace.append(TraceRow(k=k, objective=obj, r_norm=r_norm, s_norm=s_norm, rho=rho))

        if r_norm <= stop.tol_primal and s_norm <= stop.tol_dual:
            converged = True
            break

    state = IterateState(x1=x1, x2=x2, y=y, rho=rho, k=len(trace),
                         primal_residual=primal, dual_residual=dual)
    return SolveResult(state=state, trace=trace, converged=converged,
                       w_history=w_hist, w_tilde_history=wt_hist)
