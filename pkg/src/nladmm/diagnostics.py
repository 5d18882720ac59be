"""Convergence diagnostics computed against a known optimum or along a
recorded solve: the objective-gap bound, the Lyapunov merit function, and
the variational-inequality quantities with their monotonicity checks."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .engine import IterateState, SolveResult
from .errors import EmptyTrace, MissingReference
from .terms import ConstraintTerm


@dataclass(frozen=True)
class OptimumReference:
    """A known optimum of the constrained problem, used to evaluate the
    theoretical bounds. ``epsilon`` may override the per-iteration sup-norm
    bound on the f1 gap; by default it is computed from ``x1_star``."""

    x1_star: np.ndarray
    x2_star: np.ndarray
    y_star: np.ndarray
    p_star: float
    epsilon: Optional[Callable[[int], float]] = None


def check_reference_feasible(ref: OptimumReference, f1: ConstraintTerm,
                             f2: ConstraintTerm, tol: float = 1e-8) -> None:
    viol = np.linalg.norm(f1.eval(ref.x1_star) + f2.eval(ref.x2_star))
    if viol > tol:
        raise ValueError(f"reference optimum is infeasible: ||f1+f2|| = {viol:.3e}")


def error_bound(state: IterateState, p_current: float, prev_f2: np.ndarray,
                ref: OptimumReference, f1: ConstraintTerm,
                f2: ConstraintTerm) -> tuple:
    """Returns (bound, gap) where gap = p^k - p* and

        bound = rho * eps^k * ||f2(x2^k) - f2(x2^{k-1})||_1 - y^k . r^k

    with eps^k the sup-norm of the f1 gap to the optimum.
    """
    if ref is None:
        raise MissingReference("error bound needs a known optimum")
    if ref.epsilon is not None:
        eps = float(ref.epsilon(state.k))
    else:
        eps = float(np.max(np.abs(f1.eval(state.x1) - f1.eval(ref.x1_star))))
    delta_f2 = f2.eval(state.x2) - np.asarray(prev_f2, dtype=float)
    r = state.primal_residual
    if r is None:
        r = f1.eval(state.x1) + f2.eval(state.x2)
    bound = state.rho * eps * float(np.sum(np.abs(delta_f2))) - float(state.y @ r)
    gap = float(p_current) - ref.p_star
    return bound, gap


def lyapunov(state: IterateState, ref: OptimumReference,
             f2: ConstraintTerm) -> float:
    """rho * ||f2(x2) - f2(x2*)||^2 + (1/rho) * ||y - y*||^2."""
    if ref is None:
        raise MissingReference("Lyapunov value needs a known optimum")
    d2 = f2.eval(state.x2) - f2.eval(ref.x2_star)
    dy = state.y - np.asarray(ref.y_star, dtype=float)
    return float(state.rho * (d2 @ d2) + (dy @ dy) / state.rho)


@dataclass(frozen=True)
class ViMatrices:
    """Block matrices of the variational-inequality analysis, acting on the
    stacked vector (f1(x1), f2(x2), y) in R^{3d}."""

    d: int
    rho: float
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    G: np.ndarray


def vi_matrices(d: int, rho: float) -> ViMatrices:
    """Build C = [[rho A, 0],[B, I/rho]], D = blockdiag(rho A, I/rho),
    E = [[I, 0],[rho B, I]], G = C + C' - E'DE, with A = blockdiag(0, I)
    and B = [0 I] on d-dimensional blocks."""
    if d < 1 or rho <= 0:
        raise ValueError("need d >= 1 and rho > 0")
    Z = np.zeros((d, d))
    I = np.eye(d)
    A = np.block([[Z, Z], [Z, I]])
    B = np.hstack([Z, I])

    C = np.block([[rho * A, np.zeros((2 * d, d))], [B, I / rho]])
    D = np.block([[rho * A, np.zeros((2 * d, d))],
                  [np.zeros((d, 2 * d)), I / rho]])
    E = np.block([[np.eye(2 * d), np.zeros((2 * d, d))], [rho * B, I]])
    G = C + C.T - E.T @ D @ E

    # Structural identities of the construction.
    assert np.max(np.abs(C - D @ E)) == 0.0
    G_expected = np.zeros((3 * d, 3 * d))
    G_expected[2 * d:, 2 * d:] = I / rho
    assert np.allclose(G, G_expected, atol=1e-12)
    return ViMatrices(d=d, rho=rho, C=C, D=D, E=E, G=G)


def d_norm_sq(mats: ViMatrices, v: np.ndarray) -> float:
    return float(v @ (mats.D @ v))


@dataclass
class ViReport:
    values: List[float]  # ||E(w^k - w~^k)||_D^2 per iteration
    increase_flags: List[int]  # iterations where the value grew beyond tolerance
    identity_residuals: List[float]  # ||w^{k+1} - w^k + E(w^k - w~^k)||
    decay_constant: float  # c of the best c/(t+1) fit
    decay_ratios: List[float] = field(default_factory=list)


def vi_sequence_check(w_history: Sequence[np.ndarray],
                      w_tilde_history: Sequence[np.ndarray],
                      mats: ViMatrices,
                      increase_tol: float = 1e-10) -> ViReport:
    """Evaluate the per-iteration contraction quantity, flag any increase,
    and verify the update identity w^{k+1} = w^k - E(w^k - w~^k)."""
    if len(w_tilde_history) == 0:
        raise EmptyTrace("no variational-inequality snapshots recorded")
    if len(w_history) < len(w_tilde_history) + 1:
        raise ValueError("w history must have one more entry than the predicted sequence")

    values = []
    identity_residuals = []
    for k, wt in enumerate(w_tilde_history):
        step = mats.E @ (w_history[k] - wt)
        values.append(d_norm_sq(mats, step))
        identity_residuals.append(float(np.linalg.norm(w_history[k + 1] - w_history[k] + step)))

    increase_flags = [k for k in range(1, len(values))
                      if values[k] > values[k - 1] + increase_tol]

    # Least-squares fit of values[t] ~ c/(t+1); report per-iteration ratios.
    tt = 1.0 / (np.arange(len(values)) + 1.0)
    vv = np.asarray(values)
    denom = float(tt @ tt)
    c = float(tt @ vv) / denom if denom > 0 else 0.0
    if c > 0:
        ratios = [float(v / (c * w)) for v, w in zip(vv, tt)]
    else:
        ratios = [0.0 for _ in values]

    return ViReport(values=values, increase_flags=increase_flags,
                    identity_residuals=identity_residuals,
                    decay_constant=c, decay_ratios=ratios)


@dataclass(frozen=True)
class DiagnosticsRow:
    k: int
    bound: float
    gap: float
    lyapunov: float
    vi_norm: float
    flags: str


def write_report_csv(path, rows: Sequence[DiagnosticsRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "bound", "gap", "V", "vi_norm", "flags"])
        for row in rows:
            writer.writerow([row.k, repr(row.bound), repr(row.gap),
                             repr(row.lyapunov), repr(row.vi_norm), row.flags])


def diagnose_result(result: SolveResult, ref: OptimumReference,
                    f1: ConstraintTerm, f2: ConstraintTerm,
                    x1_history: Sequence[np.ndarray],
                    x2_history: Sequence[np.ndarray]) -> List[DiagnosticsRow]:
    """Per-iteration bound/gap/Lyapunov/VI table for a constant-rho solve.

    ``x1_history`` / ``x2_history`` are the primal iterates including the
    initial point (length len(trace) + 1).
    """
    rhos = {row.rho for row in result.trace}
    if len(rhos) > 1:
        raise ValueError("diagnostics require a constant penalty parameter")
    rho = result.trace[0].rho
    check_reference_feasible(ref, f1, f2)
    mats = vi_matrices(d=f1.dim_out, rho=rho)
    vi = vi_sequence_check(result.w_history, result.w_tilde_history, mats)

    rows = []
    for i, tr in enumerate(result.trace):
        y_i = result.w_history[i + 1][2 * mats.d:]
        state = IterateState(x1=x1_history[i + 1], x2=x2_history[i + 1], y=y_i,
                             rho=rho, k=tr.k)
        prev_f2 = f2.eval(x2_history[i])
        bound, gap = error_bound(state, tr.objective, prev_f2, ref, f1, f2)
        V = lyapunov(state, ref, f2)
        flags = "increase" if i in vi.increase_flags else ""
        rows.append(DiagnosticsRow(k=tr.k, bound=bound, gap=gap, lyapunov=V,
                                   vi_norm=vi.values[i], flags=flags))
    return rows
