"""Solvers for losses minimized over the unit sphere ||x||^2 = 1, via an
auxiliary copy variable, plus the three-block 1-bit compressive sensing
instantiation.

The key primitive is the exact minimizer of

    ||w - v||^2 + (||w||^2 - 1 + alpha)^2

whose stationarity condition reduces to a scalar cubic in ||w||.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .engine import RhoSchedule, StopCriteria, TraceRow
from .errors import NoCandidate
from .inner import FistaConfig, cubic_real_roots, fista
from .terms import CompositeObjective, l1_term, with_quadratic, SmoothTerm, ProxTerm


@dataclass(frozen=True)
class SphereProblem:
    loss: CompositeObjective
    dim: int


@dataclass
class SphereState:
    x: np.ndarray
    w: np.ndarray
    y1: float  # dual of ||w||^2 - 1 = 0 (a single scalar equation)
    y2: np.ndarray  # dual of w - x = 0
    rho: float


def _sphere_penalty_objective(w: np.ndarray, v: np.ndarray, alpha: float) -> float:
    d = w - v
    s = float(w @ w) - 1.0 + alpha
    return float(d @ d) + s * s


def sphere_penalty_min(v: np.ndarray, alpha: float) -> np.ndarray:
    """Global minimizer of ||w - v||^2 + (||w||^2 - 1 + alpha)^2 over R^n.

    Candidate norms u >= 0 solve 2u^3 + (2*alpha - 1)u = +-||v||; each
    consistent candidate w = v / (2u^2 - 1 + 2*alpha) is scored by the
    objective and the best one returned.
    """
    v = np.asarray(v, dtype=float)
    m = float(np.linalg.norm(v))
    b = 2.0 * alpha - 1.0

    if m < 1e-12:
        # Degenerate: the direction of w is free. Candidates are u = 0 and,
        # when it exists, the positive root of 2u^2 + b = 0; pick the best
        # and return it along the first basis vector for reproducibility.
        best_u, best_obj = 0.0, _sphere_penalty_objective(np.zeros_like(v), v, alpha)
        if b < 0.0:
            u = np.sqrt(-b / 2.0)
            w = np.zeros_like(v)
            w[0] = u
            obj = _sphere_penalty_objective(w, v, alpha)
            if obj < best_obj:
                best_u, best_obj = u, obj
        out = np.zeros_like(v)
        out[0] = best_u
        return out

    us: List[float] = []
    for rhs in (m, -m):
        us.extend(r for r in cubic_real_roots(2.0, 0.0, b, -rhs).roots
                  if r >= -1e-12)

    best_w, best_obj = None, np.inf
    for u in us:
        u = max(u, 0.0)
        den = 2.0 * u * u - 1.0 + 2.0 * alpha
        if abs(den) < 1e-12:
            continue
        w = v / den
        if abs(np.linalg.norm(w) - u) > 1e-8 * (1.0 + u):
            continue
        obj = _sphere_penalty_objective(w, v, alpha)
        if obj < best_obj:
            best_w, best_obj = w, obj
    if best_w is None:
        raise NoCandidate("no admissible cubic root produced a consistent minimizer")
    return best_w


def sphere_update_x(loss: CompositeObjective, w: np.ndarray, y2: np.ndarray,
                    rho: float, cfg: FistaConfig = FistaConfig(),
                    x0: np.ndarray | None = None) -> np.ndarray:
    """Approximate argmin_x loss(x) + (rho/2)||w - x + y2/rho||^2."""
    center = w + y2 / rho
    obj = with_quadratic(loss, rho, center)
    return fista(obj, center if x0 is None else x0, cfg)


def sphere_update_w(x_new: np.ndarray, y1: float, y2: np.ndarray,
                    rho: float) -> np.ndarray:
    """Exact minimizer of ||w - x + y2/rho||^2 + (||w||^2 - 1 + y1/rho)^2."""
    return sphere_penalty_min(x_new - y2 / rho, y1 / rho)


def sphere_solve(problem: SphereProblem, init: SphereState,
                 schedule: RhoSchedule, stop: StopCriteria,
                 fista_cfg: FistaConfig = FistaConfig()):
    """Alternate the loss-side pull and the exact sphere-penalty update,
    with scalar and vector duals for the two constraints."""
    x = np.asarray(init.x, dtype=float).copy()
    w = np.asarray(init.w, dtype=float).copy()
    y1 = float(init.y1)
    y2 = np.asarray(init.y2, dtype=float).copy()

    trace: List[TraceRow] = []
    converged = False
    for k in range(stop.max_iter):
        rho = schedule.at(k)
        w_old = w
        x = sphere_update_x(problem.loss, w, y2, rho, fista_cfg, x0=x)
        w = sphere_update_w(x, y1, y2, rho)

        r1 = float(w @ w) - 1.0
        r2 = w - x
        s1 = rho * (float(w @ w) - float(w_old @ w_old))
        s2 = rho * (w - w_old)
        y1 = y1 + rho * r1
        y2 = y2 + rho * r2

        r = float(np.sqrt(r1 * r1 + r2 @ r2))
        s = float(np.sqrt(s1 * s1 + s2 @ s2))
        trace.append(TraceRow(k=k, objective=problem.loss.value(x),
                              r_norm=r, s_norm=s, rho=rho))
        if r <= stop.tol_primal and s <= stop.tol_dual:
            converged = True
            break

    state = SphereState(x=x, w=w, y1=y1, y2=y2, rho=trace[-1].rho)
    return state, trace, converged


@dataclass(frozen=True)
class OneBitCsProblem:
    """Sign-only sparse recovery: min ||x||_1 + (lam/2) sum min(Y Phi x, 0)^2
    subject to ||x||^2 = 1, where Y holds the observed measurement signs."""

    Phi: np.ndarray
    y_sign: np.ndarray  # diagonal of Y, entries in {-1, +1}
    lam: float

    def __post_init__(self):
        if not np.all(np.isin(self.y_sign, (-1.0, 1.0))):
            raise ValueError("sign measurements must be +-1")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")

    @property
    def signed_matrix(self) -> np.ndarray:
        """Y Phi with Y = diag(y_sign)."""
        return self.y_sign[:, None] * self.Phi

    def objective(self, w: np.ndarray, z: np.ndarray) -> float:
        return float(np.sum(np.abs(w)) + 0.5 * self.lam * np.sum(np.minimum(z, 0.0) ** 2))


@dataclass
class OneBitCsState:
    x: np.ndarray
    w: np.ndarray
    z: np.ndarray
    y1: float
    y2: np.ndarray
    y3: np.ndarray
    rho: float


def onebit_update_z(w: np.ndarray, y2: np.ndarray, rho: float, lam: float,
                    Phi: np.ndarray, y_sign: np.ndarray) -> np.ndarray:
    """Per-coordinate exact minimizer of
    (lam/2) min(z,0)^2 + (rho/2)(z - a)^2 with a = Y Phi w + y2/rho."""
    a = (y_sign[:, None] * Phi) @ w + y2 / rho
    return np.where(a >= 0.0, a, rho * a / (lam + rho))


def onebit_update_w(z: np.ndarray, x: np.ndarray, y2: np.ndarray,
                    y3: np.ndarray, rho: float, Phi: np.ndarray,
                    y_sign: np.ndarray, cfg: FistaConfig = FistaConfig(),
                    w0: np.ndarray | None = None) -> np.ndarray:
    """Approximate argmin_w ||w||_1 + (rho/2)||Y Phi w - z + y2/rho||^2
    + (rho/2)||w - x + y3/rho||^2 via the accelerated proximal method."""
    M = y_sign[:, None] * Phi
    MtM = M.T @ M
    b = z - y2 / rho
    Mtb = M.T @ b
    c = x - y3 / rho

    def value(w):
        rz = M @ w - b
        rx = w - c
        return 0.5 * rho * float(rz @ rz + rx @ rx)

    def gradient(w):
        return rho * (MtM @ w - Mtb + w - c)

    obj = CompositeObjective(SmoothTerm(value=value, gradient=gradient), l1_term(1.0))
    start = c if w0 is None else w0
    return fista(obj, start, cfg)


def onebit_solve(problem: OneBitCsProblem, init: OneBitCsState,
                 schedule: RhoSchedule, stop: StopCriteria,
                 fista_cfg: FistaConfig | None = None):
    """Three-block cycle: sphere-penalized x (closed form), clipped z
    (closed form), sparse w (proximal gradient), then the dual ascent steps."""
    Phi, y_sign, lam = problem.Phi, problem.y_sign, problem.lam
    M = problem.signed_matrix
    x = np.asarray(init.x, dtype=float).copy()
    w = np.asarray(init.w, dtype=float).copy()
    z = np.asarray(init.z, dtype=float).copy()
    y1 = float(init.y1)
    y2 = np.asarray(init.y2, dtype=float).copy()
    y3 = np.asarray(init.y3, dtype=float).copy()

    trace: List[TraceRow] = []
    converged = False
    for k in range(stop.max_iter):
        rho = schedule.at(k)
        if fista_cfg is None:
            cfg = FistaConfig(initial_step=1.0 / rho)
        else:
            cfg = fista_cfg
        z_old, w_old = z, w

        x = sphere_penalty_min(w + y3 / rho, y1 / rho)
        z = onebit_update_z(w, y2, rho, lam, Phi, y_sign)
        w = onebit_update_w(z, x, y2, y3, rho, Phi, y_sign, cfg, w0=w)

        r1 = float(x @ x) - 1.0
        r2 = M @ w - z
        r3 = w - x
        y1 = y1 + rho * r1
        y2 = y2 + rho * r2
        y3 = y3 + rho * r3

        r = float(np.sqrt(r1 * r1 + r2 @ r2 + r3 @ r3))
        s = rho * float(np.sqrt((z - z_old) @ (z - z_old) + (w - w_old) @ (w - w_old)))
        trace.append(TraceRow(k=k, objective=problem.objective(w, z),
                              r_norm=r, s_norm=s, rho=rho))
        if r <= stop.tol_primal and s <= stop.tol_dual:
            converged = True
            break

    state = OneBitCsState(x=x, w=w, z=z, y1=y1, y2=y2, y3=y3, rho=trace[-1].rho)
    return state, trace, converged
