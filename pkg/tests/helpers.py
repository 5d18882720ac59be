"""Independent oracles used by the tests.

These deliberately avoid the library's own closed-form solvers: the bag
subproblem oracle enumerates averaging-block sizes and polishes with
coordinate descent, and the sphere-penalty oracle reduces to one scalar
variable and combines a dense grid with a derivative-free polish.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar


def bag_subproblem_value(psi: float, phi: np.ndarray, t: np.ndarray) -> float:
    d = t - phi
    return (psi - float(np.max(t))) ** 2 + float(d @ d)


def _coordinate_descent(psi: float, phi: np.ndarray, t0: np.ndarray,
                        sweeps: int = 200) -> np.ndarray:
    """Exact coordinate minimization of (psi - max t)^2 + ||t - phi||^2.

    For each coordinate the others are fixed; the best value is either phi_j
    (when it stays below the max of the rest), the average (phi_j + psi)/2
    (when it becomes the max), or the max of the rest itself.
    """
    t = t0.astype(float).copy()
    n = t.size
    for _ in range(sweeps):
        changed = False
        for j in range(n):
            rest = np.delete(t, j)
            m_rest = float(np.max(rest)) if rest.size else -np.inf
            candidates = []
            if phi[j] <= m_rest:
                candidates.append(phi[j])  # j not the max
            avg = 0.5 * (phi[j] + psi)
            if avg >= m_rest:
                candidates.append(avg)  # j is the max
            candidates.append(m_rest)  # tie with the rest
            best = min(candidates,
                       key=lambda v: bag_subproblem_value(
                           psi, phi, np.concatenate([t[:j], [v], t[j + 1:]])))
            if best != t[j]:
                t[j] = best
                changed = True
        if not changed:
            break
    return t


def bag_subproblem_oracle(psi: float, phi: np.ndarray) -> float:
    """Best objective value found by enumeration plus coordinate descent."""
    phi = np.asarray(phi, dtype=float)
    n = phi.size
    order = np.argsort(-phi)
    sorted_phi = phi[order]
    best = np.inf
    for c in range(1, n + 1):
        a = (float(np.sum(sorted_phi[:c])) + psi) / (c + 1.0)
        t_sorted = sorted_phi.copy()
        t_sorted[:c] = a
        t = np.empty_like(t_sorted)
        t[order] = t_sorted
        for start in (t, phi.copy()):
            refined = _coordinate_descent(psi, phi, start)
            best = min(best, bag_subproblem_value(psi, phi, refined))
        best = min(best, bag_subproblem_value(psi, phi, t))
    return best


def sphere_penalty_value(w: np.ndarray, v: np.ndarray, alpha: float) -> float:
    d = w - v
    s = float(w @ w) - 1.0 + alpha
    return float(d @ d) + s * s


def sphere_penalty_oracle(v: np.ndarray, alpha: float,
                          grid_points: int = 400) -> float:
    """Best objective of ||w - v||^2 + (||w||^2 - 1 + alpha)^2.

    The minimizer is collinear with v (for fixed norm, the distance term
    prefers the direction of v), so the search is over the signed scalar
    coordinate along v. A dense grid localizes candidates and a bounded
    scalar minimizer polishes each local basin.
    """
    v = np.asarray(v, dtype=float)
    m = float(np.linalg.norm(v))
    direction = v / m if m > 0 else np.zeros_like(v)
    if m == 0:
        direction = np.zeros_like(v)
        if v.size:
            direction[0] = 1.0

    def scalar_obj(s: float) -> float:
        return sphere_penalty_value(s * direction, v, alpha)

    hw = m + abs(alpha) + 3.0
    grid = np.linspace(-hw, hw, grid_points)
    vals = np.array([scalar_obj(s) for s in grid])
    best = float(np.min(vals))
    # Polish every local basin of the grid.
    for i in range(1, grid_points - 1):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]:
            res = minimize_scalar(scalar_obj, bounds=(grid[i - 1], grid[i + 1]),
                                  method="bounded",
                                  options={"xatol": 1e-12})
            best = min(best, float(res.fun))
    return best
