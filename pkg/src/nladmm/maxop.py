"""Multi-instance learning with the max rule: a bag's score is the maximum
of its instance scores q_i = max_j t_{i,j}, with t_{i,j} = X_{i,j}' beta.

The t block is nonconvex but separable per bag, and each bag subproblem
has an exact sort-based solution computed in O(n_i log n_i).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List

import numpy as np

from .engine import RhoSchedule, StopCriteria, TraceRow
from .inner import FistaConfig, fista
from .terms import CompositeObjective, ProxTerm, with_quadratic, SmoothTerm


@dataclass(frozen=True)
class BagDataset:
    """Labeled bags of feature vectors, stored stacked for vector math.

    ``X`` is the (sum n_i) x p stack of all instances; ``offsets`` holds
    the start index of each bag so bag i occupies rows
    offsets[i]:offsets[i+1].
    """

    labels: np.ndarray
    X: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.offsets) < 1):
            raise ValueError("every bag must be nonempty")
        if self.offsets[-1] != self.X.shape[0]:
            raise ValueError("offsets inconsistent with the instance stack")

    @property
    def n_bags(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def bag_slices(self):
        return [slice(int(a), int(b)) for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    def bag_max(self, t: np.ndarray) -> np.ndarray:
        """Per-bag maximum of a stacked instance vector."""
        return np.maximum.reduceat(t, self.offsets[:-1])

    @classmethod
    def from_bags(cls, labels, instances) -> "BagDataset":
        """Build from a list of per-bag instance matrices (n_i x p)."""
        mats = [np.atleast_2d(np.asarray(m, dtype=float)) for m in instances]
        sizes = [m.shape[0] for m in mats]
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        return cls(labels=np.asarray(labels, dtype=float),
                   X=np.vstack(mats), offsets=offsets)


def save_bags_csv(path, data: BagDataset) -> None:
    """Write the bag_id,label,f1..fp instance-per-row format."""
    p = data.n_features
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bag_id", "label"] + [f"f{j + 1}" for j in range(p)])
        for i, sl in enumerate(data.bag_slices()):
            for row in data.X[sl]:
                writer.writerow([i, _fmt(data.labels[i])] + [_fmt(v) for v in row])


def load_bags_csv(path) -> BagDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["bag_id", "label"]:
            raise ValueError("expected header starting with bag_id,label")
        by_bag: dict = {}
        for row in reader:
            bag = int(row[0])
            by_bag.setdefault(bag, (float(row[1]), []))[1].append(
                [float(v) for v in row[2:]])
    bags = sorted(by_bag)
    labels = [by_bag[i][0] for i in bags]
    instances = [np.asarray(by_bag[i][1]) for i in bags]
    return BagDataset.from_bags(labels, instances)


def _fmt(v: float) -> str:
    return repr(float(v))


@dataclass
class MaxOpState:
    q: np.ndarray
    beta: np.ndarray
    t: np.ndarray  # stacked, one entry per instance
    y1: np.ndarray
    y2: np.ndarray  # stacked, matches t
    rho: float

    @classmethod
    def zeros(cls, data: BagDataset, rho: float) -> "MaxOpState":
        n_inst = data.X.shape[0]
        return cls(q=np.zeros(data.n_bags), beta=np.zeros(data.n_features),
                   t=np.zeros(n_inst), y1=np.zeros(data.n_bags),
                   y2=np.zeros(n_inst), rho=rho)


def update_q(loss: CompositeObjective, data: BagDataset, t: np.ndarray,
             y1: np.ndarray, rho: float,
             cfg: FistaConfig | None = None) -> np.ndarray:
    """Approximate argmin_q loss(q) + (rho/2)||q - max t + y1/rho||^2."""
    center = data.bag_max(t) - y1 / rho
    obj = with_quadratic(loss, rho, center)
    if cfg is None:
        cfg = FistaConfig(initial_step=1.0 / rho)
    return fista(obj, center, cfg)


def update_beta(reg: ProxTerm, data: BagDataset, t: np.ndarray,
                y2: np.ndarray, rho: float,
                cfg: FistaConfig | None = None,
                beta0: np.ndarray | None = None) -> np.ndarray:
    """Approximate argmin_beta reg(beta) + (rho/2)||t - X beta + y2/rho||^2."""
    X = data.X
    b = t + y2 / rho
    XtX = X.T @ X
    Xtb = X.T @ b

    def value(beta):
        r = X @ beta - b
        return 0.5 * rho * float(r @ r)

    def gradient(beta):
        return rho * (XtX @ beta - Xtb)

    obj = CompositeObjective(SmoothTerm(value=value, gradient=gradient), reg)
    if cfg is None:
        # Backtracking from the inverse of a cheap Lipschitz estimate.
        lip = rho * max(float(np.trace(XtX)), 1e-12)
        cfg = FistaConfig(initial_step=1.0 / lip)
    start = np.zeros(X.shape[1]) if beta0 is None else beta0
    return fista(obj, start, cfg)


def t_update_bag(psi: float, phi: np.ndarray) -> np.ndarray:
    """Exact global minimizer of (psi - max_j t_j)^2 + ||t - phi||^2.

    The top block of the sorted targets is averaged with psi; the block
    size is the smallest c whose average a_c exceeds the next sorted
    target, which yields the global minimum (the averaged objective is
    nondecreasing in c). Stable sort keeps ties deterministic.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    n = phi.size
    order = np.argsort(-phi, kind="stable")
    sorted_phi = phi[order]
    prefix = np.cumsum(sorted_phi)
    a = (prefix + psi) / (np.arange(1, n + 1) + 1.0)

    c_star = n
    for c in range(1, n):
        if a[c - 1] > sorted_phi[c]:
            c_star = c
            break

    t_sorted = sorted_phi.copy()
    t_sorted[:c_star] = a[c_star - 1]
    out = np.empty_like(t_sorted)
    out[order] = t_sorted
    return out


def bag_objective(psi: float, phi: np.ndarray, t: np.ndarray) -> float:
    """The per-bag t-subproblem objective (psi - max t)^2 + ||t - phi||^2."""
    d = t - phi
    return (psi - float(np.max(t))) ** 2 + float(d @ d)


def maxop_solve(data: BagDataset, loss: CompositeObjective, reg: ProxTerm,
                init: MaxOpState, schedule: RhoSchedule, stop: StopCriteria,
                fista_cfg: FistaConfig | None = None):
    """Cycle q (proximal gradient), beta (proximal gradient), t (exact per
    bag), then the two dual ascent steps, with combined residual norms."""
    q = np.asarray(init.q, dtype=float).copy()
    beta = np.asarray(init.beta, dtype=float).copy()
    t = np.asarray(init.t, dtype=float).copy()
    y1 = np.asarray(init.y1, dtype=float).copy()
    y2 = np.asarray(init.y2, dtype=float).copy()
    slices = data.bag_slices()

    trace: List[TraceRow] = []
    converged = False
    for k in range(stop.max_iter):
        rho = schedule.at(k)
        t_old = t

        q = update_q(loss, data, t, y1, rho, fista_cfg)
        beta = update_beta(reg, data, t, y2, rho, fista_cfg, beta0=beta)
        scores = data.X @ beta
        phi_all = scores - y2 / rho
        t = t.copy()
        for i, sl in enumerate(slices):
            t[sl] = t_update_bag(q[i] + y1[i] / rho, phi_all[sl])

        maxes = data.bag_max(t)
        r1 = q - maxes
        r2 = t - scores
        s1 = rho * (data.bag_max(t_old) - maxes)
        s2 = t - t_old  # deliberately unscaled, mirroring the r2 dual line
        y1 = y1 + rho * r1
        y2 = y2 + rho * r2

        r = float(np.sqrt(r1 @ r1 + r2 @ r2))
        s = float(np.sqrt(s1 @ s1 + s2 @ s2))
        obj = float(loss.value(q) + reg.value(beta))
        trace.append(TraceRow(k=k, objective=obj, r_norm=r, s_norm=s, rho=rho))
        if r <= stop.tol_primal and s <= stop.tol_dual:
            converged = True
            break

    state = MaxOpState(q=q, beta=beta, t=t, y1=y1, y2=y2, rho=trace[-1].rho)
    return state, trace, converged
