"""Objective and constraint building blocks.

Vectors are plain 1-D numpy float arrays. Objective terms come in two
flavors: smooth (value + gradient) and prox-friendly (value + proximal
map). Constraint maps carry a Jacobian; at kinks the Jacobian callable
must return one designated subgradient element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float array, optionally checking its length."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"expected a nonempty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    return v


@dataclass(frozen=True)
class SmoothTerm:
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProxTerm:
    value: Callable[[np.ndarray], float]
    prox: Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class ConstraintTerm:
    """Nonlinear map R^dim_in -> R^dim_out with a Jacobian."""

    dim_in: int
    dim_out: int
    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.eval(x)


@dataclass(frozen=True)
class CompositeObjective:
    """Smooth part plus prox-friendly part, both over the same dimension."""

    smooth: SmoothTerm
    nonsmooth: ProxTerm

    def value(self, x: np.ndarray) -> float:
        return float(self.smooth.value(x) + self.nonsmooth.value(x))


def soft_threshold(v: np.ndarray, thresh: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


def zero_smooth() -> SmoothTerm:
    return SmoothTerm(value=lambda x: 0.0, gradient=np.zeros_like)


def zero_prox() -> ProxTerm:
    return ProxTerm(value=lambda x: 0.0, prox=lambda v, step: v)


def zero_composite() -> CompositeObjective:
    return CompositeObjective(zero_smooth(), zero_prox())


def l1_term(lam: float = 1.0) -> ProxTerm:
    """lam * ||.||_1 with its exact shrinkage prox."""
    return ProxTerm(
        value=lambda x: lam * float(np.sum(np.abs(x))),
        prox=lambda v, step: soft_threshold(v, lam * step),
    )


def quadratic_smooth(weight: float, center: np.ndarray) -> SmoothTerm:
    """(weight/2) * ||x - center||^2."""
    c = np.asarray(center, dtype=float)
    return SmoothTerm(
        value=lambda x: 0.5 * weight * float(np.dot(x - c, x - c)),
        gradient=lambda x: weight * (x - c),
    )


def add_smooth(a: SmoothTerm, b: SmoothTerm) -> SmoothTerm:
    return SmoothTerm(
        value=lambda x: a.value(x) + b.value(x),
        gradient=lambda x: a.gradient(x) + b.gradient(x),
    )


def with_quadratic(obj: CompositeObjective, weight: float, center: np.ndarray) -> CompositeObjective:
    """Augment a composite objective with (weight/2)||x - center||^2."""
    return CompositeObjective(
        smooth=add_smooth(obj.smooth, quadratic_smooth(weight, center)),
        nonsmooth=obj.nonsmooth,
    )


def logistic_loss(labels: np.ndarray) -> SmoothTerm:
    """Componentwise log loss sum_i log(1 + exp(q_i)) - labels_i * q_i."""
    y = np.asarray(labels, dtype=float)

    def value(q):
        return float(np.sum(np.logaddexp(0.0, q) - y * q))

    def gradient(q):
        return 1.0 / (1.0 + np.exp(-q)) - y

    return SmoothTerm(value=value, gradient=gradient)


def linear_constraint(A: np.ndarray) -> ConstraintTerm:
    A = np.asarray(A, dtype=float)
    return ConstraintTerm(
        dim_in=A.shape[1],
        dim_out=A.shape[0],
        eval=lambda x: A @ x,
        jacobian=lambda x: A,
    )
