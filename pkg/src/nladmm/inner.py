"""Convex inner solvers: accelerated proximal gradient, a real-root cubic
solver, and a bracketed scalar minimizer used as a test oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .errors import DegenerateAllZero, InvalidBracket, NonFiniteIterate
from .terms import CompositeObjective

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


@dataclass(frozen=True)
class FistaConfig:
    max_iter: int = 500
    tol: float = 1e-8
    initial_step: float = 1.0
    backtracking_factor: float = 0.5

    def __post_init__(self):
        if self.max_iter < 1 or self.tol <= 0 or self.initial_step <= 0:
            raise ValueError("invalid FISTA configuration")
        if not 0.0 < self.backtracking_factor < 1.0:
            raise ValueError("backtracking_factor must lie in (0, 1)")


def _backtracked_step(obj: CompositeObjective, z: np.ndarray, step: float,
                      factor: float):
    """Proximal gradient step from z with the standard sufficient-decrease
    backtracking on the smooth part. Returns (new point, accepted step)."""
    g = obj.smooth.gradient(z)
    fz = obj.smooth.value(z)
    while True:
        xn = obj.nonsmooth.prox(z - step * g, step)
        diff = xn - z
        quad = fz + g @ diff + (diff @ diff) / (2.0 * step)
        if obj.smooth.value(xn) <= quad + 1e-12 * (1.0 + abs(quad)):
            return xn, step
        step *= factor
        if step < 1e-18:
            return xn, step


def fista(obj: CompositeObjective, x0: np.ndarray,
          cfg: FistaConfig = FistaConfig()) -> np.ndarray:
    """Accelerated proximal gradient with backtracking line search.

    Uses function-value restart so the returned point never has a larger
    composite objective than x0.
    """
    x = np.asarray(x0, dtype=float).copy()
    fx = obj.value(x)
    z = x
    t = 1.0
    step = cfg.initial_step

    for _ in range(cfg.max_iter):
        xn, step = _backtracked_step(obj, z, step, cfg.backtracking_factor)
        fn = obj.value(xn)
        if fn > fx:
            # Momentum overshot: restart from the current best iterate.
            xn, step = _backtracked_step(obj, x, step, cfg.backtracking_factor)
            fn = obj.value(xn)
            t = 1.0
        if not np.all(np.isfinite(xn)):
            raise NonFiniteIterate("non-finite iterate in accelerated proximal gradient")
        delta = float(np.linalg.norm(xn - x))
        tn = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        z = xn + ((t - 1.0) / tn) * (xn - x)
        x, fx, t = xn, min(fn, fx), tn
        if delta <= cfg.tol:
            break
    return x


@dataclass(frozen=True)
class CubicRealRoots:
    roots: List[float]


def _polish_root(a: float, b: float, c: float, d: float, r: float) -> float:
    # A few Newton steps remove the floating-point error of the closed form.
    # Steps are only accepted while they shrink the residual, so a nearly
    # vanishing derivative (repeated roots) cannot throw the estimate away.
    def poly(t: float) -> float:
        return ((a * t + b) * t + c) * t + d

    p = poly(r)
    for _ in range(8):
        dp = (3.0 * a * r + 2.0 * b) * r + c
        if dp == 0.0:
            break
        rn = r - p / dp
        if not math.isfinite(rn):
            break
        pn = poly(rn)
        if abs(pn) >= abs(p):
            break
        r, p = rn, pn
        if p == 0.0:
            break
    return r


def cubic_real_roots(a: float, b: float, c: float, d: float) -> CubicRealRoots:
    """All real roots of a*t^3 + b*t^2 + c*t + d = 0, ascending.

    Degenerate leading coefficients fall back to the quadratic / linear
    case. Uses the closed form (trigonometric branch when all three roots
    are real) followed by a Newton polish per root.
    """
    if a == 0.0 and b == 0.0 and c == 0.0 and d == 0.0:
        raise DegenerateAllZero("all cubic coefficients are zero")

    if a == 0.0:
        if b == 0.0:
            roots = [] if c == 0.0 else [-d / c]
        else:
            disc = c * c - 4.0 * b * d
            if disc < 0.0:
                roots = []
            elif disc == 0.0:
                roots = [-c / (2.0 * b)]
            else:
                sq = math.sqrt(disc)
                roots = [(-c - sq) / (2.0 * b), (-c + sq) / (2.0 * b)]
    else:
        # Depressed cubic t = s - b/(3a):  s^3 + p s + q = 0.
        p = (3.0 * a * c - b * b) / (3.0 * a * a)
        q = (2.0 * b ** 3 - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a ** 3)
        shift = -b / (3.0 * a)
        disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
        # Rounding can push a repeated root across the disc = 0 boundary, so
        # the boundary case is detected with a relative tolerance.
        scale = (q / 2.0) ** 2 + abs(p / 3.0) ** 3
        if abs(disc) <= 1e-12 * scale:
            if p == 0.0:
                roots = [shift]  # triple root
            else:
                # One simple root and one double root.
                roots = [3.0 * q / p + shift, -3.0 * q / (2.0 * p) + shift]
        elif disc > 0.0:
            sq = math.sqrt(disc)
            s = _cbrt(-q / 2.0 + sq) + _cbrt(-q / 2.0 - sq)
            roots = [s + shift]
        else:
            # Three real roots (casus irreducibilis): trigonometric form.
            m = 2.0 * math.sqrt(-p / 3.0)
            arg = 3.0 * q / (p * m)
            arg = min(1.0, max(-1.0, arg))
            theta = math.acos(arg)
            roots = [m * math.cos((theta - 2.0 * math.pi * j) / 3.0) + shift
                     for j in range(3)]

    polished = sorted(_polish_root(a, b, c, d, r) for r in roots)
    deduped: List[float] = []
    for r in polished:
        if not deduped or abs(r - deduped[-1]) > 1e-12 * max(1.0, abs(r)):
            deduped.append(r)
    return CubicRealRoots(roots=deduped)


def golden_section_min(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-8) -> float:
    """Minimizer of f on [lo, hi] localized to an interval of width <= tol.

    Guaranteed optimal for unimodal f; otherwise returns a local minimizer
    within the bracket.
    """
    if lo >= hi:
        raise InvalidBracket(f"invalid bracket [{lo}, {hi}]")
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)
