"""Unconstrained minimization of the barrier at fixed mu.

Backtracking line search keeps every iterate strictly interior: a step is
halved while it lands outside the interior (where the barrier reports +inf)
and then further until the Armijo decrease test holds.  Directions are
steepest descent or, optionally, Newton with an eigenvalue shift that makes
the Hessian safely positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .barrier import barrier_eval, barrier_hessian, barrier_value
from .problem import Problem

ARMIJO_C1 = 1e-4
MIN_STEP = 1e-16
MAX_HALVINGS = 200
EIG_FLOOR = 1e-8


class InfeasibleStartError(Exception):
    """Starting point is not strictly interior."""


class InnerStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    LINE_SEARCH_STALL = "line_search_stall"


@dataclass(frozen=True)
class InnerResult:
    x: np.ndarray
    grad_norm: float
    iterations: int
    status: InnerStatus


def default_tolerance(mu: float) -> float:
    """Gradient-norm target at weight mu: max(1e-8, 1e-2 * mu)."""
    return max(1e-8, 1e-2 * mu)


def _newton_direction(p: Problem, x: np.ndarray, mu: float, gradient: np.ndarray) -> np.ndarray:
    h = barrier_hessian(p, x, mu)
    if not np.all(np.isfinite(h)):
        return -gradient
    eigs = np.linalg.eigvalsh(h)
    shift = 0.0 if eigs[0] >= EIG_FLOOR else EIG_FLOOR - eigs[0]
    try:
        d = np.linalg.solve(h + shift * np.eye(len(x)), -gradient)
    except np.linalg.LinAlgError:
        return -gradient
    if not np.all(np.isfinite(d)) or float(d @ gradient) >= 0.0:
        return -gradient
    return d


def solve_inner(
    p: Problem,
    mu: float,
    x_start,
    tol: float | None = None,
    max_iters: int = 5000,
    newton: bool = False,
    callback: Callable[[int, np.ndarray, float, float, float], None] | None = None,
) -> InnerResult:
    """Minimize the barrier at fixed mu from a strictly interior start.

    tol defaults to max(1e-8, 1e-2 * mu).  The callback, if given, receives
    (iteration, x, value, grad_norm, step) once per iterate; step is the
    length of the step that produced the iterate, 0.0 for the start.
    """
    if tol is None:
        tol = default_tolerance(mu)
    x = np.array([float(v) for v in x_start])
    be = barrier_eval(p, x, mu)
    if not be.interior:
        raise InfeasibleStartError(
            f"start is not strictly interior (min g = {be.constraint_values.min()})"
        )

    step = 0.0
    iterations = 0
    for k in range(max_iters + 1):
        grad_norm = float(np.linalg.norm(be.gradient))
        if callback is not None:
            callback(k, x.copy(), be.value, grad_norm, step)
        if grad_norm <= tol:
            return InnerResult(x, grad_norm, iterations, InnerStatus.CONVERGED)
        if k == max_iters:
            break

        d = _newton_direction(p, x, mu, be.gradient) if newton else -be.gradient
        slope = float(be.gradient @ d)
        t = 1.0
        halvings = 0
        accepted = None
        while t >= MIN_STEP and halvings <= MAX_HALVINGS:
            cand = x + t * d
            val = barrier_value(p, cand, mu)
            if val <= be.value + ARMIJO_C1 * t * slope:
                accepted = (cand, t)
                break
            t *= 0.5
            halvings += 1
        if accepted is None:
            return InnerResult(x, grad_norm, iterations, InnerStatus.LINE_SEARCH_STALL)

        x, step = accepted
        be = barrier_eval(p, x, mu)
        iterations += 1

    grad_norm = float(np.linalg.norm(be.gradient))
    return InnerResult(x, grad_norm, iterations, InnerStatus.MAX_ITERS)
