"""Log-barrier evaluation.

For a problem with constraints g_j(x) >= 0 and weight mu > 0 the barrier is

    phi(x) = f(x) - mu * sum_j ln(g_j(x))

defined on the strict interior {x : all g_j(x) > 0} and +inf elsewhere.
The gradient identity grad phi = grad f - sum_j (mu / g_j) grad g_j makes
mu / g_j(x) the natural multiplier estimate attached to each evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr
from .problem import Problem


class InfeasiblePointError(Exception):
    """Raised when a barrier Hessian is requested outside the strict interior."""


@dataclass(frozen=True)
class BarrierEvaluation:
    mu: float
    value: float  # +inf outside the strict interior
    constraint_values: np.ndarray
    gradient: np.ndarray | None  # None outside the strict interior
    multipliers: np.ndarray | None  # mu / g_j, None outside the strict interior

    @property
    def interior(self) -> bool:
        return self.gradient is not None


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not mu > 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    return mu


def barrier_value(p: Problem, x, mu: float) -> float:
    """Barrier value only; +inf outside the strict interior.

    Cheap path for line searches: no gradients, and ln is never reached
    for a nonpositive constraint value.
    """
    mu = _check_mu(mu)
    total = expr.evaluate(p.objective, x)
    for g in p.constraints:
        gv = expr.evaluate(g, x)
        if gv <= 0.0:
            return math.inf
        total -= mu * math.log(gv)
    return total


def barrier_eval(p: Problem, x, mu: float) -> BarrierEvaluation:
    """Value, gradient and multiplier estimates at one point.

    Outside the strict interior the value is +inf and gradient and
    multipliers are None; no logarithm of a nonpositive value is ever taken.
    """
    mu = _check_mu(mu)
    gvals = np.array([expr.evaluate(g, x) for g in p.constraints])
    if np.any(gvals <= 0.0):
        return BarrierEvaluation(mu, math.inf, gvals, None, None)

    fdual = expr.evaluate_dual(p.objective, x)
    grads = np.array([expr.evaluate_dual(g, x).grad for g in p.constraints])
    multipliers = mu / gvals
    value = fdual.value - mu * float(np.sum(np.log(gvals)))
    gradient = fdual.grad - grads.T @ multipliers
    return BarrierEvaluation(mu, value, gvals, gradient, multipliers)


def barrier_hessian(p: Problem, x, mu: float) -> np.ndarray:
    """Dense barrier Hessian at a strictly interior point.

    Each constraint contributes (mu / g_j^2) grad g_j grad g_j^T
    - (mu / g_j) hess g_j on top of the objective Hessian.  Raises
    InfeasiblePointError off the strict interior.
    """
    mu = _check_mu(mu)
    duals = [expr.evaluate_dual(g, x) for g in p.constraints]
    gvals = np.array([d.value for d in duals])
    if np.any(gvals <= 0.0):
        raise InfeasiblePointError(
            f"barrier Hessian requested outside the strict interior (min g = {gvals.min()})"
        )
    h = expr.evaluate_dual(p.objective, x).hess.copy()
    for d in duals:
        h += (mu / d.value**2) * np.outer(d.grad, d.grad) - (mu / d.value) * d.hess
    return h
