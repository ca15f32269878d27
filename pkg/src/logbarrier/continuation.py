"""Continuation along a decreasing barrier weight schedule.

Each stage minimizes the barrier at the current mu, warm-starting from the
previous stage's solution.  As mu shrinks the iterates track the central
path; multiplier estimates mu / g_j converge to KKT multipliers, so the
final stage yields a certificate candidate directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expr
from .barrier import barrier_eval
from .certificate import KKTCertificate, KKTTolerances, check_kkt
from .inner import InnerStatus, solve_inner
from .problem import Problem, active_set


class ContinuationError(Exception):
    pass


# A stage that misses its gradient tolerance but lands within this factor of
# it is kept (with its honest status) instead of aborting the run.  At small
# mu the barrier Hessian norm grows like 1/mu, so the attainable gradient
# norm in float64 is bounded below by roughly eps * |H| * |x|, which can sit
# just above the nominal tolerance; the miss is recorded, not hidden.
STAGE_GRACE = 100.0


@dataclass(frozen=True)
class MuSchedule:
    """Geometric weight schedule mu0 * factor^k, stopping at mu_min."""

    mu0: float = 1.0
    factor: float = 0.2
    mu_min: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.mu_min <= self.mu0:
            raise ValueError("need 0 < mu_min <= mu0")
        if not 0.0 < self.factor < 1.0:
            raise ValueError("need 0 < factor < 1")

    def weights(self) -> list[float]:
        out = [self.mu0]
        while out[-1] * self.factor >= self.mu_min:
            out.append(out[-1] * self.factor)
        return out


@dataclass(frozen=True)
class PathPoint:
    mu: float
    x: np.ndarray
    multipliers: np.ndarray
    objective: float
    grad_norm: float
    status: InnerStatus

    def to_record(self) -> dict:
        return {
            "record": "path_point",
            "mu": self.mu,
            "x": [float(v) for v in self.x],
            "multipliers": [float(v) for v in self.multipliers],
            "objective": self.objective,
            "grad_norm": self.grad_norm,
            "status": self.status.value,
        }


@dataclass(frozen=True)
class SolveTrace:
    points: list[PathPoint]
    final_certificate: KKTCertificate

    def to_records(self) -> list[dict]:
        records = [pt.to_record() for pt in self.points]
        records.append(self.final_certificate.to_record())
        return records


def _stage(p, mu, x, tol_floor, max_iters, newton, callback):
    result = solve_inner(
        p,
        mu,
        x,
        tol=max(tol_floor, 1e-2 * mu),
        max_iters=max_iters,
        newton=newton,
        callback=None,
    )
    if callback is not None:
        callback(mu, result)
    return result


def _path_point(p: Problem, mu: float, result) -> PathPoint:
    be = barrier_eval(p, result.x, mu)
    return PathPoint(
        mu=mu,
        x=result.x,
        multipliers=be.multipliers,
        objective=float(expr.evaluate(p.objective, result.x)),
        grad_norm=result.grad_norm,
        status=result.status,
    )


def solve(
    p: Problem,
    schedule: MuSchedule | None = None,
    x0=None,
    newton: bool = True,
    tol_floor: float = 1e-8,
    max_iters: int = 5000,
    tols: KKTTolerances | None = None,
    stage_callback: Callable | None = None,
) -> SolveTrace:
    """Run the full continuation and certify the final iterate.

    The start is x0, else the problem's interior point, else a grid search
    for a strictly feasible point.  When a stage fails to converge, one
    retry eases in through an intermediate weight (the geometric mean of
    the last two).  A stage that still misses its tolerance is kept anyway,
    with its honest status on the path point, as long as the gradient norm
    is within STAGE_GRACE of the tolerance; otherwise ContinuationError.
    The final certificate uses activation cutoff sqrt(mu_last) and zeroes
    multiplier estimates outside the resulting active set.
    """
    if schedule is None:
        schedule = MuSchedule()
    if x0 is not None:
        x = np.array([float(v) for v in x0])
    elif p.interior_point is not None:
        x = p.interior_point.copy()
    else:
        from .diagnostics import slater_find

        x, _ = slater_find(p)

    be = barrier_eval(p, x, schedule.mu0)
    if not be.interior:
        raise ContinuationError(
            f"no strictly feasible start (min g = {be.constraint_values.min()} at the start point)"
        )

    points: list[PathPoint] = []
    weights = schedule.weights()
    prev_mu = None
    for mu in weights:
        tol_stage = max(tol_floor, 1e-2 * mu)
        result = _stage(p, mu, x, tol_floor, max_iters, newton, stage_callback)
        if (
            result.status is not InnerStatus.CONVERGED
            and result.grad_norm > STAGE_GRACE * tol_stage
            and prev_mu is not None
        ):
            # one retry: ease in through the geometric mean of the two weights
            mu_mid = math.sqrt(prev_mu * mu)
            mid_result = _stage(p, mu_mid, x, tol_floor, max_iters, newton, stage_callback)
            if mid_result.status is InnerStatus.CONVERGED:
                points.append(_path_point(p, mu_mid, mid_result))
                x = mid_result.x
                result = _stage(p, mu, x, tol_floor, max_iters, newton, stage_callback)
        if (
            result.status is not InnerStatus.CONVERGED
            and result.grad_norm > STAGE_GRACE * tol_stage
        ):
            raise ContinuationError(
                f"inner solve failed at mu = {mu:.3e} ({result.status.value}, "
                f"grad norm {result.grad_norm:.3e})"
            )
        points.append(_path_point(p, mu, result))
        x = result.x
        prev_mu = mu

    mu_last = points[-1].mu
    x_last = points[-1].x
    cutoff = math.sqrt(mu_last)
    aset = active_set(p, x_last, cutoff)
    lam = points[-1].multipliers.copy()
    for j in range(p.nconstraints):
        if (j + 1) not in aset:
            lam[j] = 0.0
    if tols is None:
        tols = KKTTolerances(activation=cutoff)
    cert = check_kkt(p, x_last, lam, tols)
    return SolveTrace(points=points, final_certificate=cert)


def accumulate(trace: SolveTrace, tail: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Final x plus tail-averaged multipliers, zeroed off the active set.

    Averages the multiplier estimates of the last `tail` path points for
    the constraints in the final certificate's active set.
    """
    if tail < 1:
        raise ValueError("tail must be at least 1")
    if len(trace.points) < tail:
        raise ValueError(f"trace has {len(trace.points)} points, need at least {tail}")
    x_star = trace.points[-1].x
    aset = trace.final_certificate.active_set
    stacked = np.stack([pt.multipliers for pt in trace.points[-tail:]])
    lam = stacked.mean(axis=0)
    for j in range(lam.shape[0]):
        if (j + 1) not in aset:
            lam[j] = 0.0
    return x_star, lam
