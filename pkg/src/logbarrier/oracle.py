"""Slow, independent reference answers.

grid_minimize brute-forces small problems on a dense grid and polishes the
best feasible point with projected descent along the boundary;
gradient_check compares dual propagation against central finite
differences.  Both exist to catch the fast paths lying, so they share no
machinery with the barrier code beyond expression evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr
from .expr import Expr
from .problem import Problem

MAX_ORACLE_VARS = 3
MIN_RESOLUTION = 11
CHUNK_TARGET = 1 << 20


class OracleError(Exception):
    pass


@dataclass(frozen=True)
class OracleResult:
    x_best: np.ndarray
    f_best: float
    grid_resolution: int
    polished: bool

    def to_record(self) -> dict:
        return {
            "record": "oracle",
            "x_best": [float(v) for v in self.x_best],
            "f_best": self.f_best,
            "grid_resolution": self.grid_resolution,
            "polished": self.polished,
        }


def _iter_chunks(box: np.ndarray, res: int):
    """Yield grid points in row-major order, bounded chunks at a time."""
    axes = [np.linspace(lo, hi, res) for lo, hi in box]
    n = len(axes)
    if n == 1:
        yield axes[0][:, None]
        return
    tail_size = res ** (n - 1)
    rows_per_chunk = max(1, CHUNK_TARGET // tail_size)
    tail_mesh = np.meshgrid(*axes[1:], indexing="ij")
    tail = np.stack([m.ravel() for m in tail_mesh], axis=1)
    for start in range(0, res, rows_per_chunk):
        first = axes[0][start : start + rows_per_chunk]
        block = np.empty((first.size * tail_size, n))
        block[:, 0] = np.repeat(first, tail_size)
        block[:, 1:] = np.tile(tail, (first.size, 1))
        yield block


def _feasible_mask(p: Problem, points: np.ndarray) -> np.ndarray:
    mask = np.ones(points.shape[0], dtype=bool)
    for g in p.constraints:
        mask &= expr.evaluate_many(g, points) >= 0.0
        if not mask.any():
            break
    return mask


_ACTIVE_EPS = 1e-9


def _min_g(p: Problem, x: np.ndarray) -> float:
    return min(expr.evaluate(g, x) for g in p.constraints)


def _restore(p: Problem, cand: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    """Pull an infeasible candidate back into the feasible set.

    Walks inward along the most violated constraint's gradient, expanding
    the step until feasible and bisecting back to the boundary.  The
    expand-then-bisect never misses the crossing even when the gradient
    nearly vanishes at the zero set (a plain Newton pullback would creep
    toward a multiple root from the wrong side forever).  When no usable
    gradient direction exists, falls back to bisecting the chord to the
    feasible anchor.
    """
    for _ in range(4):
        gvals = [expr.evaluate(g, cand) for g in p.constraints]
        worst = min(range(len(gvals)), key=lambda j: gvals[j])
        if gvals[worst] >= 0.0:
            return cand
        grad = expr.evaluate_dual(p.constraints[worst], cand).grad
        gnorm = float(np.linalg.norm(grad))
        if gnorm < 1e-14:
            break
        u = grad / gnorm
        t = -gvals[worst] / gnorm
        feasible_t = None
        for _ in range(60):
            if _min_g(p, cand + t * u) >= 0.0:
                feasible_t = t
                break
            t *= 2.0
        if feasible_t is None:
            break
        lo, hi = 0.0, feasible_t
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _min_g(p, cand + mid * u) >= 0.0:
                hi = mid
            else:
                lo = mid
        cand = cand + hi * u
    if _min_g(p, cand) >= 0.0:
        return cand
    lo, hi = 0.0, 1.0
    chord = anchor - cand
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _min_g(p, cand + mid * chord) >= 0.0:
            hi = mid
        else:
            lo = mid
    return cand + hi * chord


def _polish(p: Problem, x: np.ndarray, fx: float, steps: int) -> tuple[np.ndarray, float]:
    """Projected descent from a feasible point, never leaving the feasible set.

    The step direction is the negative objective gradient with the
    outward components of near-active constraint gradients projected out,
    so iterates can slide along a curved boundary instead of jamming
    against it.  Candidates that leave the feasible set are restored
    inward; only strict objective improvements are kept.
    """
    t = 1.0
    for _ in range(steps):
        dual = expr.evaluate_dual(p.objective, x)
        d = -dual.grad
        scale = 1.0 + float(np.linalg.norm(dual.grad))
        for j, g in enumerate(p.constraints):
            if expr.evaluate(g, x) > _ACTIVE_EPS * scale:
                continue
            n = expr.evaluate_dual(g, x).grad
            nn = float(np.linalg.norm(n))
            if nn < 1e-14:
                continue
            n = n / nn
            downhill = float(n @ d)
            if downhill < 0.0:
                d = d - downhill * n
        if float(np.linalg.norm(d)) <= 1e-10 * scale:
            break
        improved = False
        for _ in range(25):
            cand = np.clip(x + t * d, p.box[:, 0], p.box[:, 1])
            if _min_g(p, cand) < 0.0:
                cand = _restore(p, cand, x)
            fc = expr.evaluate(p.objective, cand)
            if fc < fx:
                x, fx = cand, fc
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        t = min(t * 2.0, 1.0)
    return x, fx


def grid_minimize(p: Problem, res: int = 101, polish_steps: int = 50) -> OracleResult:
    """Minimize by dense feasible grid search over the box, then polish.

    Deterministic: ties on the grid go to the lexicographically smallest
    point.  Limited to 3 variables; res must be at least 11.  Raises
    OracleError when no grid point is feasible.
    """
    if p.nvars > MAX_ORACLE_VARS:
        raise OracleError(f"grid oracle supports up to {MAX_ORACLE_VARS} variables")
    if res < MIN_RESOLUTION:
        raise OracleError(f"resolution must be at least {MIN_RESOLUTION}")

    best_f = np.inf
    best_x: np.ndarray | None = None
    for block in _iter_chunks(p.box, res):
        mask = _feasible_mask(p, block)
        if not mask.any():
            continue
        feas = block[mask]
        fvals = expr.evaluate_many(p.objective, feas)
        i = int(np.argmin(fvals))
        f_i, x_i = float(fvals[i]), feas[i]
        if f_i < best_f or (
            f_i == best_f and best_x is not None and tuple(x_i) < tuple(best_x)
        ):
            best_f, best_x = f_i, x_i.copy()
    if best_x is None:
        raise OracleError(f"no feasible grid point at resolution {res}")

    polished = polish_steps > 0
    if polished:
        best_x, best_f = _polish(p, best_x, best_f, polish_steps)
    return OracleResult(
        x_best=best_x,
        f_best=float(best_f),
        grid_resolution=res,
        polished=polished,
    )


def gradient_check(e: Expr, x, step: float = 1e-6) -> float:
    """Worst relative disagreement between dual gradient and central FD.

    Relative error uses max(|dual|, |fd|, 1) per coordinate.  Evaluation
    errors at stencil points (for example ln off its domain) propagate.
    """
    xs = np.array([float(v) for v in x])
    dual = expr.evaluate_dual(e, xs)
    worst = 0.0
    for i in range(e.nvars):
        hplus = xs.copy()
        hminus = xs.copy()
        hplus[i] += step
        hminus[i] -= step
        fd = (expr.evaluate(e, hplus) - expr.evaluate(e, hminus)) / (2.0 * step)
        denom = max(abs(float(dual.grad[i])), abs(fd), 1.0)
        worst = max(worst, abs(float(dual.grad[i]) - fd) / denom)
    return worst
