"""Problem container: objective, inequality constraints g_j(x) >= 0, box.

The box is a sampling window for grids and probes, not part of the feasible
set; problems that want bound constraints state them as g_j entries.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import expr
from .expr import Expr


class ProblemError(Exception):
    pass


class Feasibility(str, Enum):
    STRICTLY_FEASIBLE = "strictly_feasible"
    BOUNDARY = "boundary"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, slots=True)
class ActiveSet:
    """Indices (1-based) of constraints at or below an activation tolerance."""

    indices: frozenset[int]
    tolerance: float

    def as_sorted(self) -> list[int]:
        return sorted(self.indices)

    def __contains__(self, j: int) -> bool:
        return j in self.indices


@dataclass(frozen=True)
class Problem:
    name: str
    nvars: int
    objective: Expr
    constraints: tuple[Expr, ...]
    box: np.ndarray  # shape (nvars, 2), columns lo, hi
    interior_point: np.ndarray | None = None
    source: dict = field(default_factory=dict, repr=False)

    @property
    def nconstraints(self) -> int:
        return len(self.constraints)


def evaluate_constraints(p: Problem, x) -> np.ndarray:
    """All g_j at one point, shape (m,)."""
    return np.array([expr.evaluate(g, x) for g in p.constraints])


def feasibility(p: Problem, x, boundary_tol: float = 0.0) -> Feasibility:
    """Classify a point against the constraints (the box is ignored).

    Strictly feasible means every g_j > boundary_tol; boundary means no g_j
    is negative below -boundary_tol but some g_j is within the tolerance.
    """
    gvals = evaluate_constraints(p, x)
    if np.any(gvals < -boundary_tol):
        return Feasibility.INFEASIBLE
    if np.all(gvals > boundary_tol):
        return Feasibility.STRICTLY_FEASIBLE
    return Feasibility.BOUNDARY


def active_set(p: Problem, x, tolerance: float) -> ActiveSet:
    gvals = evaluate_constraints(p, x)
    idx = frozenset(j + 1 for j in range(len(gvals)) if gvals[j] <= tolerance)
    return ActiveSet(idx, tolerance)


_PARAM_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


def _format_param(value) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemError(f"parameter value must be a number, got {value!r}")
    if isinstance(value, int):
        return repr(value)
    return repr(float(value))


def _substitute_params(text: str, params: dict) -> str:
    for name, value in params.items():
        text = re.sub(rf"\b{re.escape(name)}\b", _format_param(value), text)
    return text


def problem_from_dict(data: dict) -> Problem:
    """Build a Problem from its dict form.

    Required keys: name, nvars, objective, constraints, box.  Optional:
    interior_point (must be strictly feasible and strictly inside the box)
    and params, a mapping of names substituted textually into expression
    strings before parsing.
    """
    if not isinstance(data, dict):
        raise ProblemError("problem data must be a JSON object")
    for key in ("name", "nvars", "objective", "constraints", "box"):
        if key not in data:
            raise ProblemError(f"missing required key {key!r}")

    name = data["name"]
    if not isinstance(name, str) or not name:
        raise ProblemError("name must be a nonempty string")
    nvars = data["nvars"]
    if not isinstance(nvars, int) or isinstance(nvars, bool) or nvars < 1:
        raise ProblemError("nvars must be a positive integer")

    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ProblemError("params must be an object")
    for pname in params:
        if not _PARAM_NAME_RE.match(pname):
            raise ProblemError(f"invalid parameter name {pname!r}")
        if pname in ("ln", "exp") or re.match(r"^x\d+$", pname):
            raise ProblemError(f"parameter name {pname!r} collides with the expression language")

    def parse_one(text, label):
        if not isinstance(text, str):
            raise ProblemError(f"{label} must be a string")
        try:
            return expr.parse(_substitute_params(text, params), nvars)
        except expr.ParseError as err:
            raise ProblemError(f"cannot parse {label}: {err}") from err

    objective = parse_one(data["objective"], "objective")
    raw_constraints = data["constraints"]
    if not isinstance(raw_constraints, list) or not raw_constraints:
        raise ProblemError("constraints must be a nonempty list of strings")
    constraints = tuple(
        parse_one(text, f"constraint {j + 1}") for j, text in enumerate(raw_constraints)
    )

    raw_box = data["box"]
    if not isinstance(raw_box, list) or len(raw_box) != nvars:
        raise ProblemError(f"box must list {nvars} [lo, hi] pairs")
    box = np.zeros((nvars, 2))
    for i, pair in enumerate(raw_box):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ProblemError(f"box entry {i + 1} must be a [lo, hi] pair")
        lo, hi = float(pair[0]), float(pair[1])
        if not lo < hi:
            raise ProblemError(f"box entry {i + 1} must have lo < hi")
        box[i] = (lo, hi)

    interior = None
    if data.get("interior_point") is not None:
        raw_pt = data["interior_point"]
        if not isinstance(raw_pt, list) or len(raw_pt) != nvars:
            raise ProblemError(f"interior_point must list {nvars} coordinates")
        interior = np.array([float(v) for v in raw_pt])

    p = Problem(
        name=name,
        nvars=nvars,
        objective=objective,
        constraints=constraints,
        box=box,
        interior_point=interior,
        source=data,
    )

    if interior is not None:
        if np.any(interior <= box[:, 0]) or np.any(interior >= box[:, 1]):
            raise ProblemError("interior_point must lie strictly inside the box")
        if feasibility(p, interior) is not Feasibility.STRICTLY_FEASIBLE:
            raise ProblemError("interior_point must be strictly feasible")
    return p


def load(path) -> Problem:
    """Load a problem from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise ProblemError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ProblemError(f"invalid JSON in {path}: {err}") from err
    return problem_from_dict(data)
