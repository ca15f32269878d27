"""Built-in test problems.

Five two-variable instances: a Cassini-oval region whose defining function
is neither concave nor log-concave while the region itself is convex, a
hyperbola region with log-concave constraints, a box-with-ratio-constraint
instance whose barrier is provably nonconvex at interior points, a disk
control with a concave constraint, and the disk with its constraint cubed
so that boundary gradients vanish (a nondegeneracy failure control).

Objectives are linear where the point is isolating barrier curvature in
the constraint representation, quadratic on the disk controls.  The same
entries ship as JSON problem files under data/.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .problem import Problem, ProblemError, problem_from_dict


@dataclass(frozen=True)
class KnownOptimum:
    x: tuple[float, ...]
    f: float
    provenance: str


@dataclass(frozen=True)
class CorpusEntry:
    problem: Problem
    provenance: str
    known_optimum: KnownOptimum | None


_RAW: dict[str, dict] = {
    "cassini": {
        "name": "cassini",
        "nvars": 2,
        "objective": "x1 + x2",
        "constraints": ["4 - ((x1 + 1)^2 + x2^2)*((x1 - 1)^2 + x2^2)"],
        "box": [[-2, 2], [-2, 2]],
        "interior_point": [0, 0],
    },
    "hyperbola": {
        "name": "hyperbola",
        "nvars": 2,
        "objective": "x1 + x2",
        "constraints": ["x1*x2 - 1", "x1", "x2", "10 - x1", "10 - x2"],
        "box": [[0.01, 10], [0.01, 10]],
        "interior_point": [2, 2],
    },
    "epsbox": {
        "name": "epsbox",
        "nvars": 2,
        "objective": "x1 - x2",
        "constraints": ["x1/(epsilon + x2^2)", "a - x1", "x2", "b - x2"],
        "box": [[0, 1], [0, 1]],
        "interior_point": [0.5, 0.5],
        "params": {"epsilon": 0.001, "a": 1, "b": 1},
    },
    "disk": {
        "name": "disk",
        "nvars": 2,
        "objective": "(x1 - 1)^2 + (x2 - 1)^2",
        "constraints": ["1 - x1^2 - x2^2"],
        "box": [[-1.5, 1.5], [-1.5, 1.5]],
        "interior_point": [0, 0],
    },
    "degenerate-disk": {
        "name": "degenerate-disk",
        "nvars": 2,
        "objective": "(x1 - 1)^2 + (x2 - 1)^2",
        "constraints": ["(1 - x1^2 - x2^2)^3"],
        "box": [[-1.5, 1.5], [-1.5, 1.5]],
        "interior_point": [0, 0],
    },
}

_PROVENANCE = {
    "cassini": (
        "region bounded by a Cassini oval (squared-distance product to (-1,0) and (1,0) "
        "capped at 4); the region is convex although its defining function is not concave; "
        "linear objective chosen for testing"
    ),
    "hyperbola": (
        "region above the hyperbola x1*x2 = 1 in the positive quadrant, compactified with "
        "explicit bound constraints x_i <= 10; all constraints log-concave"
    ),
    "epsbox": (
        "unit box with a ratio constraint x1/(eps + x2^2) >= 0; with a linear objective and "
        "small eps the log-barrier is indefinite at interior points"
    ),
    "disk": "unit disk with concave constraint; nearest-point objective; convex control case",
    "degenerate-disk": (
        "unit disk with the constraint cubed: same feasible set as disk, but the constraint "
        "gradient vanishes on the boundary (nondegeneracy failure control)"
    ),
}

# 1/sqrt(2) and 3 - 2*sqrt(2), frozen to their float64 values
_DISK_XSTAR = (0.7071067811865476, 0.7071067811865476)
_DISK_FSTAR = 0.1715728752538097

_KNOWN: dict[str, KnownOptimum | None] = {
    "cassini": None,
    "hyperbola": KnownOptimum(
        x=(1.0, 1.0),
        f=2.0,
        provenance="analytic: symmetric tangency of x1 + x2 = c with x1*x2 = 1",
    ),
    "epsbox": KnownOptimum(
        x=(0.0, 1.0),
        f=-1.0,
        provenance="analytic: x1 - x2 minimized at the corner x1 = 0, x2 = b",
    ),
    "disk": KnownOptimum(
        x=_DISK_XSTAR,
        f=_DISK_FSTAR,
        provenance="analytic: nearest point of the unit disk to (1,1), f = 3 - 2*sqrt(2)",
    ),
    "degenerate-disk": KnownOptimum(
        x=_DISK_XSTAR,
        f=_DISK_FSTAR,
        provenance="same feasible set and objective as disk",
    ),
}


def names() -> list[str]:
    return list(_RAW)


def builtin(name: str) -> CorpusEntry:
    """Look up a built-in problem by name."""
    if name not in _RAW:
        known = ", ".join(names())
        raise ProblemError(f"unknown builtin problem {name!r} (choose from: {known})")
    return CorpusEntry(
        problem=problem_from_dict(_RAW[name]),
        provenance=_PROVENANCE[name],
        known_optimum=_KNOWN[name],
    )


def entry_json(name: str) -> str:
    """Canonical problem-file text for a builtin; data/ files match this byte for byte."""
    if name not in _RAW:
        raise ProblemError(f"unknown builtin problem {name!r}")
    return json.dumps(_RAW[name], indent=2) + "\n"
