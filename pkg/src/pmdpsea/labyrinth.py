"""n x n robot labyrinths as parametric MDPs.

Cells are ``(col, row)`` with rows increasing northwards.  A move in
direction ``M`` is enabled iff the intended cell exists (sinks count as
existing).  The robot reaches the intended cell, or slips to the cell on
the left or right of its current position, left meaning 90 degrees
counter-clockwise from ``M``.  When exactly one slip cell is off the grid:

* fixed failure: the surviving slip keeps its own probability and the
  intended cell absorbs the rest;
* fixed success: the intended cell keeps ``1 - l - r`` and the surviving
  slip cell receives ``l + r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Tuple

from .model import LinearConstraint, ParameterSpace, Pmdp, ReachabilityQuery, validate
from .ratfunc import RationalFunction

Cell = Tuple[int, int]

DIRECTIONS = {"N": (0, 1), "S": (0, -1), "E": (1, 0), "W": (-1, 0)}
ACTIONS = ("N", "S", "E", "W")
SCENARIOS = ("ff", "fs")
SCHEMES = ("k8", "k2", "k1")


def cell_id(cell: Cell) -> str:
    return f"({cell[0]},{cell[1]})"


def parse_cell(text: str) -> Cell:
    parts = text.strip().strip("()").split(",")
    if len(parts) != 2:
        raise ValueError(f"cell must look like 'col,row': {text!r}")
    return int(parts[0]), int(parts[1])


def _left(d: Cell) -> Cell:
    return (-d[1], d[0])


def _right(d: Cell) -> Cell:
    return (d[1], -d[0])


@dataclass(frozen=True)
class LabyrinthConfig:
    n: int
    scenario: str = "ff"
    scheme: str = "k2"
    sinks: FrozenSet[Cell] = field(default_factory=frozenset)
    source: Cell = (1, 1)
    target: Cell | None = None

    def __post_init__(self):
        object.__setattr__(self, "sinks", frozenset(tuple(c) for c in self.sinks))
        object.__setattr__(self, "source", tuple(self.source))
        if self.target is None:
            object.__setattr__(self, "target", (self.n, self.n))
        object.__setattr__(self, "target", tuple(self.target))
        if self.n < 2:
            raise ValueError("grid size must be at least 2")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        for c in (*self.sinks, self.source, self.target):
            if not self.inside(c):
                raise ValueError(f"cell {c} lies outside the {self.n}x{self.n} grid")
        for c in (self.source, self.target):
            if c in self.sinks:
                raise ValueError(f"cell {c} cannot be both a sink and the source/target")

    def inside(self, c: Cell) -> bool:
        return 1 <= c[0] <= self.n and 1 <= c[1] <= self.n

    def cells(self):
        return [(c, r) for c in range(1, self.n + 1) for r in range(1, self.n + 1)]


def parameter_names(scheme: str) -> Tuple[str, ...]:
    if scheme == "k8":
        return tuple(f"{side}_{a}" for a in ACTIONS for side in ("l", "r"))
    if scheme == "k2":
        return ("l", "r")
    return ("p",)


def _slip_parameters(scheme: str, action: str, params) -> Tuple[RationalFunction, RationalFunction]:
    var = lambda name: RationalFunction.variable(name, params)  # noqa: E731
    if scheme == "k8":
        return var(f"l_{action}"), var(f"r_{action}")
    if scheme == "k2":
        return var("l"), var("r")
    p = var("p")
    return p, p


def parameter_space(scheme: str) -> ParameterSpace:
    params = parameter_names(scheme)
    if scheme == "k1":
        return ParameterSpace(params, {"p": (0, Fraction(1, 2))})
    box = {x: (0, 1) for x in params}
    if scheme == "k2":
        return ParameterSpace(params, box, (LinearConstraint({"l": 1, "r": 1}, 1),))
    constraints = tuple(LinearConstraint({f"l_{a}": 1, f"r_{a}": 1}, 1) for a in ACTIONS)
    return ParameterSpace(params, box, constraints)


def move_row(cfg: LabyrinthConfig, cell: Cell, action: str, params):
    """Transition row for taking ``action`` in ``cell``, or None if disabled."""
    d = DIRECTIONS[action]
    ahead = (cell[0] + d[0], cell[1] + d[1])
    if not cfg.inside(ahead):
        return None
    lc = (cell[0] + _left(d)[0], cell[1] + _left(d)[1])
    rc = (cell[0] + _right(d)[0], cell[1] + _right(d)[1])
    l, r = _slip_parameters(cfg.scheme, action, params)
    has_l, has_r = cfg.inside(lc), cfg.inside(rc)
    if has_l and has_r:
        entries = [(ahead, 1 - l - r), (lc, l), (rc, r)]
    elif has_l or has_r:
        side, own = (lc, l) if has_l else (rc, r)
        if cfg.scenario == "ff":
            entries = [(ahead, 1 - own), (side, own)]
        else:
            entries = [(ahead, 1 - l - r), (side, l + r)]
    else:
        entries = [(ahead, RationalFunction.constant(1, params))]
    return tuple((cell_id(c), f) for c, f in entries if not f.is_zero())


def generate(cfg: LabyrinthConfig) -> Tuple[Pmdp, ParameterSpace, ReachabilityQuery]:
    space = parameter_space(cfg.scheme)
    params = space.parameters
    cells = cfg.cells()
    rows = {}
    for cell in cells:
        if cell in cfg.sinks:
            continue
        for a in ACTIONS:
            row = move_row(cfg, cell, a, params)
            if row is not None:
                rows[(cell_id(cell), a)] = row
    labels = {cell_id(c): "sink" for c in sorted(cfg.sinks)}
    model = Pmdp(tuple(cell_id(c) for c in cells), ACTIONS, rows, cell_id(cfg.source), labels, params)
    problems = validate(model)
    if problems:
        raise AssertionError("generated labyrinth is invalid: " + "; ".join(problems))
    return model, space, ReachabilityQuery(cell_id(cfg.source), cell_id(cfg.target))
