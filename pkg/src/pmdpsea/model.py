"""Parametric and concrete Markov chains / decision processes.

Transition rows are tuples of ``(successor, probability)`` pairs.  In the
parametric classes the probabilities are :class:`RationalFunction` values,
in the concrete ones they are exact ``Fraction`` values.  An action is
enabled in a state iff the model has a row for that (state, action) pair;
states without rows are sinks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .fileio import dump_json, write_atomic
from .ratfunc import (
    ExpressionError,
    PoleError,
    RationalFunction,
    format_expression,
    format_rational,
    parse_expression,
    parse_rational,
)


class ModelError(ValueError):
    """A model, scheduler, or model file is invalid."""


class SchedulerError(ModelError):
    pass


class InadmissibleError(ModelError):
    """A valuation does not turn the model into a proper MC/MDP."""


Row = Tuple[Tuple[str, object], ...]


def _freeze_rows(rows: Mapping) -> Dict:
    return {k: tuple((t, p) for t, p in row) for k, row in rows.items()}


@dataclass(frozen=True)
class _ActionModel:
    states: Tuple[str, ...]
    actions: Tuple[str, ...]
    transitions: Mapping[Tuple[str, str], Row]
    initial: str
    labels: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "actions", tuple(self.actions))
        s_index = {s: i for i, s in enumerate(self.states)}
        a_index = {a: i for i, a in enumerate(self.actions)}
        rows = _freeze_rows(self.transitions)
        order = sorted(rows, key=lambda k: (s_index.get(k[0], len(s_index)), a_index.get(k[1], len(a_index)), k))
        object.__setattr__(self, "transitions", {k: rows[k] for k in order})
        enabled: Dict[str, List[str]] = {}
        for s, a in order:
            enabled.setdefault(s, []).append(a)
        object.__setattr__(self, "_enabled", {s: tuple(v) for s, v in enabled.items()})

    def enabled_actions(self, state: str) -> Tuple[str, ...]:
        return self._enabled.get(state, ())

    def is_sink(self, state: str) -> bool:
        return state not in self._enabled

    def sinks(self) -> Tuple[str, ...]:
        return tuple(s for s in self.states if self.is_sink(s))

    def row(self, state: str, action: str) -> Row:
        return self.transitions[(state, action)]

    def _induced_rows(self, scheduler: "SimpleScheduler", absorbing: Iterable[str], one) -> Dict[str, Row]:
        absorbing = set(absorbing)
        rows = {}
        for s in self.states:
            if self.is_sink(s) or s in absorbing:
                rows[s] = ((s, one),)
                continue
            try:
                a = scheduler.choice[s]
            except KeyError:
                raise SchedulerError(f"scheduler makes no choice in non-sink state {s!r}") from None
            if (s, a) not in self.transitions:
                raise SchedulerError(f"scheduler picks disabled action {a!r} in state {s!r}")
            rows[s] = self.transitions[(s, a)]
        return rows


@dataclass(frozen=True)
class Pmdp(_ActionModel):
    parameters: Tuple[str, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "parameters", tuple(self.parameters))

    def induce(self, scheduler: "SimpleScheduler", absorbing: Iterable[str] = ()) -> "Pmc":
        one = RationalFunction.constant(1, self.parameters)
        rows = self._induced_rows(scheduler, absorbing, one)
        return Pmc(self.states, rows, self.initial, self.parameters, dict(self.labels))


@dataclass(frozen=True)
class Mdp(_ActionModel):
    def induce(self, scheduler: "SimpleScheduler", absorbing: Iterable[str] = ()) -> "Mc":
        rows = self._induced_rows(scheduler, absorbing, Fraction(1))
        return Mc(self.states, rows, self.initial, dict(self.labels))


@dataclass(frozen=True)
class _ChainModel:
    states: Tuple[str, ...]
    transitions: Mapping[str, Row]
    initial: str

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        index = {s: i for i, s in enumerate(self.states)}
        rows = _freeze_rows(self.transitions)
        order = sorted(rows, key=lambda s: (index.get(s, len(index)), s))
        object.__setattr__(self, "transitions", {s: rows[s] for s in order})

    def row(self, state: str) -> Row:
        return self.transitions.get(state, ())


@dataclass(frozen=True)
class Pmc(_ChainModel):
    parameters: Tuple[str, ...] = ()
    labels: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "parameters", tuple(self.parameters))


@dataclass(frozen=True)
class Mc(_ChainModel):
    labels: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class SimpleScheduler:
    """Deterministic memoryless choice of one enabled action per decision state."""

    choice: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "choice", dict(self.choice))

    def __hash__(self):
        return hash(frozenset(self.choice.items()))

    def __getitem__(self, state: str) -> str:
        return self.choice[state]


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeffs[x] * x) <= bound``."""

    coeffs: Mapping[str, Fraction]
    bound: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {k: Fraction(v) for k, v in self.coeffs.items()})
        object.__setattr__(self, "bound", Fraction(self.bound))

    def holds(self, valuation: Mapping[str, Fraction]) -> bool:
        return sum(c * valuation[x] for x, c in self.coeffs.items()) <= self.bound


@dataclass(frozen=True)
class ParameterSpace:
    """Box, linear constraints, and an (unnormalized) density over the parameters."""

    parameters: Tuple[str, ...]
    box: Mapping[str, Tuple[Fraction, Fraction]]
    constraints: Tuple[LinearConstraint, ...] = ()
    density: Optional[RationalFunction] = None

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(self.parameters))
        box = {k: (Fraction(lo), Fraction(hi)) for k, (lo, hi) in self.box.items()}
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.density is None:
            object.__setattr__(self, "density", RationalFunction.constant(1, self.parameters))
        if set(box) != set(self.parameters):
            raise ModelError(f"box must bound exactly the parameters {self.parameters}")
        for name, (lo, hi) in box.items():
            if lo > hi:
                raise ModelError(f"empty interval for {name}: [{lo}, {hi}]")
        for c in self.constraints:
            unknown = set(c.coeffs) - set(self.parameters)
            if unknown:
                raise ModelError(f"constraint mentions unknown parameter(s) {sorted(unknown)}")
        if self.density.parameters != self.parameters:
            raise ModelError("density uses a different parameter list")

    def satisfies_constraints(self, valuation: Mapping[str, Fraction]) -> bool:
        return all(c.holds(valuation) for c in self.constraints)

    def in_box(self, valuation: Mapping[str, Fraction]) -> bool:
        return all(lo <= valuation[x] <= hi for x, (lo, hi) in self.box.items())


@dataclass(frozen=True)
class ReachabilityQuery:
    source: str
    target: str


# -- operations ------------------------------------------------------------

def validate(m: Pmdp) -> List[str]:
    """Return diagnostics; an empty list means the model is well formed."""
    out = []
    states = set(m.states)
    if len(states) != len(m.states):
        out.append("duplicate state ids")
    if m.initial not in states:
        out.append(f"initial state {m.initial!r} is not a state")
    for s in m.labels:
        if s not in states:
            out.append(f"label for unknown state {s!r}")
    one = RationalFunction.constant(1, m.parameters)
    for (s, a), row in m.transitions.items():
        where = f"row ({s}, {a})"
        if s not in states:
            out.append(f"{where}: unknown source state")
        if a not in m.actions:
            out.append(f"{where}: unknown action")
        succ = [t for t, _ in row]
        if len(set(succ)) != len(succ):
            out.append(f"{where}: repeated successor")
        for t in succ:
            if t not in states:
                out.append(f"{where}: unknown successor {t!r}")
        if any(f.parameters != m.parameters for _, f in row):
            out.append(f"{where}: entry over a different parameter list")
            continue
        total = sum((f for _, f in row), RationalFunction.constant(0, m.parameters))
        if total != one:
            out.append(f"{where}: row sum = {format_expression(total)} ≠ 1")
    return out


def validate_pmc(m: Pmc) -> List[str]:
    out = []
    states = set(m.states)
    one = RationalFunction.constant(1, m.parameters)
    for s, row in m.transitions.items():
        if s not in states:
            out.append(f"row {s}: unknown state")
        succ = [t for t, _ in row]
        if len(set(succ)) != len(succ):
            out.append(f"row {s}: repeated successor")
        if not row:
            continue
        total = sum((f for _, f in row), RationalFunction.constant(0, m.parameters))
        if total != one:
            out.append(f"row {s}: row sum = {format_expression(total)} ≠ 1")
    return out


def induce_pmc(m: Pmdp, scheduler: SimpleScheduler, absorbing: Iterable[str] = ()) -> Pmc:
    """Scheduler-induced PMC; sinks and ``absorbing`` states get a probability-1 self-loop."""
    return m.induce(scheduler, absorbing)


def _instantiate_row(where: str, row: Row, valuation: Mapping[str, Fraction]) -> Row:
    out = []
    total = Fraction(0)
    for t, f in row:
        try:
            p = f(valuation)
        except PoleError:
            raise InadmissibleError(f"{where}: entry to {t} has a pole at this valuation") from None
        if not 0 <= p <= 1:
            raise InadmissibleError(f"{where}: entry to {t} = {format_expression(f)} evaluates to {p}, outside [0, 1]")
        total += p
        if p:
            out.append((t, p))
    if row and total != 1:
        raise InadmissibleError(f"{where}: row sums to {total}, not 1")
    return tuple(out)


def _full_valuation(parameters: Sequence[str], valuation: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    missing = [x for x in parameters if x not in valuation]
    if missing:
        raise InadmissibleError(f"valuation does not assign {missing}")
    return {x: Fraction(valuation[x]) for x in parameters}


def instantiate(m, valuation: Mapping[str, Fraction]):
    """Evaluate every entry of a :class:`Pmdp` or :class:`Pmc` at ``valuation``.

    Entries that evaluate to zero are dropped from the concrete rows.
    """
    v = _full_valuation(m.parameters, valuation)
    if isinstance(m, Pmdp):
        rows = {(s, a): _instantiate_row(f"row ({s}, {a})", row, v) for (s, a), row in m.transitions.items()}
        return Mdp(m.states, m.actions, rows, m.initial, dict(m.labels))
    if isinstance(m, Pmc):
        rows = {s: _instantiate_row(f"row {s}", row, v) for s, row in m.transitions.items()}
        return Mc(m.states, rows, m.initial, dict(m.labels))
    raise TypeError(f"cannot instantiate {type(m).__name__}")


def is_admissible(m, valuation: Mapping[str, Fraction]) -> bool:
    try:
        instantiate(m, valuation)
    except InadmissibleError:
        return False
    return True


# -- JSON format -----------------------------------------------------------

def _rational_field(value, what: str) -> Fraction:
    if isinstance(value, (bool, float)) or not isinstance(value, (str, int)):
        raise ModelError(f"{what}: expected an exact rational string, got {value!r}")
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise ModelError(f"{what}: {exc}") from None


def _require(doc: Mapping, key: str, where: str = "model"):
    if key not in doc:
        raise ModelError(f"{where}: missing required field {key!r}")
    return doc[key]


def space_from_dict(doc: Mapping) -> ParameterSpace:
    params = _require(doc, "parameters")
    if not isinstance(params, list):
        raise ModelError("parameters must be a list")
    names = []
    box = {}
    for i, p in enumerate(params):
        name = _require(p, "name", f"parameters[{i}]")
        if not isinstance(name, str) or not name.isidentifier():
            raise ModelError(f"parameters[{i}]: invalid name {name!r}")
        if name in box:
            raise ModelError(f"duplicate parameter {name!r}")
        names.append(name)
        box[name] = (
            _rational_field(_require(p, "lo", f"parameter {name}"), f"parameter {name}.lo"),
            _rational_field(_require(p, "hi", f"parameter {name}"), f"parameter {name}.hi"),
        )
    constraints = []
    for i, c in enumerate(doc.get("constraints", []) or []):
        coeffs = _require(c, "coeffs", f"constraints[{i}]")
        for x in coeffs:
            if x not in box:
                raise ModelError(f"constraints[{i}]: unknown parameter {x!r}")
        constraints.append(LinearConstraint(
            {x: _rational_field(v, f"constraints[{i}].{x}") for x, v in coeffs.items()},
            _rational_field(_require(c, "bound", f"constraints[{i}]"), f"constraints[{i}].bound"),
        ))
    try:
        density = parse_expression(doc.get("density", "1"), names)
    except ExpressionError as exc:
        raise ModelError(f"density: {exc}") from None
    return ParameterSpace(tuple(names), box, tuple(constraints), density)


def space_to_dict(space: ParameterSpace) -> dict:
    doc = {
        "parameters": [
            {"name": x, "lo": format_rational(space.box[x][0]), "hi": format_rational(space.box[x][1])}
            for x in space.parameters
        ],
        "constraints": [
            {"coeffs": {x: format_rational(v) for x, v in c.coeffs.items()}, "bound": format_rational(c.bound)}
            for c in space.constraints
        ],
        "density": format_expression(space.density),
    }
    return doc


def model_from_dict(doc: Mapping) -> Tuple[Pmdp, ParameterSpace, ReachabilityQuery]:
    """Build and validate a model from its JSON document; raises :class:`ModelError`."""
    if not isinstance(doc, Mapping):
        raise ModelError("model document must be a JSON object")
    space = space_from_dict(doc)
    states = _require(doc, "states")
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise ModelError("states must be a list of strings")
    initial = _require(doc, "initial")
    transitions = _require(doc, "transitions")
    query_doc = _require(doc, "query")
    actions = list(doc.get("actions", []))
    rows = {}
    for i, tr in enumerate(transitions):
        where = f"transitions[{i}]"
        s = _require(tr, "from", where)
        a = _require(tr, "action", where)
        if (s, a) in rows:
            raise ModelError(f"{where}: duplicate row ({s}, {a})")
        if a not in actions:
            actions.append(a)
        row = []
        for j, entry in enumerate(_require(tr, "to", where)):
            text = _require(entry, "prob", f"{where}.to[{j}]")
            try:
                f = parse_expression(text, space.parameters)
            except ExpressionError as exc:
                raise ModelError(f"{where}.to[{j}]: {exc}") from None
            row.append((_require(entry, "state", f"{where}.to[{j}]"), f))
        rows[(s, a)] = row
    model = Pmdp(tuple(states), tuple(actions), rows, initial, dict(doc.get("labels", {})), space.parameters)
    query = ReachabilityQuery(_require(query_doc, "source", "query"), _require(query_doc, "target", "query"))
    problems = validate(model)
    for q in (query.source, query.target):
        if q not in model.states:
            problems.append(f"query state {q!r} is not a state")
    if problems:
        raise ModelError("invalid model:\n  " + "\n  ".join(problems))
    return model, space, query


def model_to_dict(model: Pmdp, space: ParameterSpace, query: ReachabilityQuery) -> dict:
    doc = space_to_dict(space)
    doc["states"] = list(model.states)
    doc["actions"] = list(model.actions)
    doc["initial"] = model.initial
    if model.labels:
        doc["labels"] = dict(model.labels)
    doc["transitions"] = [
        {"from": s, "action": a, "to": [{"state": t, "prob": format_expression(f)} for t, f in row]}
        for (s, a), row in model.transitions.items()
    ]
    doc["query"] = {"source": query.source, "target": query.target}
    return doc


def load_model(path) -> Tuple[Pmdp, ParameterSpace, ReachabilityQuery]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON: {exc}") from None
    return model_from_dict(doc)


def save_model(path, model: Pmdp, space: ParameterSpace, query: ReachabilityQuery) -> None:
    write_atomic(path, dump_json(model_to_dict(model, space, query)))
