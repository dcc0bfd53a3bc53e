"""Enumerate simple schedulers and collect their waves into a sea.

The query target is treated as absorbing, so only non-sink states other
than the target are decision states.  Wave computation is a pure map over
the scheduler stream; results are merged in enumeration order, so the sea
is identical for any number of worker processes.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from .fileio import dump_json, write_atomic
from .model import (
    ModelError,
    ParameterSpace,
    Pmdp,
    ReachabilityQuery,
    SimpleScheduler,
    induce_pmc,
    space_from_dict,
    space_to_dict,
)
from .ratfunc import ExpressionError, RationalFunction, format_expression, parse_expression
from .reach import reachability_function


@dataclass(frozen=True)
class Wave:
    function: RationalFunction
    schedulers: Tuple[SimpleScheduler, ...]
    stats: Optional[dict] = None


@dataclass(frozen=True)
class Sea:
    waves: Tuple[Wave, ...]
    query: ReachabilityQuery
    space: ParameterSpace

    @property
    def functions(self) -> List[RationalFunction]:
        return [w.function for w in self.waves]

    @property
    def scheduler_count(self) -> int:
        return sum(len(w.schedulers) for w in self.waves)


def decision_states(m: Pmdp, query: ReachabilityQuery) -> List[str]:
    return [s for s in m.states if not m.is_sink(s) and s != query.target]


def scheduler_count(m: Pmdp, query: ReachabilityQuery) -> int:
    return math.prod(len(m.enabled_actions(s)) for s in decision_states(m, query))


def enumerate_schedulers(m: Pmdp, query: ReachabilityQuery) -> Iterator[SimpleScheduler]:
    """All simple schedulers, lexicographic in (state order, action order)."""
    states = decision_states(m, query)
    choices = [m.enabled_actions(s) for s in states]
    for combo in itertools.product(*choices):
        yield SimpleScheduler(dict(zip(states, combo)))


def wave_of(m: Pmdp, query: ReachabilityQuery, scheduler: SimpleScheduler) -> RationalFunction:
    pmc = induce_pmc(m, scheduler, absorbing=(query.target,))
    return reachability_function(pmc, query.source, query.target)


_WORKER_STATE: dict = {}


def _init_worker(m: Pmdp, query: ReachabilityQuery) -> None:
    _WORKER_STATE["model"] = m
    _WORKER_STATE["query"] = query


def _worker_wave(scheduler: SimpleScheduler) -> RationalFunction:
    return wave_of(_WORKER_STATE["model"], _WORKER_STATE["query"], scheduler)


def _batched(it, size):
    it = iter(it)
    while True:
        batch = list(itertools.islice(it, size))
        if not batch:
            return
        yield batch


def compute_sea(m: Pmdp, query: ReachabilityQuery, space: ParameterSpace, jobs: int = 1,
                batch_size: int = 2048) -> Sea:
    """Compute every scheduler's wave and group schedulers by canonical function."""
    groups: Dict[RationalFunction, List[SimpleScheduler]] = {}
    stream = enumerate_schedulers(m, query)
    if jobs <= 1:
        for xi in stream:
            groups.setdefault(wave_of(m, query, xi), []).append(xi)
    else:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(m, query)) as pool:
            chunk = max(1, batch_size // (4 * jobs))
            for batch in _batched(stream, batch_size):
                for xi, f in zip(batch, pool.map(_worker_wave, batch, chunksize=chunk)):
                    groups.setdefault(f, []).append(xi)
    waves = [Wave(f, tuple(xis)) for f, xis in groups.items()]
    waves.sort(key=lambda w: format_expression(w.function))
    return Sea(tuple(waves), query, space)


# -- serialization ---------------------------------------------------------

def sea_to_dict(sea: Sea) -> dict:
    waves = []
    for i, w in enumerate(sea.waves):
        entry = {
            "id": i,
            "function": format_expression(w.function),
            "schedulers": [dict(xi.choice) for xi in w.schedulers],
        }
        if w.stats is not None:
            entry["stats"] = w.stats
        waves.append(entry)
    return {
        "query": {"source": sea.query.source, "target": sea.query.target},
        **space_to_dict(sea.space),
        "waves": waves,
    }


def sea_from_dict(doc) -> Sea:
    space = space_from_dict(doc)
    q = doc.get("query")
    if not q or "source" not in q or "target" not in q:
        raise ModelError("sea: missing query")
    waves = []
    for i, entry in enumerate(doc.get("waves", [])):
        try:
            f = parse_expression(entry["function"], space.parameters)
        except (KeyError, ExpressionError) as exc:
            raise ModelError(f"waves[{i}]: {exc}") from None
        waves.append(Wave(f, tuple(SimpleScheduler(c) for c in entry.get("schedulers", [])), entry.get("stats")))
    return Sea(tuple(waves), ReachabilityQuery(q["source"], q["target"]), space)


def save_sea(path, sea: Sea) -> None:
    write_atomic(path, dump_json(sea_to_dict(sea)))


def load_sea(path) -> Sea:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON: {exc}") from None
    return sea_from_dict(doc)
