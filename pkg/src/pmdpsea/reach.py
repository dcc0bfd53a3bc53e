"""Reachability probabilities of parametric Markov chains.

The symbolic route removes states that cannot reach the target, then
eliminates the remaining intermediate states one by one.  Eliminating ``s``
reroutes every path ``x -> s -> y`` into a direct edge::

    edge(x, y) += edge(x, s) * edge(s, y) / (1 - edge(s, s))

so that, after all intermediate states are gone, the source's edge into the
target (divided by one minus any source self-loop) is the reachability
probability.  ``value_iteration_oracle`` computes the same quantity
numerically on a concrete chain and is kept deliberately independent of
the symbolic code.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, Optional, Sequence, Set

from .model import Mc, Pmc
from .ratfunc import RationalFunction


class EliminationError(ArithmeticError):
    pass


def prob_zero_states(pmc: Pmc, target: str) -> frozenset:
    """States with no path to ``target`` along edges that are not identically zero."""
    preds: Dict[str, Set[str]] = {s: set() for s in pmc.states}
    for s, row in pmc.transitions.items():
        for t, f in row:
            if not f.is_zero():
                preds.setdefault(t, set()).add(s)
    seen = {target}
    queue = deque([target])
    while queue:
        t = queue.popleft()
        for s in preds.get(t, ()):
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return frozenset(s for s in pmc.states if s not in seen)


class EliminationWorkspace:
    """Mutable edge graph used during elimination.

    ``out[x][y]`` holds the edge function from ``x`` to ``y``; ``inc[y]`` is the
    set of predecessors of ``y``.  The target has no outgoing edges.
    """

    def __init__(self, pmc: Pmc, source: str, target: str):
        self.source = source
        self.target = target
        self.parameters = pmc.parameters
        self.index = {s: i for i, s in enumerate(pmc.states)}
        dead = prob_zero_states(pmc, target)
        # keep states reachable from source that can still reach target
        live = set()
        queue = deque([source])
        if source not in dead:
            live.add(source)
        while queue:
            s = queue.popleft()
            if s == target:
                continue
            for t, f in pmc.row(s):
                if t not in live and t not in dead and not f.is_zero():
                    live.add(t)
                    queue.append(t)
        self.live = live
        self.out: Dict[str, Dict[str, RationalFunction]] = {s: {} for s in live}
        self.inc: Dict[str, Set[str]] = {s: set() for s in live}
        for s in live:
            if s == target:
                continue
            for t, f in pmc.row(s):
                if t in live and not f.is_zero():
                    self.out[s][t] = f
                    self.inc[t].add(s)

    def candidates(self) -> list:
        return [s for s in self.live if s != self.source and s != self.target]

    def cost(self, s: str) -> tuple:
        indeg = len(self.inc[s] - {s})
        outdeg = len(self.out[s]) - (s in self.out[s])
        return (indeg * outdeg, self.index[s])

    def result(self) -> RationalFunction:
        zero = RationalFunction.constant(0, self.parameters)
        if self.source not in self.live:
            return zero
        edges = self.out[self.source]
        to_target = edges.get(self.target, zero)
        loop = edges.get(self.source)
        if loop is None or to_target.is_zero():
            return to_target
        if loop.is_one():
            raise EliminationError(f"source {self.source!r} has a self-loop of probability 1")
        return to_target / (1 - loop)


def eliminate_state(w: EliminationWorkspace, s: str) -> EliminationWorkspace:
    """Remove ``s`` from ``w`` (in place) preserving source-to-target reachability."""
    if s == w.source or s == w.target:
        raise EliminationError(f"cannot eliminate the source or target ({s!r})")
    if s not in w.live:
        raise EliminationError(f"{s!r} is not a live state")
    out_s = w.out.pop(s)
    inc_s = w.inc.pop(s)
    w.live.discard(s)
    loop = out_s.pop(s, None)
    inc_s.discard(s)
    if loop is not None:
        if loop.is_one():
            raise EliminationError(f"state {s!r} has a self-loop of probability 1")
        factor = 1 / (1 - loop)
        out_s = {y: f * factor for y, f in out_s.items()}
    for y in out_s:
        w.inc[y].discard(s)
    for x in sorted(inc_s, key=w.index.__getitem__):
        ex = w.out[x].pop(s)
        row = w.out[x]
        for y, fy in out_s.items():
            add = ex * fy
            if y in row:
                total = row[y] + add
                if total.is_zero():
                    del row[y]
                    w.inc[y].discard(x)
                else:
                    row[y] = total
            else:
                row[y] = add
                w.inc[y].add(x)
    return w


def reachability_function(
    pmc: Pmc, source: str, target: str, order: Optional[Sequence[str]] = None
) -> RationalFunction:
    """Probability of eventually reaching ``target`` from ``source``, as a rational function.

    ``order`` optionally fixes the elimination order; states it omits are
    eliminated afterwards by the fill-in heuristic (smallest in-degree times
    out-degree, ties broken by state order).
    """
    if source == target:
        return RationalFunction.constant(1, pmc.parameters)
    w = EliminationWorkspace(pmc, source, target)
    if source not in w.live:
        return RationalFunction.constant(0, pmc.parameters)
    for s in order or ():
        if s in w.live and s not in (source, target):
            eliminate_state(w, s)
    while True:
        cands = w.candidates()
        if not cands:
            break
        eliminate_state(w, min(cands, key=w.cost))
    return w.result()


def value_iteration_oracle(mc: Mc, source: str, target: str, tol: float = 1e-13,
                           max_sweeps: int = 10_000_000) -> float:
    """Numerically iterate x(s) <- sum P(s, s') x(s') with x(target) = 1.

    States that cannot reach the target are pinned to 0 first; the sweep
    stops once the largest update falls below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rows = {s: [(t, float(p)) for t, p in mc.row(s) if p > 0] for s in mc.states}
    # backward search over positive edges
    back: Dict[str, list] = {s: [] for s in mc.states}
    for s, row in rows.items():
        for t, _ in row:
            back[t].append(s)
    can = {target}
    stack = [target]
    while stack:
        t = stack.pop()
        for s in back[t]:
            if s not in can:
                can.add(s)
                stack.append(s)
    if source not in can:
        return 0.0
    x = {s: 0.0 for s in mc.states}
    x[target] = 1.0
    free = [s for s in mc.states if s in can and s != target]
    for _ in range(max_sweeps):
        delta = 0.0
        for s in free:
            new = 0.0
            for t, p in rows[s]:
                new += p * x[t]
            d = abs(new - x[s])
            if d > delta:
                delta = d
            x[s] = new
        if delta < tol:
            break
    return x[source]
