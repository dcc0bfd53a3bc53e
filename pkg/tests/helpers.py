"""Shared fixtures: shipped model files, random labyrinths and valuations."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from pmdpsea.labyrinth import LabyrinthConfig, generate
from pmdpsea.model import Pmc, instantiate, is_admissible, load_model
from pmdpsea.ratfunc import RationalFunction, parse_expression

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"
SHIPPED = sorted(MODELS.glob("*.json"))


def discussion():
    return load_model(MODELS / "discussion.json")


def chi_induced_pmc() -> Pmc:
    """The discussion model under the scheduler that picks ``a`` at ``c`` iff ``a`` was visited."""
    params = ("p",)
    f = lambda text: parse_expression(text, params)  # noqa: E731
    one = RationalFunction.constant(1, params)
    rows = {
        "s": (("a", f("p")), ("b", f("1-p"))),
        "a": (("ca", one),),
        "b": (("cb", one),),
        "ca": (("t", f("p")), ("x", f("1-p"))),
        "cb": (("t", f("1-p")), ("x", f("p"))),
        "t": (("t", one),),
        "x": (("x", one),),
    }
    return Pmc(("s", "a", "b", "ca", "cb", "t", "x"), rows, "s", params)


def labyrinth(n, scenario="ff", scheme="k2", sinks=((1, 2),), source=(1, 1), target=None):
    return generate(LabyrinthConfig(n, scenario, scheme, frozenset(sinks), source, target))


def random_config(rng: random.Random, max_n: int = 3, schemes=("k8", "k2", "k1")) -> LabyrinthConfig:
    n = rng.randint(2, max_n)
    cells = [(c, r) for c in range(1, n + 1) for r in range(1, n + 1)]
    source, target = rng.sample(cells, 2)
    rest = [c for c in cells if c not in (source, target)]
    sinks = frozenset(rng.sample(rest, rng.randint(0, min(2, len(rest)))))
    scheme = rng.choice(schemes) if n == 2 else rng.choice([s for s in schemes if s != "k8"] or ["k2"])
    return LabyrinthConfig(n, rng.choice(["ff", "fs"]), scheme, sinks, source, target)


def random_interior_valuation(rng: random.Random, space, model=None, denominator: int = 997):
    """Random rational point strictly inside the box, satisfying every constraint strictly."""
    for _ in range(10_000):
        v = {}
        for x in space.parameters:
            lo, hi = space.box[x]
            v[x] = lo + (hi - lo) * Fraction(rng.randint(1, denominator - 1), denominator)
        if not all(c.holds(v) and sum(c.coeffs.get(x, 0) * v[x] for x in v) < c.bound for c in space.constraints):
            continue
        if model is not None and not is_admissible(model, v):
            continue
        return v
    raise RuntimeError("could not sample an interior admissible valuation")


def concrete_mc(model, scheduler, valuation, absorbing):
    """Instantiate first, then induce: independent of the symbolic route."""
    return instantiate(model, valuation).induce(scheduler, absorbing)
