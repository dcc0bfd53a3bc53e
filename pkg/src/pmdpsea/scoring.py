"""Scoring waves over the parameter space and picking optimal schedulers.

All grid evaluations are exact rationals.  Extrema are found on a tensor
midpoint grid over the admissible region and then refined by repeatedly
subdividing the cell around the current best point; the result is a bound
certified on the evaluated points, not a global optimum.  Expectation and
variance use the midpoint rule on the base grid, weighted by the space's
density.  Dominance is checked exactly on every base grid point plus every
extremal point found during refinement, and ``classify`` reports each
wave's extrema over that same point set.
"""

from __future__ import annotations

import itertools
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .model import ParameterSpace, Pmdp, is_admissible
from .ratfunc import PoleError, RationalFunction, format_rational

TIE_TOL = 1e-9

Point = Tuple[Fraction, ...]


class EmptyGridError(ValueError):
    """No admissible grid point (or every grid point is a pole)."""


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 64
    depth: int = 3
    factor: int = 4
    pole_policy: str = "skip"
    max_points: int = 10**6
    max_refine_points: int = 4096

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError("resolution must be at least 1")
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if self.factor < 2:
            raise ValueError("refinement factor must be at least 2")
        if self.pole_policy not in ("skip", "abort"):
            raise ValueError("pole_policy must be 'skip' or 'abort'")
        if self.max_points < 1 or self.max_refine_points < 2:
            raise ValueError("point budgets must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def _kth_root_floor(n: int, k: int) -> int:
    r = max(1, int(round(n ** (1.0 / k))))
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return max(r, 1)


def axis_resolution(nparams: int, spec: GridSpec) -> int:
    if nparams == 0:
        return 1
    return min(spec.resolution, _kth_root_floor(spec.max_points, nparams))


def refine_factor(nparams: int, spec: GridSpec) -> int:
    if nparams == 0:
        return spec.factor
    return max(2, min(spec.factor, _kth_root_floor(spec.max_refine_points, nparams)))


@dataclass
class Grid:
    """Admissible midpoint grid with cell half-widths and density weights."""

    space: ParameterSpace
    spec: GridSpec
    points: List[Point]
    half: Tuple[Fraction, ...]
    weights: List[float]
    model: Optional[Pmdp] = None

    def admissible(self, point: Point) -> bool:
        return _admissible(self.space, self.model, point)

    def valuation(self, point: Point) -> Dict[str, Fraction]:
        return dict(zip(self.space.parameters, point))


def _admissible(space: ParameterSpace, model: Optional[Pmdp], point: Point) -> bool:
    v = dict(zip(space.parameters, point))
    if not space.satisfies_constraints(v):
        return False
    return model is None or is_admissible(model, v)


def midpoints(space: ParameterSpace, resolution: int) -> Tuple[List[Point], Tuple[Fraction, ...]]:
    """Tensor midpoint grid over the box (unfiltered) and the cell half-widths."""
    axes = []
    half = []
    for x in space.parameters:
        lo, hi = space.box[x]
        h = (hi - lo) / (2 * resolution)
        half.append(h)
        axes.append([lo + (2 * i + 1) * h for i in range(resolution)])
    return [tuple(p) for p in itertools.product(*axes)], tuple(half)


def build_grid(space: ParameterSpace, spec: GridSpec = GridSpec(), model: Optional[Pmdp] = None) -> Grid:
    res = axis_resolution(len(space.parameters), spec)
    pts, half = midpoints(space, res)
    pts = [p for p in pts if _admissible(space, model, p)]
    if not pts:
        raise EmptyGridError("no admissible grid point in the parameter space")
    weights = []
    for p in pts:
        w = space.density.evaluate_tuple(p)
        if w < 0:
            raise ValueError(f"density is negative at {p}")
        weights.append(float(w))
    if not math.fsum(weights) > 0:
        raise ValueError("density vanishes on the admissible grid")
    return Grid(space, spec, pts, half, weights, model)


def admissible_grid(space: ParameterSpace, spec: GridSpec = GridSpec(),
                    model: Optional[Pmdp] = None) -> List[Dict[str, Fraction]]:
    grid = build_grid(space, spec, model)
    return [grid.valuation(p) for p in grid.points]


# -- per-wave statistics ----------------------------------------------------

def _value(f: RationalFunction, point: Point, policy: str) -> Optional[Fraction]:
    try:
        return f.evaluate_tuple(point)
    except PoleError:
        if policy == "abort":
            raise
        return None


def _subcells(grid: Grid, center: Point, half: Tuple[Fraction, ...], factor: int):
    new_half = tuple(h / factor for h in half)
    axes = [
        [c - h + (2 * i + 1) * nh for i in range(factor)]
        for c, h, nh in zip(center, half, new_half)
    ]
    pts = [tuple(p) for p in itertools.product(*axes)]
    return [p for p in pts if grid.admissible(p)], new_half


@dataclass(frozen=True)
class Extrema:
    min: Fraction
    argmin: Point
    max: Fraction
    argmax: Point


def _refine(f: RationalFunction, grid: Grid, start: Point, value: Fraction, sign: int) -> Tuple[Fraction, Point]:
    """Zoom towards a better point; ``sign`` is +1 for maxima, -1 for minima."""
    spec = grid.spec
    factor = refine_factor(len(grid.half), spec)
    best_v, best_p = value, start
    center, half = start, grid.half
    for _ in range(spec.depth):
        pts, half = _subcells(grid, center, half, factor)
        scored = [(v, p) for p in pts if (v := _value(f, p, spec.pole_policy)) is not None]
        if not scored:
            break
        v, p = scored[0]
        for cand in scored[1:]:
            if sign * cand[0] > sign * v:
                v, p = cand
        center = p
        if sign * v > sign * best_v:
            best_v, best_p = v, p
    return best_v, best_p


def _extrema_from_values(f: RationalFunction, grid: Grid, values: Sequence[Optional[Fraction]]) -> Extrema:
    pairs = [(v, p) for v, p in zip(values, grid.points) if v is not None]
    if not pairs:
        raise EmptyGridError(f"every grid point is a pole of {f}")
    lo = hi = pairs[0]
    for pair in pairs[1:]:
        if pair[0] < lo[0]:
            lo = pair
        if pair[0] > hi[0]:
            hi = pair
    vmax, pmax = _refine(f, grid, hi[1], hi[0], +1)
    vmin, pmin = _refine(f, grid, lo[1], lo[0], -1)
    return Extrema(vmin, pmin, vmax, pmax)


def _moments(values: Sequence[Optional[Fraction]], weights: Sequence[float]) -> Tuple[float, float]:
    pairs = [(float(v), w) for v, w in zip(values, weights) if v is not None]
    total = math.fsum(w for _, w in pairs)
    mean = math.fsum(v * w for v, w in pairs) / total
    var = math.fsum(w * (v - mean) ** 2 for v, w in pairs) / total
    return mean, var


@dataclass(frozen=True)
class WaveStats:
    min: float
    max: float
    argmin: Point
    argmax: Point
    range: float
    expectation: float
    variance: float
    exact_min: Fraction
    exact_max: Fraction

    def to_dict(self, parameters: Sequence[str]) -> dict:
        return {
            "min": self.min,
            "max": self.max,
            "range": self.range,
            "expectation": self.expectation,
            "variance": self.variance,
            "argmin": {x: format_rational(v) for x, v in zip(parameters, self.argmin)},
            "argmax": {x: format_rational(v) for x, v in zip(parameters, self.argmax)},
        }


def grid_values(f: RationalFunction, grid: Grid) -> List[Optional[Fraction]]:
    return [_value(f, p, grid.spec.pole_policy) for p in grid.points]


def wave_stats(f: RationalFunction, grid: Grid, values: Optional[Sequence] = None) -> WaveStats:
    if values is None:
        values = grid_values(f, grid)
    ext = _extrema_from_values(f, grid, values)
    mean, var = _moments(values, grid.weights)
    return WaveStats(
        min=float(ext.min), max=float(ext.max), argmin=ext.argmin, argmax=ext.argmax,
        range=float(ext.max - ext.min), expectation=mean, variance=var,
        exact_min=ext.min, exact_max=ext.max,
    )


def extrema(f: RationalFunction, space: ParameterSpace, spec: GridSpec = GridSpec(),
            model: Optional[Pmdp] = None) -> Extrema:
    grid = build_grid(space, spec, model)
    return _extrema_from_values(f, grid, grid_values(f, grid))


def expectation(f: RationalFunction, space: ParameterSpace, spec: GridSpec = GridSpec(),
                model: Optional[Pmdp] = None) -> float:
    grid = build_grid(space, spec, model)
    return _moments(grid_values(f, grid), grid.weights)[0]


def variance(f: RationalFunction, space: ParameterSpace, spec: GridSpec = GridSpec(),
             model: Optional[Pmdp] = None) -> float:
    grid = build_grid(space, spec, model)
    return _moments(grid_values(f, grid), grid.weights)[1]


# -- dominance and classification ---------------------------------------------

@dataclass(frozen=True)
class Dominance:
    """Outcome of a grid-certified dominance check.

    ``counterexamples`` maps each non-dominant wave id to a point where it is
    strictly beaten and the id of a wave beating it there.
    """

    wave: Optional[int]
    counterexamples: Dict[int, Tuple[Point, int]]
    points: int


def _dominance(ids: Sequence[int], table: Dict[int, List[Optional[Fraction]]], points: Sequence[Point]) -> Dominance:
    usable = [j for j in range(len(points)) if all(table[i][j] is not None for i in ids)]
    if not ids:
        return Dominance(None, {}, len(usable))
    counter: Dict[int, Tuple[Point, int]] = {}
    for j in usable:
        best = max(ids, key=lambda i: (table[i][j], -i))
        top = table[best][j]
        for i in ids:
            if i not in counter and table[i][j] < top:
                counter[i] = (points[j], best)
        if len(counter) == len(ids):
            break
    winners = [i for i in ids if i not in counter]
    return Dominance(winners[0] if winners else None, counter, len(usable))


def _certificate(grid: Grid, stats: Sequence[WaveStats]) -> List[Point]:
    pts = list(grid.points)
    seen = set(pts)
    for st in stats:
        for p in (st.argmax, st.argmin):
            if p not in seen:
                seen.add(p)
                pts.append(p)
    return pts


def find_dominant(functions: Sequence[RationalFunction], space: ParameterSpace, spec: GridSpec = GridSpec(),
                  model: Optional[Pmdp] = None) -> Dominance:
    """Wave that is pointwise maximal on the certificate grid, if any."""
    grid = build_grid(space, spec, model)
    stats = [wave_stats(f, grid) for f in functions]
    pts = _certificate(grid, stats)
    table = {i: [_value(f, p, spec.pole_policy) for p in pts] for i, f in enumerate(functions)}
    return _dominance(list(range(len(functions))), table, pts)


@dataclass
class ScoreReport:
    parameters: Tuple[str, ...]
    spec: GridSpec
    stats: List[WaveStats]
    dominant: Optional[int]
    dominance_counterexamples: Dict[int, Tuple[Point, int]]
    certificate_points: int
    optimistic: List[int]
    pessimistic: List[int]
    bound: List[int]
    expectation: List[int]
    stable: List[int]
    eps_bounded_value: float
    eps_bounded: List[int]
    eps_bounded_robust: Optional[int]
    eps_stable_value: float
    eps_stable: List[int]
    eps_stable_robust: Optional[int]

    def to_dict(self) -> dict:
        params = self.parameters
        val = lambda p: {x: format_rational(v) for x, v in zip(params, p)}  # noqa: E731
        return {
            "grid": {**self.spec.to_dict(), "certificate": f"grid-certified on {self.certificate_points} points"},
            "eps_bounded": self.eps_bounded_value,
            "eps_stable": self.eps_stable_value,
            "classes": {
                "dominant": self.dominant,
                "optimistic": self.optimistic,
                "pessimistic": self.pessimistic,
                "bound": self.bound,
                "eps_bounded": self.eps_bounded,
                "eps_bounded_robust": self.eps_bounded_robust,
                "expectation": self.expectation,
                "stable": self.stable,
                "eps_stable": self.eps_stable,
                "eps_stable_robust": self.eps_stable_robust,
            },
            "dominance_counterexamples": [
                {"wave": i, "valuation": val(p), "beaten_by": j}
                for i, (p, j) in sorted(self.dominance_counterexamples.items())
            ],
            "scores": [dict(id=i, **s.to_dict(params)) for i, s in enumerate(self.stats)],
        }


def _argbest(ids: Sequence[int], score, maximize: bool) -> List[int]:
    if not ids:
        return []
    vals = {i: score(i) for i in ids}
    best = max(vals.values()) if maximize else min(vals.values())
    if maximize:
        return [i for i in ids if vals[i] >= best - TIE_TOL]
    return [i for i in ids if vals[i] <= best + TIE_TOL]


_GRID: dict = {}


def _init_stats_worker(grid: Grid) -> None:
    _GRID["grid"] = grid


def _stats_worker(f: RationalFunction):
    grid = _GRID["grid"]
    values = grid_values(f, grid)
    return values, wave_stats(f, grid, values)


def compute_stats(functions: Sequence[RationalFunction], grid: Grid, jobs: int = 1):
    """Grid values and statistics for every function, in input order."""
    if jobs <= 1:
        out = []
        for f in functions:
            values = grid_values(f, grid)
            out.append((values, wave_stats(f, grid, values)))
        return out
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_stats_worker, initargs=(grid,)) as pool:
        return list(pool.map(_stats_worker, functions, chunksize=max(1, len(functions) // (4 * jobs))))


def _widen(st: WaveStats, values: Sequence[Optional[Fraction]], points: Sequence[Point]) -> WaveStats:
    # Extrema over the whole certificate, so that pointwise order on it carries
    # over to max and min (a dominant wave is then optimistic and pessimistic).
    lo, plo, hi, phi = st.exact_min, st.argmin, st.exact_max, st.argmax
    for v, p in zip(values, points):
        if v is None:
            continue
        if v < lo:
            lo, plo = v, p
        if v > hi:
            hi, phi = v, p
    if (lo, hi) == (st.exact_min, st.exact_max):
        return st
    return replace(st, min=float(lo), max=float(hi), argmin=plo, argmax=phi,
                   range=float(hi - lo), exact_min=lo, exact_max=hi)


def median_variance(stats: Sequence[WaveStats]) -> float:
    return statistics.median(s.variance for s in stats)


def median_range(stats: Sequence[WaveStats]) -> float:
    return statistics.median(s.range for s in stats)


def classify(functions: Sequence[RationalFunction], space: ParameterSpace, spec: GridSpec = GridSpec(),
             eps_bounded: Optional[float] = None, eps_stable: Optional[float] = None,
             model: Optional[Pmdp] = None, jobs: int = 1) -> ScoreReport:
    """Score every wave and fill all ten optimality classes.

    ``eps_bounded`` / ``eps_stable`` default to the median range / variance
    of the sea.
    """
    if not functions:
        raise ValueError("cannot classify an empty sea")
    grid = build_grid(space, spec, model)
    results = compute_stats(functions, grid, jobs)
    stats = [st for _, st in results]
    pts = _certificate(grid, stats)
    extra = pts[len(grid.points):]
    table = {}
    for i, (f, (values, _)) in enumerate(zip(functions, results)):
        table[i] = list(values) + [_value(f, p, spec.pole_policy) for p in extra]
    ids = list(range(len(functions)))
    stats = [_widen(st, table[i], pts) for i, st in enumerate(stats)]
    dom = _dominance(ids, table, pts)
    if eps_bounded is None:
        eps_bounded = median_range(stats)
    if eps_stable is None:
        eps_stable = median_variance(stats)
    if eps_bounded < 0 or eps_stable < 0:
        raise ValueError("epsilon values must be non-negative")
    bounded = [i for i in ids if stats[i].range <= eps_bounded]
    stable_set = [i for i in ids if stats[i].variance <= eps_stable]
    robust_b = _dominance(bounded, table, pts).wave if bounded else None
    robust_s = None
    if stable_set:
        robust_s = max(stable_set, key=lambda i: (stats[i].expectation, -i))
    report = ScoreReport(
        parameters=space.parameters,
        spec=spec,
        stats=stats,
        dominant=dom.wave,
        dominance_counterexamples=dom.counterexamples,
        certificate_points=dom.points,
        optimistic=_argbest(ids, lambda i: stats[i].max, True),
        pessimistic=_argbest(ids, lambda i: stats[i].min, True),
        bound=_argbest(ids, lambda i: stats[i].range, False),
        expectation=_argbest(ids, lambda i: stats[i].expectation, True),
        stable=_argbest(ids, lambda i: stats[i].variance, False),
        eps_bounded_value=float(eps_bounded),
        eps_bounded=bounded,
        eps_bounded_robust=robust_b,
        eps_stable_value=float(eps_stable),
        eps_stable=stable_set,
        eps_stable_robust=robust_s,
    )
    d = report.dominant
    if d is not None and not (d in report.optimistic and d in report.pessimistic and d in report.expectation):
        raise AssertionError(f"dominant wave {d} is not optimistic, pessimistic and expectation-optimal")
    return report
