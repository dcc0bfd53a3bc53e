"""Scheduler and distinct-function counts for a batch of labyrinth instances,
next to published reference counts.

    python3 scripts/labyrinth_counts.py [--jobs N] [--skip-functions]

The reference column lists the published numbers row by row.  For the 2x2
fs row and the 3x3 ff rows they line up with our counts one row further
down (see ``shifted``).

The 4x4 instance is only counted (4.5 million schedulers is past desk scale).
"""

from __future__ import annotations

import argparse
import time

from pmdpsea.labyrinth import LabyrinthConfig, generate
from pmdpsea.schedulers import compute_sea, scheduler_count

# (k, n, scenario, target, sinks, reference schedulers, reference functions)
ROWS = [
    ("k8", 2, "ff", (2, 2), [(1, 2)], 4, 4),
    ("k8", 2, "fs", (2, 2), [(1, 2)], 4, 4),
    ("k2", 2, "ff", (2, 2), [(1, 2)], 4, 4),
    ("k2", 2, "fs", (2, 2), [(1, 2)], 216, 63),
    ("k2", 3, "ff", (1, 3), [(1, 2), (2, 2)], 432, 120),
    ("k2", 3, "ff", (2, 2), [(1, 2)], 864, 398),
    ("k2", 3, "ff", (3, 3), [(1, 2)], 648, 246),
    ("k2", 3, "ff", (3, 3), [(2, 2)], 4, 4),
    ("k2", 3, "fs", (1, 3), [(1, 2), (2, 2)], 216, 63),
    ("k2", 3, "fs", (2, 2), [(1, 2)], 432, 120),
    ("k2", 3, "fs", (3, 3), [(1, 2)], 864, 399),
    ("k2", 3, "fs", (3, 3), [(2, 2)], 648, 234),
    ("k1", 2, "ff", (2, 2), [(1, 2)], 4, 4),
    ("k1", 2, "fs", (2, 2), [(1, 2)], 216, 60),
    ("k1", 3, "ff", (1, 3), [(1, 2), (2, 2)], 432, 114),
    ("k1", 3, "ff", (2, 2), [(1, 2)], 864, 390),
    ("k1", 3, "ff", (3, 3), [(1, 2)], 648, 122),
    ("k1", 3, "ff", (3, 3), [(2, 2)], 4, 4),
    ("k1", 3, "fs", (1, 3), [(1, 2), (2, 2)], 216, 63),
    ("k1", 3, "fs", (2, 2), [(1, 2)], 432, 114),
    ("k1", 3, "fs", (3, 3), [(1, 2)], 864, 391),
    ("k1", 3, "fs", (3, 3), [(2, 2)], 648, 124),
    ("k1", 4, "fs", (4, 4), [(1, 2)], 4478976, 2010270),
]


def count_row(k, n, scenario, target, sinks, with_functions=True, jobs=1):
    cfg = LabyrinthConfig(n, scenario, k, frozenset(sinks), (1, 1), target)
    model, space, query = generate(cfg)
    count = scheduler_count(model, query)
    if not with_functions or count > 100_000:
        return count, None
    return count, len(compute_sea(model, query, space, jobs=jobs).waves)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--skip-functions", action="store_true")
    args = ap.parse_args()
    print(f"{'k':<3} {'n':>2} {'type':<4} {'target':<7} {'sinks':<14} {'ours':>16} {'reference':>18} "
          f"{'match':>8} {'s':>6}")
    for i, (k, n, sc, target, sinks, ps, pf) in enumerate(ROWS):
        t0 = time.perf_counter()
        s, f = count_row(k, n, sc, target, sinks, not args.skip_functions, args.jobs)
        ours = f"{s} & {'-' if f is None else f}"
        sink_text = ",".join(f"({c},{r})" for c, r in sinks)
        if (s, f) == (ps, pf) or (f is None and s == ps):
            match = "yes"
        elif i > 0 and (s, f) == ROWS[i - 1][5:]:
            match = "shifted"
        else:
            match = "no"
        print(f"{k:<3} {n:>2} {sc:<4} {str(target).replace(' ', ''):<7} {sink_text:<14} {ours:>16} "
              f"{f'{ps} & {pf}':>18} {match:>8} {time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
