"""Optimality classes of the 2x2 labyrinth (sink (1,2), target (2,2)) for
both boundary scenarios and every slip scheme.

    python3 scripts/labyrinth_2x2_classes.py [--depth 16]
"""

import argparse

from pmdpsea.labyrinth import LabyrinthConfig, generate
from pmdpsea.ratfunc import format_expression
from pmdpsea.schedulers import compute_sea
from pmdpsea.scoring import GridSpec, classify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=16)
    ap.add_argument("--resolution", type=int, default=64)
    args = ap.parse_args()
    for scheme in ("k2", "k1", "k8"):
        for scenario in ("ff", "fs"):
            model, space, query = generate(LabyrinthConfig(2, scenario, scheme, {(1, 2)}))
            sea = compute_sea(model, query, space)
            report = classify(sea.functions, space, GridSpec(resolution=args.resolution, depth=args.depth))
            print(f"== {scheme} {scenario}: {sea.scheduler_count} schedulers, {len(sea.waves)} waves")
            for i, w in enumerate(sea.waves):
                moves = ", ".join(f"{s}:{a}" for s, a in sorted(w.schedulers[0].choice.items()))
                print(f"  [{i}] {moves:<20} {format_expression(w.function)}")
            for cls, ids in report.to_dict()["classes"].items():
                print(f"  {cls:>20}: {ids}")
            print()


if __name__ == "__main__":
    main()
