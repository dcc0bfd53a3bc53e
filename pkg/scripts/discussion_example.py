"""A history-dependent scheduler that beats both simple ones.

Builds the two simple waves of models/discussion.json, adds the wave of the
scheduler that picks ``a`` at ``c`` iff ``a`` was visited, and scores all
three.  With ``--csv`` the three curves are written for plotting.

    python3 scripts/discussion_example.py [--csv curves.csv] [--resolution 101]
"""

import argparse
import csv
from fractions import Fraction
from pathlib import Path

from pmdpsea.model import Pmc, load_model
from pmdpsea.ratfunc import RationalFunction, format_expression, parse_expression
from pmdpsea.reach import reachability_function
from pmdpsea.schedulers import compute_sea
from pmdpsea.scoring import GridSpec, classify

MODEL = Path(__file__).resolve().parent.parent / "models" / "discussion.json"


def chi_chain() -> Pmc:
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
    return Pmc(tuple(rows), rows, "s", params)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv")
    ap.add_argument("--resolution", type=int, default=101)
    args = ap.parse_args()

    model, space, query = load_model(MODEL)
    sea = compute_sea(model, query, space)
    names = []
    for w in sea.waves:
        (xi,) = w.schedulers
        names.append(f"c->{xi['c']}")
    functions = [*sea.functions, reachability_function(chi_chain(), "s", "t")]
    names.append("history")
    for name, f in zip(names, functions):
        print(f"{name:>8}: {format_expression(f)}")

    report = classify(functions, space, GridSpec(depth=16))
    doc = report.to_dict()
    print()
    for cls, ids in doc["classes"].items():
        if ids is None or ids == []:
            shown = "none"
        else:
            shown = ", ".join(names[i] for i in (ids if isinstance(ids, list) else [ids]))
        print(f"{cls:>20}: {shown}")

    if args.csv:
        n = args.resolution
        with open(args.csv, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["p", *names])
            for i in range(n):
                p = Fraction(2 * i + 1, 2 * n)
                out.writerow([float(p), *(float(f({"p": p})) for f in functions)])
        print(f"\nwrote {args.csv}")


if __name__ == "__main__":
    main()
