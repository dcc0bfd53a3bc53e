"""Command-line driver: generate -> sea -> score, plus CSV export.

Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from pathlib import Path

from . import __version__
from .fileio import dump_json, sha256_file, write_atomic
from .labyrinth import LabyrinthConfig, generate, parse_cell
from .model import ModelError, load_model, save_model
from .ratfunc import PoleError, format_expression
from .schedulers import compute_sea, load_sea, save_sea, scheduler_count
from .scoring import EmptyGridError, GridSpec, classify, midpoints


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("SEA_JOBS", "1")))
    except ValueError:
        return 1


def _cell(text: str):
    try:
        return parse_cell(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _eps(text: str):
    if text == "median":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'median', got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("epsilon must be non-negative")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


class _Manifest:
    def __init__(self, command: str, path: Path):
        self.path = path
        self.data = {
            "tool": "pmdpsea",
            "version": __version__,
            "command": command,
            "input": None,
            "input_sha256": None,
            "grid": None,
            "eps": None,
            "timings": {},
            "counts": {},
            "status": "running",
        }
        self._t = time.perf_counter()

    def lap(self, phase: str) -> None:
        now = time.perf_counter()
        self.data["timings"][phase] = round(now - self._t, 6)
        self._t = now

    def write(self) -> None:
        write_atomic(self.path, dump_json(self.data))


def cmd_generate(args) -> int:
    cfg = LabyrinthConfig(args.n, args.scenario, args.scheme, frozenset(args.sink), args.source, args.target)
    model, space, query = generate(cfg)
    save_model(args.output, model, space, query)
    sinks = ", ".join(model.sinks()) or "none"
    print(f"wrote {args.output}: {args.n}x{args.n} {args.scenario} {args.scheme}, "
          f"{len(model.states)} states, sinks {sinks}, parameters {', '.join(space.parameters)}, "
          f"{scheduler_count(model, query)} schedulers for {query.source} -> {query.target}")
    return 0


def cmd_sea(args) -> int:
    out = Path(args.output)
    manifest = _Manifest("sea", Path(args.manifest) if args.manifest else out.with_name(out.name + ".manifest.json"))
    try:
        manifest.data["input"] = str(args.model)
        manifest.data["input_sha256"] = sha256_file(args.model)
        model, space, query = load_model(args.model)
        manifest.lap("load")
        sea = compute_sea(model, query, space, jobs=args.jobs)
        manifest.lap("waves")
        save_sea(out, sea)
        manifest.data["counts"] = {"schedulers": sea.scheduler_count, "functions": len(sea.waves)}
        manifest.data["status"] = "ok"
        print(f"{sea.scheduler_count} schedulers, {len(sea.waves)} distinct functions -> {out}")
        return 0
    except BaseException as exc:
        manifest.data["status"] = "error"
        manifest.data["error"] = str(exc)
        raise
    finally:
        manifest.write()


def _print_table(report, sea) -> None:
    def show(ids):
        if ids is None:
            return "none"
        if isinstance(ids, int):
            ids = [ids]
        if not ids:
            return "none"
        return ", ".join(str(i) for i in ids)

    rows = [
        ("dominant", report.dominant),
        ("optimistic", report.optimistic),
        ("pessimistic", report.pessimistic),
        ("bound", report.bound),
        (f"eps-bounded (eps={report.eps_bounded_value:.6g})", report.eps_bounded),
        ("eps-bounded robust", report.eps_bounded_robust),
        ("expectation", report.expectation),
        ("stable", report.stable),
        (f"eps-stable (eps={report.eps_stable_value:.6g})", report.eps_stable),
        ("eps-stable robust", report.eps_stable_robust),
    ]
    width = max(len(name) for name, _ in rows)
    for name, ids in rows:
        print(f"{name:<{width}}  {show(ids)}")
    print()
    print(f"{'id':>4}  {'min':>10}  {'max':>10}  {'E':>10}  {'Var':>10}  function")
    for i, (w, s) in enumerate(zip(sea.waves, report.stats)):
        print(f"{i:>4}  {s.min:>10.6f}  {s.max:>10.6f}  {s.expectation:>10.6f}  {s.variance:>10.3e}  "
              f"{format_expression(w.function)}")


def cmd_score(args) -> int:
    out = Path(args.output)
    manifest = _Manifest("score", Path(args.manifest) if args.manifest else out.with_name(out.name + ".manifest.json"))
    try:
        manifest.data["input"] = str(args.sea)
        manifest.data["input_sha256"] = sha256_file(args.sea)
        sea = load_sea(args.sea)
        model = None
        if args.model:
            model = load_model(args.model)[0]
        spec = GridSpec(resolution=args.resolution, depth=args.depth, factor=args.factor,
                        pole_policy=args.pole_policy)
        manifest.data["grid"] = spec.to_dict()
        manifest.lap("load")
        report = classify(sea.functions, sea.space, spec, args.eps_bounded, args.eps_stable,
                          model=model, jobs=args.jobs)
        manifest.lap("scoring")
        manifest.data["eps"] = {"bounded": report.eps_bounded_value, "stable": report.eps_stable_value}
        manifest.data["counts"] = {"schedulers": sea.scheduler_count, "functions": len(sea.waves)}
        doc = report.to_dict()
        for entry, w in zip(doc["scores"], sea.waves):
            entry["function"] = format_expression(w.function)
        write_atomic(out, dump_json(doc))
        manifest.data["status"] = "ok"
        _print_table(report, sea)
        return 0
    except BaseException as exc:
        manifest.data["status"] = "error"
        manifest.data["error"] = str(exc)
        raise
    finally:
        manifest.write()


def cmd_export(args) -> int:
    sea = load_sea(args.sea)
    space = sea.space
    pts, _ = midpoints(space, args.resolution)
    pts = [p for p in pts if space.satisfies_constraints(dict(zip(space.parameters, p)))]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["wave_id", *space.parameters, "value"])
    for i, w in enumerate(sea.waves):
        for p in pts:
            try:
                value = repr(float(w.function.evaluate_tuple(p)))
            except PoleError:
                value = "nan"
            writer.writerow([i, *(repr(float(x)) for x in p), value])
    if args.output:
        write_atomic(args.output, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmdpsea", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a labyrinth model file")
    g.add_argument("--n", type=int, required=True, help="grid size")
    g.add_argument("--scenario", choices=["ff", "fs"], default="ff")
    g.add_argument("--scheme", choices=["k8", "k2", "k1"], default="k2")
    g.add_argument("--sink", type=_cell, action="append", default=[], metavar="COL,ROW")
    g.add_argument("--source", type=_cell, default=(1, 1), metavar="COL,ROW")
    g.add_argument("--target", type=_cell, required=True, metavar="COL,ROW")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sea", help="compute all waves of a model")
    s.add_argument("model")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--jobs", type=_positive, default=_default_jobs())
    s.add_argument("--manifest")
    s.set_defaults(func=cmd_sea)

    c = sub.add_parser("score", help="classify the waves of a sea file")
    c.add_argument("sea")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--eps-bounded", type=_eps, default=None, help="number or 'median' (default)")
    c.add_argument("--eps-stable", type=_eps, default=None, help="number or 'median' (default)")
    c.add_argument("--resolution", type=_positive, default=GridSpec.resolution)
    c.add_argument("--depth", type=int, default=GridSpec.depth)
    c.add_argument("--factor", type=int, default=GridSpec.factor)
    c.add_argument("--pole-policy", choices=["skip", "abort"], default="skip")
    c.add_argument("--model", help="model file; enables entrywise admissibility filtering")
    c.add_argument("--jobs", type=_positive, default=_default_jobs())
    c.add_argument("--manifest")
    c.set_defaults(func=cmd_score)

    e = sub.add_parser("export", help="sample every wave on a grid as CSV")
    e.add_argument("sea")
    e.add_argument("--resolution", type=_positive, default=101)
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, EmptyGridError, PoleError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
