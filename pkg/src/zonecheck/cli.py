"""Command-line front end.

Exit codes: 0 verdict reached, 2 usage/parse/model error, 3 algorithm does
not support the automaton class, 4 budget exhausted or constraint map
diverged.  The verdict is line 1 of stdout, the counters line 2; timing goes
to stderr so stdout is reproducible.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass

from . import gsim
from .errors import ClassMismatch, Inconclusive, ModelError, ParseError
from .liveness import buchi_check
from .model import TimedAutomaton, classify, parse
from .reach import DEFAULT_BUDGET, Strategy, explore

EXIT_OK, EXIT_USAGE, EXIT_CLASS, EXIT_INCONCLUSIVE = 0, 2, 3, 4


@dataclass
class RunReport:
    verdict: str
    visited: int
    stored: int
    subsumed: int
    wall_time_ms: float
    algorithm: str
    model_hash: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _load(path: str) -> tuple[TimedAutomaton, str]:
    with open(path, "rb") as fh:
        raw = fh.read()
    return parse(raw.decode("utf-8")), hashlib.sha256(raw).hexdigest()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zonecheck", description="Zone-based timed automata model checker")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse, validate and classify a model")
    c.add_argument("file")
    c.add_argument("--g-dump", action="store_true", help="also print the constraint map")

    r = sub.add_parser("reach", help="control-state reachability")
    r.add_argument("file")
    r.add_argument("--target", required=True, help="state name or label")
    r.add_argument("--algo", required=True, choices=["exact", "extra-k", "extra-lu", "gsim"])
    r.add_argument("--bounds", choices=["global", "per-state"], default="per-state")
    r.add_argument("--order", choices=["bfs", "dfs"], default="bfs")
    r.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    r.add_argument("--dot", metavar="OUT", help="write the explored zone graph in DOT format")
    r.add_argument("--report", metavar="JSON", help="write a machine-readable run report")

    lv = sub.add_parser("liveness", help="Buchi emptiness")
    lv.add_argument("file")
    lv.add_argument("--accepting", required=True, help="state name or label")
    lv.add_argument("--algo", required=True, choices=["exact", "extra-lu", "gsim"])
    lv.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    lv.add_argument("--report", metavar="JSON")

    g = sub.add_parser("gdump", help="print the constraint map G(q) of every state")
    g.add_argument("file")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        a, digest = _load(args.file)
        if args.command == "check":
            cls = classify(a)
            print(f"diagonal-free: {_yn(cls.diagonal_free)}; reset-only: {_yn(cls.reset_only)}", file=out)
            print(f"states={len(a.states)} clocks={a.n} transitions={len(a.transitions)}", file=out)
            if args.g_dump:
                print(gsim.compute_constraint_map(a).format(), file=out)
            return EXIT_OK
        if args.command == "gdump":
            print(gsim.compute_constraint_map(a).format(), file=out)
            return EXIT_OK
        if args.command == "reach":
            return _reach(args, a, digest, out)
        return _liveness(args, a, digest, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ClassMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CLASS
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


def _finish(report: RunReport, path) -> None:
    print(f"time_ms={report.wall_time_ms:.1f} algo={report.algorithm} model={report.model_hash[:16]}", file=sys.stderr)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")


def _reach(args, a: TimedAutomaton, digest: str, out) -> int:
    strategy = Strategy.from_algo(args.algo, args.bounds.replace("-", "_"))
    start = time.perf_counter()
    res = explore(a, strategy, args.target, order=args.order, budget=args.budget, record_graph=bool(args.dot))
    elapsed = (time.perf_counter() - start) * 1000
    print(res.verdict, file=out)
    print(res.stats.line(), file=out)
    if res.reachable:
        print("witness:", file=out)
        for t in res.witness:
            print(f"  {a.describe(t)}", file=out)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(res.graph.to_dot())
    s = res.stats
    _finish(RunReport(res.verdict, s.visited, s.stored, s.subsumed, elapsed, strategy.algo_id, digest), args.report)
    return EXIT_OK


def _liveness(args, a: TimedAutomaton, digest: str, out) -> int:
    strategy = Strategy.from_algo(args.algo)
    start = time.perf_counter()
    res = buchi_check(a, strategy, args.accepting, budget=args.budget)
    elapsed = (time.perf_counter() - start) * 1000
    print(res.verdict, file=out)
    print(res.stats.line(), file=out)
    if not res.empty:
        print("stem:", file=out)
        for t in res.stem:
            print(f"  {a.describe(t)}", file=out)
        print("lasso:", file=out)
        for t in res.lasso:
            print(f"  {a.describe(t)}", file=out)
    s = res.stats
    _finish(RunReport(res.verdict, s.visited, s.stored, s.subsumed, elapsed, strategy.algo_id, digest), args.report)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
