"""Command-line driver.

Subcommands: run, verify, oracle-diff, dump-index, dump-plans, bench.
Exit codes: 0 ok, 2 parse/validation error, 3 verification failed,
4 run timed out before finishing the stream.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import statistics
import sys
from pathlib import Path

from .generate import random_session
from .graph import (GraphFormatError, GraphValidationError, OpKind, QueryError, apply_update,
                    load_graph, load_query, load_update_stream)
from .index import CaLiGIndex
from .kernel import exact_mcks, greedy_cks, precompute_all
from .oracle import OracleBoundError, diff_snapshots, enumerate_static, match_lines
from .session import DEFAULT_TIMEOUT_SECS, RunMetrics, SessionConfig, run_session, verify_session

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY_FAIL = 3
EXIT_TIMEOUT = 4

CSV_COLUMNS = ["op_index", "kind", "src", "dst", "maint_us", "search_us", "added", "removed", "backtracks"]
REPORT_SCHEMA = 1


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    return Path(path).read_text()


def load_inputs(args):
    """(query, data graph, stream) from files, or a seeded random session."""
    if args.data is None and args.query is None and args.stream is None:
        if args.seed is None:
            raise UsageError("give --data/--query/--stream or --seed")
        return random_session(args.seed)
    if args.data is None or args.query is None:
        raise UsageError("--data and --query are required together")
    vocab: dict[str, int] = {}
    g = load_graph(_read(args.data), vocab)
    q = load_query(_read(args.query), vocab)
    ops = load_update_stream(_read(args.stream), g.vertex_count) if args.stream else []
    return q, g, ops


def config_from_args(args) -> SessionConfig:
    return SessionConfig(
        mode=getattr(args, "mode", "enumerate"),
        max_matches=getattr(args, "max_matches", None),
        timeout_secs=args.timeout_secs,
        injective=not args.no_injm,
        track_states=not args.no_nstate,
        use_kss=not args.no_kss,
        cache_matching=args.cache_im,
        prune=not args.no_prune,
    )


def _num(x: float):
    return "inf" if math.isinf(x) else x


def report_json(metrics: RunMetrics, argv: list[str], config: SessionConfig, timing: bool = True) -> str:
    rows = []
    for r in metrics.rows:
        row = {c: getattr(r, c) for c in CSV_COLUMNS}
        row["skipped"] = r.skipped
        if not timing:
            del row["maint_us"], row["search_us"]
        rows.append(row)
    applied = metrics.applied
    payload = {
        "schema": REPORT_SCHEMA,
        "command": argv,
        "config": dict(config.__dict__),
        "completed": metrics.completed,
        "updates": len(applied),
        "skipped_ops": metrics.skipped_ops,
        "matches_added": metrics.matches_added,
        "matches_removed": metrics.matches_removed,
        "backtrackings": metrics.backtrackings,
        "match_density": _num(metrics.match_density),
        "rows": rows,
    }
    if timing:
        total = metrics.maint_us + metrics.search_us
        payload.update({
            "offline_us": metrics.offline_us,
            "total_us": metrics.total_us,
            "maint_us": metrics.maint_us,
            "search_us": metrics.search_us,
            "maintenance_share": metrics.maint_us / total if total else 0.0,
            "avg_update_us": total / len(applied) if applied else 0.0,
            "peak_memory_bytes": metrics.peak_memory_bytes,
        })
    return json.dumps(payload, indent=2, default=str) + "\n"


def report_csv(metrics: RunMetrics, timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in metrics.applied:
        row = [getattr(r, c) for c in CSV_COLUMNS]
        if not timing:
            row[4] = row[5] = ""
        w.writerow(row)
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_run(args, argv) -> int:
    q, g, ops = load_inputs(args)
    config = config_from_args(args)
    if args.dump_plans:
        solver = exact_mcks if args.exact_plans else greedy_cks
        Path(args.dump_plans).write_text(
            "".join(p.describe() + "\n" for p in precompute_all(q, solver).values()))
    result = run_session(q, g, ops, config)
    m = result.metrics
    if config.mode == "enumerate":
        _emit("".join(line + "\n" for line in m.match_lines()), args.output)
    timing = not args.no_timing
    text = report_json(m, argv, config, timing) if args.report == "json" else report_csv(m, timing)
    if args.report_out:
        Path(args.report_out).write_text(text)
    else:
        sys.stderr.write(text)
    if args.dump_index:
        Path(args.dump_index).write_text(result.index.dump())
    return EXIT_OK if m.completed else EXIT_TIMEOUT


def cmd_verify(args, argv) -> int:
    q, g, ops = load_inputs(args)
    verdict = verify_session(q, g, ops, config_from_args(args), rebuild_every=args.rebuild_every)
    print(verdict.describe())
    if not verdict.metrics.completed:
        return EXIT_TIMEOUT
    return EXIT_OK if verdict.passed else EXIT_VERIFY_FAIL


def cmd_oracle_diff(args, argv) -> int:
    q, g, ops = load_inputs(args)
    before = enumerate_static(q, g)
    out = []
    for op in ops:
        try:
            apply_update(g, op)
        except ValueError:
            continue
        after = enumerate_static(q, g)
        added, removed = diff_snapshots(before, after)
        out += match_lines("+", added) if op.kind is OpKind.ADD else match_lines("-", removed)
        before = after
    _emit("".join(line + "\n" for line in out), args.output)
    return EXIT_OK


def cmd_dump_index(args, argv) -> int:
    q, g, ops = load_inputs(args)
    config = config_from_args(args)
    if ops:
        idx = run_session(q, g, ops, config).index
    else:
        idx = CaLiGIndex.construct(q, g, injective=config.injective,
                                   track_states=config.track_states)
    _emit(idx.dump(), args.output)
    return EXIT_OK


def cmd_dump_plans(args, argv) -> int:
    if args.query is None:
        raise UsageError("--query is required")
    q = load_query(_read(args.query))
    solver = exact_mcks if args.exact else greedy_cks
    _emit("".join(p.describe() + "\n" for p in precompute_all(q, solver).values()), args.output)
    return EXIT_OK


def cmd_bench(args, argv) -> int:
    """Aggregate metrics over seeded random desk-scale sessions."""
    config = config_from_args(args)
    runs = []
    for seed in range(args.seed_start, args.seed_start + args.sessions):
        q, g, ops = random_session(seed, stream_length=args.stream_length)
        m = run_session(q, g, ops, config).metrics
        runs.append((seed, m))
    done = [m for _, m in runs if m.completed]

    def avg(xs):
        xs = list(xs)
        return statistics.fmean(xs) if xs else 0.0

    finite_md = [m.match_density for _, m in runs if 0 < m.match_density < math.inf]
    payload = {
        "schema": REPORT_SCHEMA,
        "command": argv,
        "config": dict(config.__dict__),
        "sessions": len(runs),
        "completion_rate": len(done) / len(runs) if runs else 0.0,
        "avg_elapsed_ms_all": avg(m.total_us / 1000 for _, m in runs),
        "avg_elapsed_ms_completed": avg(m.total_us / 1000 for m in done),
        "avg_peak_memory_bytes": avg(m.peak_memory_bytes for _, m in runs),
        "geomean_match_density": (math.exp(statistics.fmean(math.log(x) for x in finite_md))
                                  if finite_md else None),
        "maintenance_share": (sum(m.maint_us for _, m in runs)
                              / max(1e-9, sum(m.maint_us + m.search_us for _, m in runs))),
        "per_session": [{"seed": s, "completed": m.completed, "total_us": m.total_us,
                         "matches": m.matches_added + m.matches_removed,
                         "backtrackings": m.backtrackings, "match_density": _num(m.match_density)}
                        for s, m in runs],
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return EXIT_OK


def _add_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="data graph file")
    p.add_argument("--query", help="query graph file")
    p.add_argument("--stream", help="update stream file")
    p.add_argument("--seed", type=int, help="generate a random desk-scale session instead of reading files")


def _add_engine(p: argparse.ArgumentParser) -> None:
    p.add_argument("--timeout-secs", type=float, default=DEFAULT_TIMEOUT_SECS)
    p.add_argument("--no-injm", action="store_true", help="ablation: per-neighbor check instead of injective matching")
    p.add_argument("--no-nstate", action="store_true", help="ablation: keep every matching pair ON")
    p.add_argument("--no-kss", action="store_true", help="ablation: backtrack over shell vertices too")
    p.add_argument("--cache-im", action="store_true", help="cache the last injective matching per node")
    p.add_argument("--no-prune", action="store_true", help="disable early shell pruning")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="calig", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the engine over a stream")
    _add_inputs(p)
    _add_engine(p)
    p.add_argument("--mode", choices=["count", "enumerate"], default="enumerate")
    p.add_argument("--max-matches", type=int, default=None, help="cap on materialized matches per update")
    p.add_argument("--report", choices=["json", "csv"], default="json")
    p.add_argument("--report-out", help="report file (default: stderr)")
    p.add_argument("--output", "-o", help="match output file (default: stdout)")
    p.add_argument("--no-timing", action="store_true", help="omit timings and memory for reproducible reports")
    p.add_argument("--dump-index", metavar="PATH", help="write the final index dump here")
    p.add_argument("--dump-plans", metavar="PATH", help="write the kernel/shell plans here")
    p.add_argument("--exact-plans", action="store_true", help="with --dump-plans, dump exact minimum plans")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="check every update against the brute-force oracle")
    _add_inputs(p)
    _add_engine(p)
    p.add_argument("--rebuild-every", type=int, default=0, help="also compare lighting with a rebuild every k updates")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle-diff", help="incremental matches from oracle snapshots")
    _add_inputs(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_oracle_diff)

    p = sub.add_parser("dump-index", help="print index nodes and arcs (after the stream, if given)")
    _add_inputs(p)
    _add_engine(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_dump_index)

    p = sub.add_parser("dump-plans", help="print one kernel/shell plan per query edge")
    p.add_argument("--query")
    p.add_argument("--exact", action="store_true", help="exact minimum plans (at most 16 query vertices)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_dump_plans)

    p = sub.add_parser("bench", help="aggregate metrics over seeded random sessions")
    _add_engine(p)
    p.add_argument("--sessions", type=int, default=20)
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--stream-length", type=int, default=50)
    p.add_argument("--mode", choices=["count", "enumerate"], default="count")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, ["calig", *argv])
    except (GraphFormatError, GraphValidationError, QueryError, OracleBoundError, UsageError) as exc:
        print(f"calig: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"calig: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
