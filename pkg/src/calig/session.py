"""Session driver: offline indexing, then the update stream op by op.

Additions update the index before searching; deletions search first and
update afterwards, so both searches see the state that contains the edge.
"""

from __future__ import annotations

import logging
import math
import os
import resource
import time
from dataclasses import dataclass, field

from .graph import LabeledGraph, OpKind, QueryGraph, UpdateOp, apply_update
from .index import CaLiGIndex
from .kernel import precompute_all
from .oracle import diff_snapshots, enumerate_static
from .search import ADDED, REMOVED, SearchCounters, SearchOptions, find_incremental_matches

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_SECS = 1200.0


@dataclass
class SessionConfig:
    mode: str = "enumerate"          # or "count"
    max_matches: int | None = None
    timeout_secs: float = DEFAULT_TIMEOUT_SECS
    injective: bool = True           # False: -InjM
    track_states: bool = True        # False: -NState
    use_kss: bool = True             # False: -KSS
    cache_matching: bool = False     # True: +CaIM
    prune: bool = True


@dataclass
class UpdateRow:
    op_index: int
    kind: str
    src: int
    dst: int
    maint_us: float
    search_us: float
    added: int
    removed: int
    backtracks: int
    skipped: bool = False
    lines: list[str] = field(default_factory=list)


@dataclass
class RunMetrics:
    rows: list[UpdateRow] = field(default_factory=list)
    offline_us: float = 0.0
    total_us: float = 0.0
    completed: bool = True
    skipped_ops: int = 0
    peak_memory_bytes: int = 0

    @property
    def applied(self) -> list[UpdateRow]:
        return [r for r in self.rows if not r.skipped]

    @property
    def matches_added(self) -> int:
        return sum(r.added for r in self.rows)

    @property
    def matches_removed(self) -> int:
        return sum(r.removed for r in self.rows)

    @property
    def backtrackings(self) -> int:
        return sum(r.backtracks for r in self.rows)

    @property
    def maint_us(self) -> float:
        return sum(r.maint_us for r in self.rows)

    @property
    def search_us(self) -> float:
        return sum(r.search_us for r in self.rows)

    @property
    def match_density(self) -> float:
        """Incremental matches per backtracking; inf when nothing backtracked."""
        matches = self.matches_added + self.matches_removed
        if self.backtrackings == 0:
            return math.inf
        return matches / self.backtrackings

    def match_lines(self) -> list[str]:
        return [line for r in self.rows for line in r.lines]


@dataclass
class SessionResult:
    metrics: RunMetrics
    index: CaLiGIndex
    graph: LabeledGraph


def peak_memory_bytes() -> int:
    """Peak virtual size from /proc when available, else peak RSS."""
    try:
        with open(f"/proc/{os.getpid()}/status") as fh:
            for line in fh:
                if line.startswith("VmPeak:"):
                    return int(line.split()[1]) * 1024
    except OSError:
        pass
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


def _us(t0: int, t1: int) -> float:
    return (t1 - t0) / 1000.0


def run_session(query: QueryGraph, graph: LabeledGraph, stream: list[UpdateOp],
                config: SessionConfig | None = None, *, on_update=None) -> SessionResult:
    """Run one query over one stream; ``graph`` is mutated.

    ``on_update(i, op, row, index, graph)`` is called after each applied op.
    """
    config = SessionConfig() if config is None else config
    metrics = RunMetrics()
    start = time.perf_counter_ns()
    deadline = time.perf_counter() + config.timeout_secs
    idx = CaLiGIndex.construct(query, graph, injective=config.injective,
                               track_states=config.track_states,
                               cache_matching=config.cache_matching)
    plans = precompute_all(query)
    metrics.offline_us = _us(start, time.perf_counter_ns())
    enumerate_mode = config.mode == "enumerate"
    for i, op in enumerate(stream):
        a, b = op.edge
        if time.perf_counter() > deadline:
            metrics.completed = False
            break
        present = graph.has_edge(a, b)
        if present == (op.kind is OpKind.ADD):
            metrics.skipped_ops += 1
            log.warning("op %d (%s) skipped: %s", i, op,
                        "edge already present" if present else "edge not present")
            metrics.rows.append(UpdateRow(i, op.kind.value, a, b, 0.0, 0.0, 0, 0, 0, skipped=True))
            continue
        counters = SearchCounters()
        opts = SearchOptions(use_kss=config.use_kss, prune=config.prune, enumerate=enumerate_mode,
                             max_matches=config.max_matches, deadline=deadline)
        if op.kind is OpKind.ADD:
            t0 = time.perf_counter_ns()
            apply_update(graph, op)
            idx.update_for_addition(a, b)
            t1 = time.perf_counter_ns()
            found = find_incremental_matches(idx, a, b, plans, ADDED, counters, opts)
            t2 = time.perf_counter_ns()
            maint, search = _us(t0, t1), _us(t1, t2)
        else:
            t0 = time.perf_counter_ns()
            found = find_incremental_matches(idx, a, b, plans, REMOVED, counters, opts)
            t1 = time.perf_counter_ns()
            apply_update(graph, op)
            idx.update_for_deletion(a, b)
            t2 = time.perf_counter_ns()
            search, maint = _us(t0, t1), _us(t1, t2)
        added = found.count if op.kind is OpKind.ADD else 0
        removed = found.count if op.kind is OpKind.DELETE else 0
        row = UpdateRow(i, op.kind.value, a, b, maint, search, added, removed,
                        counters.backtrackings, lines=found.lines() if enumerate_mode else [])
        metrics.rows.append(row)
        if counters.timed_out:
            metrics.completed = False
            break
        if on_update is not None:
            on_update(i, op, row, idx, graph)
    metrics.total_us = _us(start, time.perf_counter_ns())
    metrics.peak_memory_bytes = peak_memory_bytes()
    return SessionResult(metrics, idx, graph)


@dataclass
class Mismatch:
    op_index: int
    op: UpdateOp
    engine: list[tuple[int, ...]]
    oracle: list[tuple[int, ...]]

    def describe(self) -> str:
        return (f"op {self.op_index} ({self.op}): engine {len(self.engine)} matches, "
                f"oracle {len(self.oracle)}; engine-only {sorted(set(self.engine) - set(self.oracle))[:5]}, "
                f"oracle-only {sorted(set(self.oracle) - set(self.engine))[:5]}")


@dataclass
class Verdict:
    mismatches: list[Mismatch]
    state_mismatches: list[int]
    checked: int
    metrics: RunMetrics

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.state_mismatches and self.metrics.completed

    def describe(self) -> str:
        if self.passed:
            return f"PASS ({self.checked} updates checked)"
        parts = [f"FAIL ({self.checked} updates checked)"]
        if not self.metrics.completed:
            parts.append("run did not complete")
        parts += [m.describe() for m in self.mismatches]
        parts += [f"op {i}: lighting states differ from a rebuilt index" for i in self.state_mismatches]
        return "\n".join(parts)


def _parse_line(line: str) -> tuple[int, ...]:
    return tuple(int(x) for x in line.split()[2:])


def verify_session(query: QueryGraph, graph: LabeledGraph, stream: list[UpdateOp],
                   config: SessionConfig | None = None, *, rebuild_every: int = 0) -> Verdict:
    """Run the engine and compare each update with oracle snapshot diffs.

    With ``rebuild_every`` > 0, every k-th applied update also compares the
    lighting states with a freshly constructed index.
    """
    config = SessionConfig() if config is None else config
    if config.mode != "enumerate" or config.max_matches is not None:
        config = SessionConfig(**{**config.__dict__, "mode": "enumerate", "max_matches": None})
    oracle_graph = graph.copy()
    before = enumerate_static(query, oracle_graph)
    mismatches: list[Mismatch] = []
    state_mismatches: list[int] = []
    checked = 0

    def check(i, op, row, idx, g):
        nonlocal before, checked
        apply_update(oracle_graph, op)
        after = enumerate_static(query, oracle_graph)
        added, removed = diff_snapshots(before, after)
        before = after
        expected = added if op.kind is OpKind.ADD else removed
        unexpected = removed if op.kind is OpKind.ADD else added
        engine = [_parse_line(line) for line in row.lines]
        checked += 1
        if engine != expected or unexpected:
            mismatches.append(Mismatch(i, op, engine, expected))
        if rebuild_every and checked % rebuild_every == 0:
            fresh = CaLiGIndex.construct(query, g.copy(), injective=config.injective,
                                         track_states=config.track_states)
            if fresh.states() != idx.states():
                state_mismatches.append(i)

    result = run_session(query, graph, stream, config, on_update=check)
    return Verdict(mismatches, state_mismatches, checked, result.metrics)
