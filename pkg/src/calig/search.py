"""Incremental match search seeded from one updated data edge.

Kernel vertices are matched by backtracking in plan order; once the kernel
is complete, shell vertices (pairwise non-adjacent) are filled by an
injective join of their candidate sets.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator

from .index import CaLiGIndex
from .kernel import KernelShellPlan, plan_for

ADDED = "+"
REMOVED = "-"


class SearchTimeout(Exception):
    pass


@dataclass
class SearchCounters:
    backtrackings: int = 0
    matches_emitted: int = 0
    timed_out: bool = False


@dataclass
class MatchSet:
    sign: str
    matches: list[tuple[int, ...]] = field(default_factory=list)
    count: int = 0
    complete: bool = True
    truncated: bool = False

    def lines(self) -> list[str]:
        return [f"m {self.sign} " + " ".join(map(str, m)) for m in self.matches]


@dataclass
class SearchOptions:
    use_kss: bool = True
    prune: bool = True
    enumerate: bool = True
    max_matches: int | None = None
    deadline: float | None = None  # time.perf_counter() value


def generate_candidates(u: int, m: dict[int, int], idx: CaLiGIndex) -> set[int]:
    """ON candidates for ``u`` adjacent (through index arcs) to every matched
    neighbor of ``u``, minus data vertices already used in ``m``."""
    result: set[int] | None = None
    for ui in idx.query.adjacency[u]:
        vi = m.get(ui)
        if vi is None:
            continue
        arcs = idx.in_arcs[(ui, vi)].get(u, ())
        ci = {v for v in arcs if idx.state[(u, v)]}
        result = ci if result is None else result & ci
        if not result:
            return set()
    if result is None:
        raise ValueError(f"query vertex {u} has no matched neighbor")
    used = set(m.values())
    return result - used


def count_injective(cands: list[list[int]]) -> int:
    """Number of ways to pick one element per list with all picks distinct."""
    order = sorted(range(len(cands)), key=lambda i: len(cands[i]))
    cands = [cands[i] for i in order]
    used: set[int] = set()

    def rec(i: int) -> int:
        if i == len(cands):
            return 1
        total = 0
        for v in cands[i]:
            if v not in used:
                used.add(v)
                total += rec(i + 1)
                used.discard(v)
        return total

    return rec(0)


def join_shell(m: dict[int, int], shell: tuple[int, ...], shell_cands: list[list[int]]) -> Iterator[dict[int, int]]:
    """Every completion of ``m`` taking one candidate per shell vertex, with
    the chosen data vertices pairwise distinct, in lexicographic order."""
    used: set[int] = set()
    picked = dict(m)

    def rec(i: int):
        if i == len(shell):
            yield dict(picked)
            return
        u = shell[i]
        for v in shell_cands[i]:
            if v in used:
                continue
            used.add(v)
            picked[u] = v
            yield from rec(i + 1)
            used.discard(v)
        picked.pop(u, None)

    yield from rec(0)


def join_count(shell_labels: list[int], shell_cands: list[list[int]]) -> int:
    """Cardinality of the injective shell join without materializing it.

    Candidate sets of different labels are disjoint, so groups per label
    multiply; inside a group the distinctness filter is counted directly.
    """
    if len(set(shell_labels)) == len(shell_labels):
        total = 1
        for c in shell_cands:
            total *= len(c)
        return total
    groups: dict[int, list[list[int]]] = {}
    for lab, c in zip(shell_labels, shell_cands):
        groups.setdefault(lab, []).append(c)
    total = 1
    for group in groups.values():
        total *= count_injective(group) if len(group) > 1 else len(group[0])
        if not total:
            return 0
    return total


class _Search:
    def __init__(self, idx: CaLiGIndex, plan: KernelShellPlan, opts: SearchOptions,
                 counters: SearchCounters, out: MatchSet):
        self.idx = idx
        self.opts = opts
        self.counters = counters
        self.out = out
        q = idx.query
        self.n = q.vertex_count
        if opts.use_kss:
            self.order = plan.kernel
            self.shell = plan.shell
        else:
            self.order = plan.kernel + plan.shell
            self.shell = ()
        self.shell_labels = [q.labels[u] for u in self.shell]
        # shell vertices whose neighbors are all matched once order[:i] is
        pos = {u: i for i, u in enumerate(self.order)}
        self.ready_at: list[list[int]] = [[] for _ in range(len(self.order) + 1)]
        for s in self.shell:
            last = max(pos[w] for w in q.adjacency[s])
            self.ready_at[last + 1].append(s)

    def prune_ahead(self, m: dict[int, int], depth: int) -> bool:
        """False if a shell vertex with all neighbors matched has no candidate."""
        for i in range(depth + 1):
            for s in self.ready_at[i]:
                if not generate_candidates(s, m, self.idx):
                    return False
        return True

    def run(self, m: dict[int, int]) -> None:
        if self.opts.use_kss and self.opts.prune and not self.prune_ahead(m, 2):
            return
        self.extend(m, 2)

    def extend(self, m: dict[int, int], depth: int) -> None:
        deadline = self.opts.deadline
        if deadline is not None and time.perf_counter() > deadline:
            raise SearchTimeout
        if depth == len(self.order):
            self.emit(m)
            return
        u = self.order[depth]
        for v in sorted(generate_candidates(u, m, self.idx)):
            self.counters.backtrackings += 1
            m[u] = v
            if not (self.opts.use_kss and self.opts.prune) or self.prune_ahead(m, depth + 1):
                self.extend(m, depth + 1)
            del m[u]

    def emit(self, m: dict[int, int]) -> None:
        cands = [sorted(generate_candidates(s, m, self.idx)) for s in self.shell]
        if any(not c for c in cands):
            return
        if not self.opts.enumerate:
            k = join_count(self.shell_labels, cands)
            self.counters.matches_emitted += k
            self.out.count += k
            return
        limit = self.opts.max_matches
        for full in join_shell(m, self.shell, cands):
            self.counters.matches_emitted += 1
            self.out.count += 1
            if limit is not None and len(self.out.matches) >= limit:
                self.out.truncated = True
                continue
            self.out.matches.append(tuple(full[u] for u in range(self.n)))


def find_incremental_matches(idx: CaLiGIndex, v1: int, v2: int,
                             plans: dict[tuple[int, int], KernelShellPlan], sign: str,
                             counters: SearchCounters | None = None,
                             opts: SearchOptions | None = None) -> MatchSet:
    """All matches that use data edge (v1, v2) as the image of a query edge.

    Every query vertex u1 with an ON pair (u1, v1) is tried, and every
    neighbor u2 whose pair (u2, v2) is an ON in-neighbor of (u1, v1) gives
    one seed. Matches are returned sorted.
    """
    counters = SearchCounters() if counters is None else counters
    opts = SearchOptions() if opts is None else opts
    out = MatchSet(sign)
    q = idx.query
    lab1 = idx.graph.labels[v1]
    try:
        for u1 in range(q.vertex_count):
            if q.labels[u1] != lab1 or not idx.is_on(u1, v1):
                continue
            arcs = idx.in_arcs[(u1, v1)]
            for u2 in sorted(q.adjacency[u1]):
                if v2 not in arcs.get(u2, ()) or not idx.is_on(u2, v2):
                    continue
                search = _Search(idx, plan_for(plans, u1, u2), opts, counters, out)
                search.run({u1: v1, u2: v2})
    except SearchTimeout:
        counters.timed_out = True
        out.complete = False
    out.matches = sorted(set(out.matches))
    return out
