"""Kernel/shell decompositions of a query, one per query edge.

The kernel is a connected vertex cover containing both endpoints of the
seed edge; the shell is everything else and is therefore independent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .bigraph import max_matching
from .graph import LabeledGraph, QueryGraph

EXACT_LIMIT = 16


class PlanSizeError(ValueError):
    pass


@dataclass(frozen=True)
class KernelShellPlan:
    seed_edge: tuple[int, int]
    kernel: tuple[int, ...]
    shell: tuple[int, ...]

    def describe(self) -> str:
        uk, ul = self.seed_edge
        kernel = ",".join(map(str, self.kernel))
        shell = ",".join(map(str, self.shell))
        return f"plan {uk} {ul} kernel={kernel} shell={shell}"


def _edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _connected_within(q: LabeledGraph, vertices: set[int]) -> bool:
    if not vertices:
        return True
    start = min(vertices)
    seen = {start}
    stack = [start]
    while stack:
        a = stack.pop()
        for b in q.adjacency[a]:
            if b in vertices and b not in seen:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(vertices)


def _is_cover(q: LabeledGraph, vertices: set[int]) -> bool:
    return all(a in vertices or b in vertices for a, b in q.edges())


def kernel_order(q: LabeledGraph, kernel: set[int], seed: tuple[int, int]) -> tuple[int, ...]:
    """Breadth-first order of ``kernel`` from the seed edge.

    Neighbors are enqueued by ascending query degree, then id.
    """
    order = list(seed)
    seen = set(seed)
    queue = deque(seed)
    while queue:
        a = queue.popleft()
        for b in sorted(q.adjacency[a], key=lambda x: (len(q.adjacency[x]), x)):
            if b in kernel and b not in seen:
                seen.add(b)
                order.append(b)
                queue.append(b)
    if len(order) != len(kernel):
        raise ValueError("kernel is not connected")
    return tuple(order)


def _make_plan(q: LabeledGraph, kernel: set[int], seed: tuple[int, int]) -> KernelShellPlan:
    order = kernel_order(q, kernel, seed)
    shell = tuple(sorted(set(range(q.vertex_count)) - kernel))
    return KernelShellPlan(seed, order, shell)


def validate_plan(q: LabeledGraph, p: KernelShellPlan) -> bool:
    kernel, shell = set(p.kernel), set(p.shell)
    if len(kernel) != len(p.kernel) or len(shell) != len(p.shell):
        return False
    if kernel & shell or kernel | shell != set(range(q.vertex_count)):
        return False
    uk, ul = p.seed_edge
    if not q.has_edge(uk, ul) or uk not in kernel or ul not in kernel:
        return False
    if not _is_cover(q, kernel):
        return False
    if any(q.has_edge(a, b) for a, b in combinations(sorted(shell), 2)):
        return False
    # every kernel vertex after the first is adjacent to an earlier one
    for i, u in enumerate(p.kernel[1:], start=1):
        if not any(q.has_edge(u, w) for w in p.kernel[:i]):
            return False
    return _connected_within(q, kernel)


def _odd_cycles(adj: dict[int, set[int]]) -> list[list[int]]:
    """Greedily peel vertex-disjoint odd cycles off ``adj`` (mutated).

    Each round runs a parity-labelled DFS from the lowest remaining vertex
    of every component and extracts the first odd cycle found, i.e. the
    tree path closed by an edge between two vertices of equal parity.
    """
    cycles = []
    while True:
        cycle = None
        parity: dict[int, int] = {}
        parent: dict[int, int | None] = {}
        for root in sorted(adj):
            if root in parity or cycle:
                continue
            parity[root] = 0
            parent[root] = None
            stack = [(root, iter(sorted(adj[root])))]
            while stack and cycle is None:
                a, it = stack[-1]
                for b in it:
                    if b not in parity:
                        parity[b] = 1 - parity[a]
                        parent[b] = a
                        stack.append((b, iter(sorted(adj[b]))))
                        break
                    if b != parent[a] and parity[b] == parity[a]:
                        # b is an ancestor of a on the DFS stack or in a
                        # finished branch; walk both up to their meeting point
                        path_a = [a]
                        while path_a[-1] is not None:
                            path_a.append(parent[path_a[-1]])
                        path_a.pop()
                        on_a = {x: i for i, x in enumerate(path_a)}
                        path_b = [b]
                        while path_b[-1] not in on_a:
                            path_b.append(parent[path_b[-1]])
                        meet = path_b[-1]
                        cycle = path_a[:on_a[meet] + 1] + path_b[-2::-1]
                        break
                else:
                    stack.pop()
        if cycle is None:
            return cycles
        cycles.append(cycle)
        for x in cycle:
            for y in adj.pop(x):
                if y in adj:
                    adj[y].discard(x)


def _bipartite_cover(adj: dict[int, set[int]]) -> set[int]:
    """Minimum vertex cover of a bipartite graph via König's theorem."""
    side: dict[int, int] = {}
    for root in sorted(adj):
        if root in side:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b in adj[a]:
                if b not in side:
                    side[b] = 1 - side[a]
                    queue.append(b)
    left = sorted(x for x in adj if side[x] == 0)
    right = {x for x in adj if side[x] == 1}
    matching = max_matching(left, {x: sorted(adj[x]) for x in left})
    match_r = {y: x for x, y in matching.items()}
    # alternating reachability from unmatched left vertices
    reach_l = {x for x in left if x not in matching}
    reach_r: set[int] = set()
    queue = deque(reach_l)
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y in reach_r or matching.get(x) == y:
                continue
            reach_r.add(y)
            z = match_r.get(y)
            if z is not None and z not in reach_l:
                reach_l.add(z)
                queue.append(z)
    return (set(left) - reach_l) | (right & reach_r)


def _steiner_connect(q: LabeledGraph, chosen: set[int], seed: tuple[int, int]) -> set[int]:
    """Join the components of ``chosen`` to the seed's component by
    repeatedly adding a shortest path to the nearest other component."""
    chosen = set(chosen)
    while True:
        comp = {seed[0]}
        stack = [seed[0]]
        while stack:
            a = stack.pop()
            for b in q.adjacency[a]:
                if b in chosen and b not in comp:
                    comp.add(b)
                    stack.append(b)
        if comp == chosen:
            return chosen
        # multi-source BFS from the seed component, lowest ids first
        prev: dict[int, int | None] = {x: None for x in comp}
        queue = deque(sorted(comp))
        hit = None
        while queue and hit is None:
            a = queue.popleft()
            for b in sorted(q.adjacency[a]):
                if b in prev:
                    continue
                prev[b] = a
                if b in chosen:
                    hit = b
                    break
                queue.append(b)
        x = prev[hit]
        while x is not None and x not in comp:
            chosen.add(x)
            x = prev[x]


def greedy_cks(q: QueryGraph, seed: tuple[int, int]) -> KernelShellPlan:
    """Approximate minimum conditional kernel set for ``seed``.

    Seed endpoints first, then vertex-disjoint odd cycles of the rest, then
    a König cover of what remains bipartite, finally Steiner-style shortest
    paths to make the set connected.
    """
    uk, ul = seed
    if not q.has_edge(uk, ul):
        raise ValueError(f"({uk}, {ul}) is not a query edge")
    chosen = {uk, ul}
    # only the covered edges go with the seed endpoints; their neighbors stay
    rest = {a: {b for b in q.adjacency[a] if b not in chosen}
            for a in range(q.vertex_count) if a not in chosen}
    for cycle in _odd_cycles(rest):
        chosen.update(cycle)
    rest = {a: nbrs for a, nbrs in rest.items() if nbrs}
    chosen |= _bipartite_cover(rest)
    chosen = _steiner_connect(q, chosen, seed)
    return _make_plan(q, chosen, seed)


def exact_mcks(q: QueryGraph, seed: tuple[int, int]) -> KernelShellPlan:
    """Minimum conditional kernel set by exhaustive search over subsets.

    Among minimum sets the lexicographically smallest sorted vertex tuple
    wins.
    """
    n = q.vertex_count
    if n > EXACT_LIMIT:
        raise PlanSizeError(f"exact search refused: {n} query vertices > {EXACT_LIMIT}")
    uk, ul = seed
    if not q.has_edge(uk, ul):
        raise ValueError(f"({uk}, {ul}) is not a query edge")
    others = [x for x in range(n) if x not in (uk, ul)]
    edges = q.edges()
    for size in range(len(others) + 1):
        for extra in combinations(others, size):
            kernel = {uk, ul, *extra}
            if all(a in kernel or b in kernel for a, b in edges) and _connected_within(q, kernel):
                return _make_plan(q, kernel, seed)
    raise AssertionError("the full vertex set is always a conditional kernel set")


def precompute_all(q: QueryGraph, solver=greedy_cks) -> dict[tuple[int, int], KernelShellPlan]:
    """One plan per undirected query edge, keyed by (smaller, larger) id."""
    return {e: solver(q, e) for e in q.edges()}


def plan_for(plans: dict[tuple[int, int], KernelShellPlan], a: int, b: int) -> KernelShellPlan:
    return plans[_edge_key(a, b)]
