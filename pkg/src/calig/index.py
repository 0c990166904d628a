"""Candidate lighting graph over (query vertex, data vertex) matching pairs.

Each matching pair is a node that is either lit (ON, the data vertex is a
candidate for the query vertex) or dark (OFF). Arcs run between matching
pairs whose query vertices are adjacent and whose data vertices are
adjacent. A node's lighting is decided by whether the bigraph built from
its in-arcs saturates the query vertex's neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .bigraph import Bigraph, every_left_has_edge, saturating_matching
from .graph import LabeledGraph, QueryGraph

Node = tuple[int, int]
ON = True
OFF = False


@dataclass(frozen=True)
class StateChange:
    node: Node
    old: bool
    new: bool


ChangeLog = list[StateChange]


class CaLiGIndex:
    """The candidate lighting graph for one query over one data graph.

    Options reproduce the ablations:

    ``injective``      full saturating-matching test (False: only check that
                       every query neighbor has some in-arc)
    ``track_states``   initialize and maintain lighting (False: every node
                       stays ON, arcs still follow data edges)
    ``cache_matching`` remember the last saturating matching per node and
                       skip recomputation when a removed arc is not in it
    """

    def __init__(self, query: QueryGraph, graph: LabeledGraph, *, injective: bool = True,
                 track_states: bool = True, cache_matching: bool = False):
        self.query = query
        self.graph = graph
        self.injective = injective
        self.track_states = track_states
        self.cache_matching = cache_matching
        self.state: dict[Node, bool] = {}
        # node -> query vertex -> data vertices of the arc endpoints
        self.in_arcs: dict[Node, dict[int, set[int]]] = {}
        self.out_arcs: dict[Node, dict[int, set[int]]] = {}
        self._cache: dict[Node, dict[int, int]] = {}
        self.matching_checks = 0
        self._left = [tuple(sorted(query.adjacency[u])) for u in range(query.vertex_count)]
        self._by_label: dict[int, list[int]] = {}
        for u in range(query.vertex_count):
            self._by_label.setdefault(query.labels[u], []).append(u)
        # directed query edges grouped by (label of tail, label of head)
        self._qedges_by_labels: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for a in range(query.vertex_count):
            for b in sorted(query.adjacency[a]):
                key = (query.labels[a], query.labels[b])
                self._qedges_by_labels.setdefault(key, []).append((a, b))

    # -- construction ---------------------------------------------------

    @classmethod
    def construct(cls, query: QueryGraph, graph: LabeledGraph, **options) -> "CaLiGIndex":
        idx = cls(query, graph, **options)
        q, g = query, graph
        for u in range(q.vertex_count):
            for v in range(g.vertex_count):
                if q.labels[u] == g.labels[v]:
                    node = (u, v)
                    idx.state[node] = ON
                    idx.in_arcs[node] = {}
                    idx.out_arcs[node] = {}
        for (u, v) in idx.state:
            for u2 in q.adjacency[u]:
                lab = q.labels[u2]
                for v2 in g.adjacency[v]:
                    if g.labels[v2] == lab:
                        idx._add_arc((u2, v2), (u, v))
        if idx.track_states:
            idx.initialize()
        return idx

    def initialize(self) -> ChangeLog:
        """Turn OFF every node lacking a saturating matching, cascading."""
        log: ChangeLog = []
        for node in sorted(self.state):
            if self.state[node] and not self._check(node):
                self._set(node, OFF, log)
                self.off_propagation(node, log)
        return log

    # -- arcs and checks ------------------------------------------------

    def _add_arc(self, src: Node, dst: Node) -> None:
        self.out_arcs[src].setdefault(dst[0], set()).add(dst[1])
        self.in_arcs[dst].setdefault(src[0], set()).add(src[1])

    def _remove_arc(self, src: Node, dst: Node) -> bool:
        outs = self.out_arcs[src].get(dst[0])
        if outs is None or dst[1] not in outs:
            return False
        outs.discard(dst[1])
        if not outs:
            del self.out_arcs[src][dst[0]]
        ins = self.in_arcs[dst][src[0]]
        ins.discard(src[1])
        if not ins:
            del self.in_arcs[dst][src[0]]
        return True

    def has_arc(self, src: Node, dst: Node) -> bool:
        return dst[1] in self.out_arcs[src].get(dst[0], ())

    def in_neighbors(self, node: Node) -> Iterator[Node]:
        for u2, vs in sorted(self.in_arcs[node].items()):
            for v2 in sorted(vs):
                yield (u2, v2)

    def out_neighbors(self, node: Node) -> Iterator[Node]:
        for u2, vs in sorted(self.out_arcs[node].items()):
            for v2 in sorted(vs):
                yield (u2, v2)

    def bigraph(self, node: Node) -> Bigraph:
        u, v = node
        edges = {(u2, v2) for u2, vs in self.in_arcs[node].items() for v2 in vs}
        return Bigraph(list(self._left[u]), sorted(self.graph.adjacency[v]), edges)

    def _check(self, node: Node, removed: Node | None = None) -> bool:
        """Whether ``node``'s bigraph still saturates its query neighborhood.

        ``removed`` names the in-arc source just deleted; with caching on,
        an intact cached matching avoids recomputation.
        """
        left = self._left[node[0]]
        adj = self.in_arcs[node]
        if not self.injective:
            return every_left_has_edge(left, adj)
        if self.cache_matching and removed is not None:
            cached = self._cache.get(node)
            if cached is not None and cached.get(removed[0]) != removed[1]:
                return True
        self.matching_checks += 1
        m = saturating_matching(left, adj)
        if self.cache_matching:
            if m is None:
                self._cache.pop(node, None)
            else:
                self._cache[node] = m
        return m is not None

    def _set(self, node: Node, new: bool, log: ChangeLog) -> None:
        old = self.state[node]
        if old != new:
            self.state[node] = new
            log.append(StateChange(node, old, new))
            if not new:
                self._cache.pop(node, None)

    # -- propagation ----------------------------------------------------

    def off_propagation(self, seed: Node, log: ChangeLog | None = None) -> ChangeLog:
        """Cascade from a node that was just turned OFF."""
        log = [] if log is None else log
        stack = [seed]
        while stack:
            x = stack.pop()
            for y in list(self.out_neighbors(x)):
                if not self.state[y]:
                    continue
                self._remove_arc(x, y)
                if not self._check(y, removed=x):
                    self._set(y, OFF, log)
                    stack.append(y)
        return log

    def on_propagation(self, seed: Node, log: ChangeLog | None = None) -> list[Node]:
        """Cascade from a node that was just turned (or treated as) ON.

        Visits in-neighbors only, adding the reciprocal arc to each. OFF
        in-neighbors that now saturate are lit and expanded; the others
        are returned as the stop set.
        """
        log = [] if log is None else log
        stop: list[Node] = []
        stack = [seed]
        while stack:
            x = stack.pop()
            for y in list(self.in_neighbors(x)):
                self._add_arc(x, y)
                if self.state[y]:
                    continue
                if self._check(y):
                    self._set(y, ON, log)
                    stack.append(y)
                else:
                    stop.append(y)
        return stop

    # -- stream maintenance ---------------------------------------------

    def _edge_pairs(self, v1: int, v2: int) -> Iterator[tuple[Node, Node]]:
        """(u1,v1)-MP / (u2,v2)-MP pairs for directed query edges (u1,u2)
        whose labels match the directed data edge, for both data orientations."""
        g = self.graph
        seen = set()
        for s, t in ((v1, v2), (v2, v1)):
            for a, b in self._qedges_by_labels.get((g.labels[s], g.labels[t]), ()):
                pair = ((a, s), (b, t))
                if pair not in seen:
                    seen.add(pair)
                    yield pair

    def update_for_deletion(self, v1: int, v2: int) -> ChangeLog:
        """Remove the arcs carried by data edge (v1, v2) and cascade OFF."""
        log: ChangeLog = []
        for x, y in self._edge_pairs(v1, v2):
            if (y, x) < (x, y):
                continue  # each undirected pair once; both arcs go together
            self._remove_arc(x, y)
            self._remove_arc(y, x)
            if not self.track_states:
                continue
            for node, gone in ((x, y), (y, x)):
                if self.state[node] and not self._check(node, removed=gone):
                    self._set(node, OFF, log)
                    self.off_propagation(node, log)
        return log

    def update_for_addition(self, v1: int, v2: int) -> ChangeLog:
        """Add the arcs carried by data edge (v1, v2) and cascade ON, then
        correct optimistic lighting from the stop set."""
        log: ChangeLog = []
        for x, y in self._edge_pairs(v1, v2):
            # arc toward x; the reverse arc is added when the mirrored pair
            # (y, x) comes round
            self._add_arc(y, x)
            if not self.track_states:
                continue
            if not self.state[x] and self._check(x):
                self._set(x, ON, log)
            if self.state[x]:
                stop = self.on_propagation(x, log)
                while stop:
                    s = stop.pop()
                    if not self.state[s]:
                        self.off_propagation(s, log)
        return log

    # -- queries --------------------------------------------------------

    def is_on(self, u: int, v: int) -> bool:
        return self.state.get((u, v), False)

    def candidates(self, u: int) -> set[int]:
        return {v for (u2, v), st in self.state.items() if u2 == u and st}

    def on_nodes(self) -> list[Node]:
        return sorted(n for n, st in self.state.items() if st)

    def node_count(self) -> int:
        return len(self.state)

    def arc_count(self) -> int:
        return sum(len(vs) for d in self.out_arcs.values() for vs in d.values())

    def states(self) -> dict[Node, bool]:
        return dict(self.state)

    def dump(self) -> str:
        lines = [f"mp {u} {v} {'ON' if st else 'OFF'}" for (u, v), st in sorted(self.state.items())]
        arcs = sorted((src, dst) for src in self.state for dst in self.out_neighbors(src))
        lines += [f"arc {a[0]} {a[1]} {b[0]} {b[1]}" for a, b in arcs]
        return "\n".join(lines) + "\n"


def construct(query: QueryGraph, graph: LabeledGraph, **options) -> CaLiGIndex:
    return CaLiGIndex.construct(query, graph, **options)


def fixpoint_states(query: QueryGraph, graph: LabeledGraph) -> dict[Node, bool]:
    """Greatest fixpoint of the lighting rule, computed by plain iteration.

    Start with every label-compatible pair ON and repeatedly drop any pair
    whose neighborhood, restricted to ON pairs adjacent in both graphs,
    has no saturating matching. Shares no propagation code with the index.
    """
    q, g = query, graph
    on = {(u, v) for u in range(q.vertex_count) for v in range(g.vertex_count)
          if q.labels[u] == g.labels[v]}
    changed = True
    while changed:
        changed = False
        for (u, v) in sorted(on):
            adj = {u2: {v2 for v2 in g.adjacency[v] if (u2, v2) in on} for u2 in q.adjacency[u]}
            if saturating_matching(sorted(q.adjacency[u]), adj) is None:
                on.discard((u, v))
                changed = True
    return {(u, v): ((u, v) in on) for u in range(q.vertex_count) for v in range(g.vertex_count)
            if q.labels[u] == g.labels[v]}
