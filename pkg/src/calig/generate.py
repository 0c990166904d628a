"""Seeded random instances: data graphs, sampled queries and update streams."""

from __future__ import annotations

import random

from .graph import LabeledGraph, OpKind, QueryGraph, UpdateOp


def random_graph(rng: random.Random, n: int, m: int, num_labels: int) -> LabeledGraph:
    """A random simple graph with ``n`` vertices and ``min(m, n(n-1)/2)`` edges."""
    labels = [rng.randrange(num_labels) for _ in range(n)]
    vocab = {str(i): i for i in range(num_labels)}
    g = LabeledGraph(labels, vocab=vocab)
    all_pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    for a, b in rng.sample(all_pairs, min(m, len(all_pairs))):
        g.add_edge(a, b)
    return g


def random_connected_query(rng: random.Random, k: int, num_labels: int,
                           extra_edge_prob: float = 0.3) -> QueryGraph:
    """A random spanning tree on ``k`` vertices plus random extra edges."""
    labels = [rng.randrange(num_labels) for _ in range(k)]
    g = LabeledGraph(labels, vocab={str(i): i for i in range(num_labels)})
    for v in range(1, k):
        g.add_edge(rng.randrange(v), v)
    for a in range(k):
        for b in range(a + 1, k):
            if not g.has_edge(a, b) and rng.random() < extra_edge_prob:
                g.add_edge(a, b)
    return QueryGraph.from_graph(g)


def sample_query(rng: random.Random, g: LabeledGraph, k: int,
                 keep_extra_prob: float = 0.5) -> QueryGraph | None:
    """Sample a connected ``k``-vertex subgraph of ``g`` as a query.

    Grows a vertex set by random frontier expansion, keeps the edges that
    discovered each vertex and every other induced edge with probability
    ``keep_extra_prob``. Returns None if no component has ``k`` vertices.
    """
    starts = [v for v in range(g.vertex_count) if g.adjacency[v]]
    rng.shuffle(starts)
    for start in starts[:20]:
        chosen = [start]
        tree = []
        frontier = {(start, w) for w in g.adjacency[start]}
        while len(chosen) < k and frontier:
            a, b = rng.choice(sorted(frontier))
            chosen.append(b)
            tree.append((a, b))
            inside = set(chosen)
            frontier = {(x, y) for x in chosen for y in g.adjacency[x] if y not in inside}
        if len(chosen) < k:
            continue
        pos = {v: i for i, v in enumerate(chosen)}
        q = LabeledGraph([g.labels[v] for v in chosen], vocab=g.vocab)
        for a, b in tree:
            q.add_edge(pos[a], pos[b])
        for a in chosen:
            for b in sorted(g.adjacency[a]):
                if b in pos and pos[a] < pos[b] and not q.has_edge(pos[a], pos[b]):
                    if rng.random() < keep_extra_prob:
                        q.add_edge(pos[a], pos[b])
        return QueryGraph.from_graph(q)
    return None


def random_stream(rng: random.Random, g: LabeledGraph, length: int,
                  delete_share: float = 2 / 3) -> list[UpdateOp]:
    """A valid mixed stream for ``g`` (not mutated).

    Each op deletes a present edge with probability ``delete_share`` and
    otherwise adds an absent one; re-adding a previously deleted edge is
    preferred half the time so that matches can reappear.
    """
    n = g.vertex_count
    present = set(g.edges())
    deleted: list[tuple[int, int]] = []
    ops: list[UpdateOp] = []
    for _ in range(length):
        delete = rng.random() < delete_share
        if delete and not present:
            delete = False
        if not delete and len(present) == n * (n - 1) // 2:
            delete = True
        if delete:
            a, b = rng.choice(sorted(present))
            present.discard((a, b))
            deleted.append((a, b))
            if rng.random() < 0.5:
                a, b = b, a
            ops.append(UpdateOp(OpKind.DELETE, a, b))
            continue
        readd = [e for e in deleted if e not in present]
        if readd and rng.random() < 0.5:
            a, b = rng.choice(readd)
        else:
            while True:
                a, b = sorted(rng.sample(range(n), 2))
                if (a, b) not in present:
                    break
        present.add((a, b))
        if rng.random() < 0.5:
            a, b = b, a
        ops.append(UpdateOp(OpKind.ADD, a, b))
    return ops


def random_session(seed: int, *, query_size: tuple[int, int] = (3, 6),
                   data_size: tuple[int, int] = (10, 40), max_labels: int = 4,
                   stream_length: int = 50):
    """(query, data graph, stream) for one seeded random session.

    The query is sampled from the data graph so that matches exist at the
    start. Edge counts give an average degree between 2.5 and 5.
    """
    rng = random.Random(seed)
    while True:
        n = rng.randint(*data_size)
        num_labels = rng.randint(1, max_labels)
        m = int(n * rng.uniform(1.25, 2.5))
        g = random_graph(rng, n, m, num_labels)
        q = sample_query(rng, g, rng.randint(*query_size))
        if q is not None:
            break
    q.vocab = g.vocab
    return q, g, random_stream(rng, g, stream_length)
