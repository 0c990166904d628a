import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from calig.bigraph import Bigraph
from calig.generate import random_connected_query, random_graph, random_session
from calig.graph import LabeledGraph, QueryGraph, apply_update
from calig.oracle import (MAX_DATA, MAX_QUERY, OracleBoundError, Snapshot, diff_snapshots,
                          enumerate_static, exhaustive_injective, match_lines)


def permutation_filter(q: LabeledGraph, g: LabeledGraph) -> list[tuple[int, ...]]:
    """Second brute force: every ordered |V_Q|-selection of data vertices."""
    out = []
    for image in itertools.permutations(range(g.vertex_count), q.vertex_count):
        if any(q.labels[u] != g.labels[v] for u, v in enumerate(image)):
            continue
        if all(g.has_edge(image[a], image[b]) for a, b in q.edges()):
            out.append(image)
    return sorted(out)


def test_running_example_has_one_match(running):
    q, g, _ = running
    snap = enumerate_static(q, g)
    assert snap.matches == ((3, 4, 1, 6),)


@pytest.mark.parametrize("a,b", [(1, 1), (2, 3), (4, 5)])
def test_single_edge_counts(a, b):
    q = QueryGraph.from_graph(LabeledGraph([0, 1], [(0, 1)]))
    g = LabeledGraph([0] * a + [1] * b, [(x, a + y) for x in range(a) for y in range(b)])
    assert len(enumerate_static(q, g)) == a * b


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_agrees_with_permutation_filter(seed):
    rng = random.Random(seed)
    labels = rng.randint(1, 3)
    q = random_connected_query(rng, rng.randint(2, 4), labels)
    g = random_graph(rng, rng.randint(2, 8), rng.randint(1, 16), labels)
    assert list(enumerate_static(q, g).matches) == permutation_filter(q, g)


def test_snapshot_sorted_and_unique():
    for seed in range(20):
        q, g, _ = random_session(seed)
        snap = enumerate_static(q, g)
        assert list(snap.matches) == sorted(set(snap.matches))


def test_identical_snapshots_diff_empty(running):
    q, g, _ = running
    snap = enumerate_static(q, g)
    assert diff_snapshots(snap, snap) == ([], [])


def test_running_example_removed_vector(running):
    q, g, ops = running
    before = enumerate_static(q, g)
    apply_update(g, ops[0])
    after = enumerate_static(q, g)
    assert diff_snapshots(before, after) == ([], [(3, 4, 1, 6)])
    apply_update(g, ops[1])
    assert diff_snapshots(after, enumerate_static(q, g)) == ([(3, 6, 2, 5)], [])


@pytest.mark.parametrize("seed", range(10))
def test_diff_inverts_stream_application(seed):
    q, g, ops = random_session(seed)
    before = enumerate_static(q, g)
    for op in ops[:15]:
        apply_update(g, op)
        after = enumerate_static(q, g)
        added, removed = diff_snapshots(before, after)
        rebuilt = (set(before.matches) - set(removed)) | set(added)
        assert rebuilt == set(after.matches)
        before = after


def test_bounds_are_refused():
    big_q = QueryGraph.from_graph(LabeledGraph([0] * (MAX_QUERY + 1), [(i, i + 1) for i in range(MAX_QUERY)]))
    with pytest.raises(OracleBoundError, match="query"):
        enumerate_static(big_q, LabeledGraph([0, 0], [(0, 1)]))
    q = QueryGraph.from_graph(LabeledGraph([0, 0], [(0, 1)]))
    with pytest.raises(OracleBoundError, match="data"):
        enumerate_static(q, LabeledGraph([0] * (MAX_DATA + 1)))
    with pytest.raises(OracleBoundError):
        exhaustive_injective(Bigraph(list(range(8)), list(range(8)), set()))


def test_running_bigraph_without_injection():
    # two query neighbors competing for one data neighbor
    b = Bigraph([0, 2], [3], {(0, 3), (2, 3)})
    assert not exhaustive_injective(b)


@pytest.mark.parametrize("k", range(1, 6))
def test_complete_bipartite_saturates(k):
    b = Bigraph(list(range(k)), list(range(10, 10 + k)), {(x, 10 + y) for x in range(k) for y in range(k)})
    assert exhaustive_injective(b)


@pytest.mark.parametrize("seed", range(10))
def test_relabeling_data_vertices_is_harmless(seed):
    q, g, _ = random_session(seed)
    rng = random.Random(seed)
    perm = list(range(g.vertex_count))
    rng.shuffle(perm)
    labels = [0] * g.vertex_count
    for v, pv in enumerate(perm):
        labels[pv] = g.labels[v]
    h = LabeledGraph(labels, [(perm[a], perm[b]) for a, b in g.edges()])
    inverse = {pv: v for v, pv in enumerate(perm)}
    back = sorted(tuple(inverse[x] for x in m) for m in enumerate_static(q, h).matches)
    assert back == list(enumerate_static(q, g).matches)


def test_match_lines_format():
    assert match_lines("-", [(3, 4, 1, 6)]) == ["m - 3 4 1 6"]


def test_fingerprint_tracks_edges(running):
    q, g, ops = running
    first = enumerate_static(q, g).fingerprint
    apply_update(g, ops[0])
    assert enumerate_static(q, g).fingerprint != first
    assert isinstance(enumerate_static(q, g), Snapshot)
