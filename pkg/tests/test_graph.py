import random

import pytest
from hypothesis import given, settings, strategies as st

from calig.graph import (GraphFormatError, GraphValidationError, LabeledGraph, OpKind, QueryError,
                         QueryGraph, UpdateConflict, UpdateOp, apply_update, bfs_order, is_connected,
                         load_graph, load_query, load_update_stream, serialize_graph, serialize_stream)
from calig.generate import random_graph


def test_smallest_graph():
    g = load_graph("t 2 1\nv 0 0\nv 1 1\ne 0 1\n")
    assert g.vertex_count == 2
    assert g.edge_count == 1
    assert g.labels == [0, 1]
    assert g.max_degree == 1


def test_running_data_graph(running):
    _, g, _ = running
    assert g.vertex_count == 7
    counts = {}
    for lab in g.labels:
        token = g.label_token(lab)
        counts[token] = counts.get(token, 0) + 1
    assert counts == {"A": 1, "B": 3, "C": 3}


def test_shared_vocab_interns_labels_consistently(running):
    q, g, _ = running
    assert q.labels[0] == g.labels[3]  # both "A"
    assert q.labels[2] == g.labels[0]  # both "B"


@pytest.mark.parametrize("text, exc", [
    ("t 2 1\nv 0 A\nv 1 B\ne 0 0\n", GraphValidationError),
    ("t 2 2\nv 0 A\nv 1 B\ne 0 1\ne 1 0\n", GraphValidationError),
    ("t 2 1\nv 0 A\nv 1 B\ne 0 5\n", GraphValidationError),
    ("t 2 1\nv 0 A\nv 1 B\nx 0 1\n", GraphFormatError),
    ("t 2 1\nv 0 A\nv 1 B\ne 0 one\n", GraphFormatError),
    ("v 0 A\n", GraphFormatError),
    ("t 3 0\nv 0 A\nv 1 B\n", GraphValidationError),
    ("t 2 0\nv 1 A\nv 0 B\n", GraphValidationError),
])
def test_load_rejects(text, exc):
    with pytest.raises(exc):
        load_graph(text)


def test_parse_error_carries_line_number():
    with pytest.raises(GraphFormatError) as info:
        load_graph("# header comment\nt 1 0\nbogus line\n")
    assert info.value.line_no == 3
    assert "line 3" in str(info.value)


def test_comments_and_blank_lines_ignored():
    g = load_graph("# c\n\nt 2 1\n# mid\nv 0 x\nv 1 x\n\ne 1 0\n")
    assert g.edges() == [(0, 1)]


def test_stream_in_file_order():
    ops = load_update_stream("- 4 6\n+ 2 6\n")
    assert ops == [UpdateOp(OpKind.DELETE, 4, 6), UpdateOp(OpKind.ADD, 2, 6)]


def test_empty_stream():
    assert load_update_stream("") == []
    assert load_update_stream("# nothing\n") == []


def test_stream_rejects():
    with pytest.raises(GraphValidationError):
        load_update_stream("+ 0 99\n", vertex_count=7)
    with pytest.raises(GraphFormatError):
        load_update_stream("* 0 1\n")
    with pytest.raises(GraphValidationError):
        load_update_stream("+ 3 3\n")


def test_delete_running_edge(running):
    _, g, _ = running
    before = g.edge_count
    apply_update(g, UpdateOp(OpKind.DELETE, 4, 6))
    assert g.edge_count == before - 1
    assert not g.has_edge(6, 4)


def test_add_then_delete_restores(running):
    _, g, _ = running
    original = g.copy()
    apply_update(g, UpdateOp(OpKind.ADD, 2, 6))
    apply_update(g, UpdateOp(OpKind.DELETE, 6, 2))
    assert g == original
    assert g.edge_count == original.edge_count


def test_conflicting_updates_leave_graph_untouched(running):
    _, g, _ = running
    original = g.copy()
    with pytest.raises(UpdateConflict):
        apply_update(g, UpdateOp(OpKind.ADD, 4, 6))
    with pytest.raises(UpdateConflict):
        apply_update(g, UpdateOp(OpKind.DELETE, 0, 1))
    assert g == original


def test_query_must_be_connected():
    with pytest.raises(QueryError):
        load_query("t 4 2\nv 0 a\nv 1 a\nv 2 a\nv 3 a\ne 0 1\ne 2 3\n")
    with pytest.raises(QueryError):
        load_query("t 1 0\nv 0 a\n")
    q = load_query("t 3 2\nv 0 a\nv 1 a\nv 2 a\ne 0 2\ne 2 1\n")
    assert sorted(q.bfs_order) == [0, 1, 2]


def _check_invariants(g: LabeledGraph):
    for v, nbrs in enumerate(g.adjacency):
        assert v not in nbrs
        for w in nbrs:
            assert v in g.adjacency[w]
    assert g.edge_count * 2 == sum(len(n) for n in g.adjacency)
    assert g.max_degree == max((len(n) for n in g.adjacency), default=0)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 15), ops=st.integers(0, 40))
def test_replay_equals_rebuild(seed, n, ops):
    rng = random.Random(seed)
    g = random_graph(rng, n, rng.randint(0, n * 2), 3)
    for _ in range(ops):
        a, b = rng.sample(range(n), 2)
        kind = OpKind.DELETE if g.has_edge(a, b) else OpKind.ADD
        apply_update(g, UpdateOp(kind, a, b))
        _check_invariants(g)
    rebuilt = LabeledGraph(g.labels, g.edges())
    assert rebuilt == g
    assert rebuilt.edge_count == g.edge_count


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 20))
def test_serialize_round_trip(seed, n):
    rng = random.Random(seed)
    g = random_graph(rng, n, rng.randint(0, 3 * n), 4)
    text = serialize_graph(g)
    h = load_graph(text, dict(g.vocab))
    assert h == g
    assert serialize_graph(h) == text


def test_stream_round_trip():
    ops = [UpdateOp(OpKind.ADD, 1, 2), UpdateOp(OpKind.DELETE, 5, 0)]
    assert load_update_stream(serialize_stream(ops)) == ops


def _reachable(g, start):
    seen, todo = {start}, [start]
    while todo:
        x = todo.pop()
        for y in g.adjacency[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 12))
def test_connectivity_agrees_with_reachability(seed, n):
    rng = random.Random(seed)
    g = random_graph(rng, n, rng.randint(0, n + 2), 2)
    connected = all(_reachable(g, v) == set(range(n)) for v in range(n))
    assert is_connected(g) == connected
    if n >= 2:
        if connected:
            assert isinstance(QueryGraph.from_graph(g), QueryGraph)
        else:
            with pytest.raises(QueryError):
                QueryGraph.from_graph(g)
    assert set(bfs_order(g, 0)) == _reachable(g, 0)
