"""Vertex-labeled undirected graphs, file loaders and stream mutation."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable


class GraphFormatError(ValueError):
    """A line of a graph or stream file could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class GraphValidationError(ValueError):
    """The file parsed but describes an invalid graph or operation."""


class UpdateConflict(ValueError):
    """Add of an existing edge or delete of a missing edge."""


class QueryError(ValueError):
    pass


class OpKind(enum.Enum):
    ADD = "+"
    DELETE = "-"


@dataclass(frozen=True)
class UpdateOp:
    kind: OpKind
    u_end: int
    v_end: int

    def __post_init__(self):
        if self.u_end == self.v_end:
            raise GraphValidationError(f"self-loop update on vertex {self.u_end}")

    @property
    def edge(self) -> tuple[int, int]:
        return (self.u_end, self.v_end)

    def __str__(self) -> str:
        return f"{self.kind.value} {self.u_end} {self.v_end}"


class LabeledGraph:
    """Simple undirected graph with one integer label per vertex.

    ``vocab`` maps label tokens as written in files to the dense integer
    ids stored in ``labels``. Query and data graphs loaded for the same
    session must share one vocab so that equal tokens get equal ids.
    """

    def __init__(self, labels: Iterable[int], edges: Iterable[tuple[int, int]] = (),
                 vocab: dict[str, int] | None = None):
        self.labels: list[int] = list(labels)
        self.adjacency: list[set[int]] = [set() for _ in self.labels]
        self.edge_count = 0
        self.vocab = vocab if vocab is not None else {}
        for a, b in edges:
            self.add_edge(a, b)

    @property
    def vertex_count(self) -> int:
        return len(self.labels)

    @property
    def max_degree(self) -> int:
        return max((len(nbrs) for nbrs in self.adjacency), default=0)

    def label(self, v: int) -> int:
        return self.labels[v]

    def neighbors(self, v: int) -> set[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adjacency[a]

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < len(self.labels):
            raise GraphValidationError(f"vertex {v} out of range 0..{len(self.labels) - 1}")

    def add_edge(self, a: int, b: int) -> None:
        self._check_vertex(a)
        self._check_vertex(b)
        if a == b:
            raise GraphValidationError(f"self-loop on vertex {a}")
        if b in self.adjacency[a]:
            raise GraphValidationError(f"duplicate edge ({a}, {b})")
        self.adjacency[a].add(b)
        self.adjacency[b].add(a)
        self.edge_count += 1

    def remove_edge(self, a: int, b: int) -> None:
        self.adjacency[a].remove(b)
        self.adjacency[b].remove(a)
        self.edge_count -= 1

    def edges(self) -> list[tuple[int, int]]:
        """Sorted edge list with the smaller endpoint first."""
        return sorted((a, b) for a in range(len(self.labels)) for b in self.adjacency[a] if a < b)

    def copy(self) -> "LabeledGraph":
        g = LabeledGraph(self.labels, vocab=self.vocab)
        g.adjacency = [set(nbrs) for nbrs in self.adjacency]
        g.edge_count = self.edge_count
        return g

    def label_token(self, label: int) -> str:
        for token, ident in self.vocab.items():
            if ident == label:
                return token
        return str(label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self.labels == other.labels and self.adjacency == other.adjacency

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.vertex_count}, m={self.edge_count})"


class QueryGraph(LabeledGraph):
    """A connected query graph with at least two vertices.

    ``bfs_order`` is the connectivity certificate: a breadth-first visit
    order from vertex 0 that reaches every vertex.
    """

    bfs_order: list[int]

    @classmethod
    def from_graph(cls, g: LabeledGraph) -> "QueryGraph":
        if g.vertex_count < 2:
            raise QueryError("query graph needs at least two vertices")
        order = bfs_order(g, 0)
        if len(order) != g.vertex_count:
            raise QueryError("query graph is not connected")
        q = cls(g.labels, vocab=g.vocab)
        q.adjacency = [set(nbrs) for nbrs in g.adjacency]
        q.edge_count = g.edge_count
        q.bfs_order = order
        return q


def bfs_order(g: LabeledGraph, start: int) -> list[int]:
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for b in sorted(g.adjacency[a]):
            if b not in seen:
                seen.add(b)
                order.append(b)
                queue.append(b)
    return order


def is_connected(g: LabeledGraph) -> bool:
    return g.vertex_count == 0 or len(bfs_order(g, 0)) == g.vertex_count


def _content_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line_no, line.split()


def _parse_int(token: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"expected an integer, got {token!r}", line_no) from None


def load_graph(text: str, vocab: dict[str, int] | None = None) -> LabeledGraph:
    """Parse the ``t``/``v``/``e`` graph format.

    Label tokens are interned into ``vocab`` (created if not given) in
    order of first appearance.
    """
    vocab = {} if vocab is None else vocab
    header: tuple[int, int] | None = None
    labels: list[int] = []
    g: LabeledGraph | None = None
    for line_no, parts in _content_lines(text):
        tag = parts[0]
        if tag == "t":
            if header is not None:
                raise GraphFormatError("second 't' header", line_no)
            if len(parts) != 3:
                raise GraphFormatError("expected 't <num_vertices> <num_edges>'", line_no)
            header = (_parse_int(parts[1], line_no), _parse_int(parts[2], line_no))
        elif tag == "v":
            if header is None:
                raise GraphFormatError("'v' line before 't' header", line_no)
            if g is not None:
                raise GraphFormatError("'v' line after the first 'e' line", line_no)
            if len(parts) != 3:
                raise GraphFormatError("expected 'v <id> <label>'", line_no)
            vid = _parse_int(parts[1], line_no)
            if vid != len(labels):
                raise GraphValidationError(f"line {line_no}: vertex id {vid} out of order, expected {len(labels)}")
            labels.append(vocab.setdefault(parts[2], len(vocab)))
        elif tag == "e":
            if header is None:
                raise GraphFormatError("'e' line before 't' header", line_no)
            if len(parts) != 3:
                raise GraphFormatError("expected 'e <src> <dst>'", line_no)
            if g is None:
                g = LabeledGraph(labels, vocab=vocab)
            a, b = _parse_int(parts[1], line_no), _parse_int(parts[2], line_no)
            try:
                g.add_edge(a, b)
            except GraphValidationError as exc:
                raise GraphValidationError(f"line {line_no}: {exc}") from None
        else:
            raise GraphFormatError(f"unknown line tag {tag!r}", line_no)
    if header is None:
        raise GraphFormatError("missing 't' header")
    if g is None:
        g = LabeledGraph(labels, vocab=vocab)
    n, m = header
    if g.vertex_count != n:
        raise GraphValidationError(f"header declares {n} vertices, found {g.vertex_count}")
    if g.edge_count != m:
        raise GraphValidationError(f"header declares {m} edges, found {g.edge_count}")
    return g


def serialize_graph(g: LabeledGraph) -> str:
    lines = [f"t {g.vertex_count} {g.edge_count}"]
    lines += [f"v {v} {g.label_token(lab)}" for v, lab in enumerate(g.labels)]
    lines += [f"e {a} {b}" for a, b in g.edges()]
    return "\n".join(lines) + "\n"


def load_query(text: str, vocab: dict[str, int] | None = None) -> QueryGraph:
    return QueryGraph.from_graph(load_graph(text, vocab))


def load_update_stream(text: str, vertex_count: int | None = None) -> list[UpdateOp]:
    ops = []
    for line_no, parts in _content_lines(text):
        if len(parts) != 3:
            raise GraphFormatError("expected '+|- <src> <dst>'", line_no)
        try:
            kind = OpKind(parts[0])
        except ValueError:
            raise GraphFormatError(f"unknown operation tag {parts[0]!r}", line_no) from None
        a, b = _parse_int(parts[1], line_no), _parse_int(parts[2], line_no)
        if vertex_count is not None:
            for x in (a, b):
                if not 0 <= x < vertex_count:
                    raise GraphValidationError(f"line {line_no}: endpoint {x} out of range 0..{vertex_count - 1}")
        if a == b:
            raise GraphValidationError(f"line {line_no}: self-loop update on vertex {a}")
        ops.append(UpdateOp(kind, a, b))
    return ops


def serialize_stream(ops: Iterable[UpdateOp]) -> str:
    return "".join(f"{op}\n" for op in ops)


def apply_update(g: LabeledGraph, op: UpdateOp) -> LabeledGraph:
    """Apply one stream operation in place.

    Raises UpdateConflict for an add of a present edge or a delete of an
    absent one; the graph is left untouched in that case.
    """
    a, b = op.u_end, op.v_end
    g._check_vertex(a)
    g._check_vertex(b)
    present = g.has_edge(a, b)
    if op.kind is OpKind.ADD:
        if present:
            raise UpdateConflict(f"edge ({a}, {b}) already present")
        g.add_edge(a, b)
    else:
        if not present:
            raise UpdateConflict(f"edge ({a}, {b}) not present")
        g.remove_edge(a, b)
    return g
