"""Brute-force ground truth for differential testing.

Nothing here uses the index, the search or the matching code: matches are
enumerated by plain backtracking over raw adjacency, and bigraph
saturation by trying every injection.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import permutations

from .bigraph import Bigraph
from .graph import LabeledGraph

MAX_QUERY = 8
MAX_DATA = 64
MAX_BIGRAPH_LEFT = 7


class OracleBoundError(ValueError):
    pass


@dataclass(frozen=True)
class Snapshot:
    fingerprint: str
    matches: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.matches)


def fingerprint(g: LabeledGraph) -> str:
    h = hashlib.sha256()
    h.update(repr(g.labels).encode())
    h.update(repr(g.edges()).encode())
    return h.hexdigest()[:16]


def enumerate_static(q: LabeledGraph, g: LabeledGraph) -> Snapshot:
    """Every injective label- and edge-preserving map of ``q`` into ``g``."""
    if q.vertex_count > MAX_QUERY:
        raise OracleBoundError(f"oracle refused: query has {q.vertex_count} vertices > {MAX_QUERY}")
    if g.vertex_count > MAX_DATA:
        raise OracleBoundError(f"oracle refused: data graph has {g.vertex_count} vertices > {MAX_DATA}")
    n = q.vertex_count
    earlier = [sorted(w for w in q.adjacency[u] if w < u) for u in range(n)]
    by_label: dict[int, list[int]] = {}
    for v in range(g.vertex_count):
        by_label.setdefault(g.labels[v], []).append(v)
    found: list[tuple[int, ...]] = []
    assign: list[int] = []

    def rec(u: int) -> None:
        if u == n:
            found.append(tuple(assign))
            return
        back = earlier[u]
        if back:
            # any valid image is adjacent to the first earlier neighbor's image
            pool = g.adjacency[assign[back[0]]]
            rest = back[1:]
        else:
            pool = by_label.get(q.labels[u], ())
            rest = back
        for v in pool:
            if g.labels[v] != q.labels[u] or v in assign:
                continue
            if all(v in g.adjacency[assign[w]] for w in rest):
                assign.append(v)
                rec(u + 1)
                assign.pop()

    rec(0)
    return Snapshot(fingerprint(g), tuple(sorted(found)))


def diff_snapshots(before: Snapshot, after: Snapshot) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """(added, removed) as sorted match vectors."""
    b, a = set(before.matches), set(after.matches)
    return sorted(a - b), sorted(b - a)


def exhaustive_injective(b: Bigraph) -> bool:
    """Saturation by trying every injection of the left side into the right."""
    if len(b.left) > MAX_BIGRAPH_LEFT:
        raise OracleBoundError(f"oracle refused: bigraph left side {len(b.left)} > {MAX_BIGRAPH_LEFT}")
    # injections are enumerated left vertex by left vertex; a prefix that
    # already uses a non-edge cannot extend to a valid injection
    taken: set[int] = set()

    def extend(i: int) -> bool:
        if i == len(b.left):
            return True
        x = b.left[i]
        for y in b.right:
            if y not in taken and (x, y) in b.edges:
                taken.add(y)
                if extend(i + 1):
                    return True
                taken.discard(y)
        return False

    return extend(0)


def exhaustive_injective_permutations(b: Bigraph) -> bool:
    """Same question by filtering all |left|-permutations of the right side."""
    if len(b.left) > MAX_BIGRAPH_LEFT:
        raise OracleBoundError(f"oracle refused: bigraph left side {len(b.left)} > {MAX_BIGRAPH_LEFT}")
    return any(all((x, y) in b.edges for x, y in zip(b.left, image))
               for image in permutations(b.right, len(b.left)))


def match_lines(sign: str, matches) -> list[str]:
    return [f"m {sign} " + " ".join(map(str, m)) for m in matches]
