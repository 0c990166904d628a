"""Saturating (injective) matchings on small bipartite graphs.

A bigraph is given by its left vertices and, for each left vertex, the set
of right vertices it is joined to. Right vertices that have no edge are
irrelevant to saturation and need not be listed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Collection, Mapping

NO_FAST_PATH = 0
CASE_EMPTY_LEFT = 1     # some left vertex has no incident edge
CASE_SHORT_RIGHT = 2    # fewer touched right vertices than left vertices


@dataclass
class Bigraph:
    left: list[int]
    right: list[int]
    edges: set[tuple[int, int]] = field(default_factory=set)

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {x: set() for x in self.left}
        for x, y in self.edges:
            adj[x].add(y)
        return adj


def fast_negative(left: Collection[int], adj: Mapping[int, Collection[int]]) -> int:
    """Return which cheap Hall violation applies, or NO_FAST_PATH."""
    touched: set[int] = set()
    for x in left:
        ys = adj.get(x)
        if not ys:
            return CASE_EMPTY_LEFT
        touched.update(ys)
    if len(touched) < len(left):
        return CASE_SHORT_RIGHT
    return NO_FAST_PATH


def max_matching(left: Collection[int], adj: Mapping[int, Collection[int]]) -> dict[int, int]:
    """Maximum matching by augmenting paths, seeded greedily.

    Returns a dict left -> right. Iterative DFS, so deep augmenting paths
    do not touch the interpreter recursion limit.
    """
    match_l: dict[int, int] = {}
    match_r: dict[int, int] = {}
    for x in left:
        for y in adj.get(x, ()):
            if y not in match_r:
                match_l[x] = y
                match_r[y] = x
                break
    for root in left:
        if root in match_l:
            continue
        # DFS over alternating paths; parent maps a right vertex to the left
        # vertex it was reached from.
        parent: dict[int, int] = {}
        stack = [(root, iter(adj.get(root, ())))]
        end = None
        while stack and end is None:
            x, it = stack[-1]
            for y in it:
                if y in parent:
                    continue
                parent[y] = x
                nxt = match_r.get(y)
                if nxt is None:
                    end = y
                    break
                stack.append((nxt, iter(adj.get(nxt, ()))))
                break
            else:
                stack.pop()
        if end is None:
            continue
        y = end
        while True:
            x = parent[y]
            prev = match_l.get(x)
            match_l[x] = y
            match_r[y] = x
            if x == root:
                break
            y = prev
    return match_l


def saturating_matching(left: Collection[int], adj: Mapping[int, Collection[int]]) -> dict[int, int] | None:
    """A matching covering every left vertex, or None if none exists."""
    if fast_negative(left, adj):
        return None
    m = max_matching(left, adj)
    return m if len(m) == len(left) else None


def saturates(left: Collection[int], adj: Mapping[int, Collection[int]]) -> bool:
    return saturating_matching(left, adj) is not None


def has_injective_matching(b: Bigraph) -> bool:
    """True iff ``b`` has a matching that saturates every left vertex."""
    return saturates(b.left, b.adjacency())


def every_left_has_edge(left: Collection[int], adj: Mapping[int, Collection[int]]) -> bool:
    """The weak per-vertex check used when injectivity testing is disabled."""
    return all(adj.get(x) for x in left)
