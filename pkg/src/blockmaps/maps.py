"""Rooted planar maps encoded as rotation systems.

A map on ``2E`` darts is given by two permutations:

* ``twin`` pairs the two darts of every edge (a fixed-point-free involution);
* ``next`` sends a dart to its counterclockwise successor around its tail.

Vertices are the orbits of ``next`` and faces are the orbits of
``next o twin``.  The root is a dart ``rho``; its tail is ``rho^-`` and the
tail of ``twin[rho]`` is ``rho^+``.  The trivial map (one vertex, no edge) has
no darts and no root.

All functions here are pure; :class:`RootedMap` is immutable.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


@dataclass(frozen=True)
class RootedMap:
    twin: tuple[int, ...]
    next: tuple[int, ...]
    root: int | None

    def __post_init__(self):
        object.__setattr__(self, "twin", tuple(int(x) for x in self.twin))
        object.__setattr__(self, "next", tuple(int(x) for x in self.next))
        if self.root is not None:
            object.__setattr__(self, "root", int(self.root))

    @property
    def num_darts(self) -> int:
        return len(self.twin)

    @property
    def num_edges(self) -> int:
        return len(self.twin) // 2

    def is_trivial(self) -> bool:
        return len(self.twin) == 0

    def prev(self, d: int) -> int:
        """Clockwise neighbour of ``d`` around its tail."""
        e = d
        while self.next[e] != d:
            e = self.next[e]
        return e

    def rotation(self, d: int) -> list[int]:
        """Darts around the tail of ``d`` in counterclockwise order, starting at ``d``."""
        out = [d]
        e = self.next[d]
        while e != d:
            out.append(e)
            e = self.next[e]
        return out

    def vertex_of(self) -> list[int]:
        """Vertex index of every dart; vertices numbered by their smallest dart."""
        vid = [-1] * self.num_darts
        count = 0
        for d in range(self.num_darts):
            if vid[d] == -1:
                for e in self.rotation(d):
                    vid[e] = count
                count += 1
        return vid

    def num_vertices(self) -> int:
        if self.is_trivial():
            return 1
        return max(self.vertex_of()) + 1

    def num_faces(self) -> int:
        if self.is_trivial():
            return 1
        return _count_orbits([self.next[self.twin[d]] for d in range(self.num_darts)])

    def head(self, d: int) -> int:
        """A dart whose tail is the head of ``d``."""
        return self.twin[d]

    def to_dict(self) -> dict:
        if self.is_trivial():
            return {"num_darts": 0}
        return {
            "num_darts": self.num_darts,
            "twin": list(self.twin),
            "next": list(self.next),
            "root": self.root,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RootedMap":
        if data.get("num_darts", 0) == 0:
            return TRIVIAL
        return cls(tuple(data["twin"]), tuple(data["next"]), data["root"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RootedMap":
        return cls.from_dict(json.loads(text))


TRIVIAL = RootedMap((), (), None)


def _count_orbits(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    count = 0
    for d in range(len(perm)):
        if not seen[d]:
            count += 1
            e = d
            while not seen[e]:
                seen[e] = True
                e = perm[e]
    return count


def from_edges_rotation(rotations: Sequence[Sequence[int]], root: int) -> RootedMap:
    """Build a map from per-vertex counterclockwise lists of darts.

    Darts ``2i`` and ``2i + 1`` are the two halves of edge ``i``.
    """
    darts = sorted(d for rot in rotations for d in rot)
    nd = len(darts)
    if darts != list(range(nd)):
        raise ValueError("rotations must use darts 0..2E-1 exactly once")
    nxt = [0] * nd
    for rot in rotations:
        for i, d in enumerate(rot):
            nxt[d] = rot[(i + 1) % len(rot)]
    twin = [d ^ 1 for d in range(nd)]
    return RootedMap(tuple(twin), tuple(nxt), root)


# -- named small maps ---------------------------------------------------------

def loop_map() -> RootedMap:
    return RootedMap((1, 0), (1, 0), 0)


def link_map() -> RootedMap:
    return RootedMap((1, 0), (0, 1), 0)


def validate(m: RootedMap) -> list[str]:
    """Return a list of broken invariants; empty when ``m`` is a valid planar rooted map."""
    problems = []
    nd = m.num_darts
    if nd == 0:
        if len(m.next) != 0:
            problems.append("trivial map with non-empty next")
        if m.root is not None:
            problems.append("trivial map must not have a root")
        return problems
    if nd % 2:
        problems.append("odd number of darts")
    if len(m.next) != nd:
        problems.append("twin and next have different lengths")
        return problems
    if sorted(m.twin) != list(range(nd)):
        problems.append("twin is not a permutation")
        return problems
    if sorted(m.next) != list(range(nd)):
        problems.append("next is not a permutation")
        return problems
    if any(m.twin[m.twin[d]] != d for d in range(nd)):
        problems.append("twin is not an involution")
    if any(m.twin[d] == d for d in range(nd)):
        problems.append("twin not fixed-point-free")
    if m.root is None or not 0 <= m.root < nd:
        problems.append("root out of range")
    if problems:
        return problems
    if not _transitive(m):
        problems.append("not connected")
        return problems
    v = m.num_vertices()
    f = m.num_faces()
    if v - m.num_edges + f != 2:
        problems.append(f"Euler characteristic {v - m.num_edges + f} != 2 (not planar)")
    return problems


def _transitive(m: RootedMap) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        d = stack.pop()
        for e in (m.twin[d], m.next[d]):
            if e not in seen:
                seen.add(e)
                stack.append(e)
    return len(seen) == m.num_darts


def is_valid(m: RootedMap) -> bool:
    return not validate(m)


# -- canonical orders ---------------------------------------------------------

@dataclass(frozen=True)
class VertexOrdering:
    order: tuple[int, ...]
    rank: dict = field(compare=False)


@dataclass(frozen=True)
class SpanningTree:
    """BFS tree: ``parent_dart[v]`` is the dart from ``v`` towards its parent."""
    parent_dart: dict


def _bfs(m: RootedMap):
    vid = m.vertex_of()
    start = {vid[m.root]: m.root}
    order = [vid[m.root]]
    parent = {}
    queue = deque(order)
    while queue:
        v = queue.popleft()
        for d in m.rotation(start[v]):
            w = vid[m.twin[d]]
            if w not in start:
                # the first copy met in the scan becomes the tree edge
                start[w] = m.twin[d]
                parent[w] = m.twin[d]
                order.append(w)
                queue.append(w)
    return vid, order, parent, start


def bfs_order(m: RootedMap) -> VertexOrdering:
    """Vertices in breadth-first order from the root's tail.

    At the root vertex the scan starts at the root dart; elsewhere it starts
    at the dart pointing to the parent.
    """
    if m.is_trivial():
        return VertexOrdering((0,), {0: 0})
    _, order, _, _ = _bfs(m)
    return VertexOrdering(tuple(order), {v: i for i, v in enumerate(order)})


def bfs_tree(m: RootedMap) -> SpanningTree:
    if m.is_trivial():
        return SpanningTree({})
    _, _, parent, _ = _bfs(m)
    return SpanningTree(parent)


def corner_order(m: RootedMap) -> list[int]:
    """All darts sorted by BFS rank of their tail, then counterclockwise from the parent dart."""
    if m.is_trivial():
        return []
    _, order, _, start = _bfs(m)
    out = []
    for v in order:
        out.extend(m.rotation(start[v]))
    return out


def canonical(m: RootedMap) -> RootedMap:
    """Relabel darts by their rank in :func:`corner_order`; the root becomes dart 0.

    Two rooted maps are isomorphic iff their canonical forms are equal.
    """
    if m.is_trivial():
        return TRIVIAL
    order = corner_order(m)
    rank = [0] * m.num_darts
    for i, d in enumerate(order):
        rank[d] = i
    twin = [0] * m.num_darts
    nxt = [0] * m.num_darts
    for d in range(m.num_darts):
        twin[rank[d]] = rank[m.twin[d]]
        nxt[rank[d]] = rank[m.next[d]]
    return RootedMap(tuple(twin), tuple(nxt), 0)


def reroot(m: RootedMap, root: int) -> RootedMap:
    return RootedMap(m.twin, m.next, root)


def submap(m: RootedMap, darts: Iterable[int], root: int) -> tuple[RootedMap, list[int]]:
    """Induced sub-rotation-system on a twin-closed dart set.

    Returns the submap (darts relabelled ``0..k-1`` in increasing original
    order) and the list mapping new labels back to the original darts.
    """
    keep = sorted(set(darts))
    if not keep:
        return TRIVIAL, []
    local = {d: i for i, d in enumerate(keep)}
    twin = []
    nxt = []
    for d in keep:
        if m.twin[d] not in local:
            raise ValueError("dart set is not closed under twin")
        twin.append(local[m.twin[d]])
        e = m.next[d]
        while e not in local:
            e = m.next[e]
        nxt.append(local[e])
    return RootedMap(tuple(twin), tuple(nxt), local[root]), keep
