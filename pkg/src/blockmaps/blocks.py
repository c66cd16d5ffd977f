"""Blocks of a rooted map and the plane tree encoding its block structure.

A map is separable when its edges split into two non-empty parts sharing
exactly one vertex.  Under this definition a loop together with any other
edge is separable, so every loop is a block on its own; parallel edges stay
distinct and live in the same block.

:func:`block_tree` and :func:`assemble` are mutually inverse: a map is
recovered from its block tree together with the (re-rooted) block attached
to each node.
"""

from __future__ import annotations

from dataclasses import dataclass

from .maps import TRIVIAL, RootedMap, canonical, corner_order, submap


@dataclass(frozen=True)
class Block:
    dart_ids: frozenset
    map: RootedMap


def _edge_id(m: RootedMap, d: int) -> int:
    return min(d, m.twin[d])


def _block_partition(m: RootedMap) -> list[list[int]]:
    """Edge-id lists of the blocks (low-link traversal, loops split off)."""
    vid = m.vertex_of()
    nv = max(vid) + 1
    darts_at = [[] for _ in range(nv)]
    for d in range(m.num_darts):
        darts_at[vid[d]].append(d)

    comps = []
    for d in range(m.num_darts):
        if vid[m.twin[d]] == vid[d] and d < m.twin[d]:
            comps.append([d])

    disc = [-1] * nv
    low = [0] * nv
    r = vid[m.root]
    disc[r] = low[r] = 0
    clock = 1
    edge_stack = []
    stack = [(r, None, iter(darts_at[r]))]
    while stack:
        v, pe, it = stack[-1]
        advanced = False
        for d in it:
            e = _edge_id(m, d)
            w = vid[m.twin[d]]
            if e == pe or w == v:
                continue
            if disc[w] == -1:
                edge_stack.append(e)
                disc[w] = low[w] = clock
                clock += 1
                stack.append((w, e, iter(darts_at[w])))
                advanced = True
                break
            if disc[w] < disc[v]:
                edge_stack.append(e)
                low[v] = min(low[v], disc[w])
        if advanced:
            continue
        stack.pop()
        if stack:
            u = stack[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= disc[u]:
                comp = []
                while True:
                    x = edge_stack.pop()
                    comp.append(x)
                    if x == pe:
                        break
                comps.append(comp)
    return comps


def blocks(m: RootedMap) -> tuple[list[Block], set[int]]:
    """Blocks of ``m`` and its cut vertices (as indices of :meth:`RootedMap.vertex_of`).

    The root block is rooted at the map's root; every other block is rooted
    at its first dart in corner order, i.e. the dart through which the
    breadth-first search enters it.  Blocks are listed in that order.
    """
    if m.is_trivial():
        return [], set()
    rank = [0] * m.num_darts
    for i, d in enumerate(corner_order(m)):
        rank[d] = i
    vid = m.vertex_of()
    out = []
    touching = {}
    for comp in _block_partition(m):
        darts = set()
        for e in comp:
            darts.add(e)
            darts.add(m.twin[e])
        if m.root in darts:
            root = m.root
        else:
            root = min(darts, key=rank.__getitem__)
        sub, _ = submap(m, darts, root)
        out.append(Block(frozenset(darts), sub))
        for v in {vid[d] for d in darts}:
            touching[v] = touching.get(v, 0) + 1
    out.sort(key=lambda b: -1 if m.root in b.dart_ids else rank[min(b.dart_ids, key=rank.__getitem__)])
    cut = {v for v, c in touching.items() if c > 1}
    return out, cut


def is_two_connected(m: RootedMap) -> bool:
    """True when ``m`` has at most one block (the trivial map counts as 2-connected)."""
    if m.num_edges <= 1:
        return True
    return len(_block_partition(m)) == 1


def root_block_darts(m: RootedMap) -> frozenset:
    for comp in _block_partition(m):
        darts = set(comp) | {m.twin[e] for e in comp}
        if m.root in darts:
            return frozenset(darts)
    raise AssertionError("root dart not covered by any block")


def _pendant_darts(m: RootedMap, root_block: frozenset, uv: int) -> list[int]:
    e = m.next[uv]
    if e in root_block:
        return []
    vid = m.vertex_of()
    u = vid[uv]
    found = set()
    stack = []
    while e not in root_block:
        found.add(e)
        stack.append(e)
        e = m.next[e]
    while stack:
        d = stack.pop()
        t = m.twin[d]
        if t not in found:
            found.add(t)
            stack.append(t)
        if vid[t] != u:
            for x in m.rotation(t):
                if x not in found:
                    found.add(x)
                    stack.append(x)
    return sorted(found)


def pendant_submap(m: RootedMap, uv: int) -> RootedMap:
    """Submap hanging in the corner to the left of root-block dart ``uv``.

    It is rooted at the counterclockwise successor of ``uv``; the trivial map
    is returned when that successor belongs to the root block.
    """
    rb = root_block_darts(m)
    if uv not in rb:
        raise ValueError("not a root-block dart")
    darts = _pendant_darts(m, rb, uv)
    if not darts:
        return TRIVIAL
    sub, _ = submap(m, darts, m.next[uv])
    return sub


@dataclass(frozen=True)
class BlockTree:
    """Node of the block tree: a (canonical) 2-connected block and its ordered children.

    Leaves carry the trivial map.  A node whose block has ``k`` edges has
    exactly ``2k`` children, one per corner of the block in corner order.
    """
    block: RootedMap
    children: tuple = ()

    def outdegrees(self) -> list[int]:
        """Outdegrees in depth-first (preorder) order."""
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            out.append(len(node.children))
            stack.extend(reversed(node.children))
        return out

    def nodes(self) -> list["BlockTree"]:
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    @property
    def num_edges(self) -> int:
        return sum(self.outdegrees()) // 2

    def block_sizes(self) -> list[int]:
        return sorted((node.block.num_edges for node in self.nodes() if node.children), reverse=True)


LEAF = BlockTree(TRIVIAL, ())


def block_tree(m: RootedMap) -> BlockTree:
    if m.is_trivial():
        return LEAF
    rb = root_block_darts(m)
    bmap, back = submap(m, rb, m.root)
    children = []
    for local in corner_order(bmap):
        a = back[local]
        if m.next[a] in rb:
            children.append(LEAF)
        else:
            sub, _ = submap(m, _pendant_darts(m, rb, a), m.next[a])
            children.append(block_tree(sub))
    return BlockTree(canonical(bmap), tuple(children))


def check_block_tree(t: BlockTree) -> list[str]:
    problems = []
    for node in t.nodes():
        if len(node.children) != 2 * node.block.num_edges:
            problems.append("degree/block mismatch")
        if node.children and not is_two_connected(node.block):
            problems.append("block is not 2-connected")
    return problems


def assemble(t: BlockTree) -> RootedMap:
    """Glue the blocks of ``t`` back into a map (inverse of :func:`block_tree`).

    The root edge of the map attached at child ``i`` is inserted right after
    the ``i``-th dart ``a_i`` of the parent block, counterclockwise around the
    tail of ``a_i``.
    """
    b = t.block
    if len(t.children) != 2 * b.num_edges:
        raise ValueError("degree/block mismatch")
    if b.is_trivial():
        return TRIVIAL
    twin = list(b.twin)
    nxt = list(b.next)
    for a, child in zip(corner_order(b), t.children):
        sub = assemble(child)
        if sub.is_trivial():
            continue
        off = len(twin)
        twin.extend(x + off for x in sub.twin)
        nxt.extend(x + off for x in sub.next)
        e = sub.root + off
        last = sub.prev(sub.root) + off
        nxt[last] = nxt[a]
        nxt[a] = e
    return RootedMap(tuple(twin), tuple(nxt), b.root)
