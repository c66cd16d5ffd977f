"""Brute-force ground truth at small sizes.

* plane trees with ``2n`` edges and even outdegrees, weighted by
  ``m(t) = prod_v C_{outdeg(v)/2}``, and the exact block-size laws they induce;
* every rooted map with at most three edges, by running over all rotation
  systems on a fixed edge pairing;
* every 2-connected rooted map with at most six edges.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

from .blocks import assemble, block_tree, is_two_connected
from .counting import count_maps, count_two_connected
from .maps import TRIVIAL, RootedMap, canonical, is_valid, link_map, loop_map, reroot
from .sampler import OrderedTree

TREE_CAP = 6
MAP_CAP = 3
BLOCK_CAP = 6


# -- even plane trees ---------------------------------------------------------

def enum_even_trees(n: int) -> list[OrderedTree]:
    """All plane trees with ``2n`` edges and even outdegrees, in lexicographic order of degrees."""
    if not 1 <= n <= TREE_CAP:
        raise ValueError(f"tree enumeration is capped at 1 <= n <= {TREE_CAP}")
    length = 2 * n + 1
    out = []

    def grow(prefix, height, left):
        # height = number of pending subtrees, left = edges not yet placed
        if len(prefix) == length:
            if height == 0 and left == 0:
                out.append(OrderedTree(prefix))
            return
        if height == 0:
            return
        slots = length - len(prefix)
        for d in range(left, -1, -2):
            h = height - 1 + d
            if h <= slots - 1:
                grow(prefix + [d], h, left - d)

    grow([], 1, 2 * n)
    out.sort(key=lambda t: tuple(-x for x in t.outdegrees))
    return out


def count_even_trees(n: int) -> int:
    """Closed count from the cycle lemma: ``binom(3n, n) / (2n + 1)``."""
    return math.comb(3 * n, n) // (2 * n + 1)


def tree_weight(tree) -> int:
    degrees = tree.outdegrees if isinstance(tree, OrderedTree) else tree
    w = 1
    for d in degrees:
        d = int(d)
        if d % 2:
            raise ValueError("odd outdegree")
        w *= count_two_connected(d // 2)
    return w


def weight_sum_check(n: int) -> bool:
    return sum(tree_weight(t) for t in enum_even_trees(n)) == count_maps(n)


def exact_tree_law(n: int) -> dict[tuple, Fraction]:
    """``P(T_n = t)`` keyed by the outdegree tuple of ``t``."""
    total = count_maps(n)
    return {tuple(int(x) for x in t.outdegrees): Fraction(tree_weight(t), total)
            for t in enum_even_trees(n)}


def _sizes(degrees) -> tuple:
    return tuple(sorted((int(d) // 2 for d in degrees if d), reverse=True))


def exact_size_law(n: int) -> dict[tuple, Fraction]:
    """Law of the descending block-size vector of a uniform map with ``n`` edges."""
    law = defaultdict(Fraction)
    for degrees, p in exact_tree_law(n).items():
        law[_sizes(degrees)] += p
    return dict(law)


def exact_block_law(n: int, k: int) -> dict[int, Fraction]:
    """Law of ``L_{n,k}``, the ``k``-th largest block size (0 when there are fewer blocks)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    law = defaultdict(Fraction)
    for sizes, p in exact_size_law(n).items():
        law[sizes[k - 1] if k <= len(sizes) else 0] += p
    return dict(law)


# -- maps from rotation systems ----------------------------------------------

def _key(m: RootedMap) -> tuple:
    return (m.twin, m.next)


@lru_cache(maxsize=None)
def _enum_maps(n: int) -> tuple:
    if n == 0:
        return (TRIVIAL,)
    nd = 2 * n
    twin = tuple(d ^ 1 for d in range(nd))
    found = set()
    for nxt in itertools.permutations(range(nd)):
        m = RootedMap(twin, nxt, 0)
        if not is_valid(m):
            continue
        for r in range(nd):
            found.add(canonical(reroot(m, r)))
    return tuple(sorted(found, key=_key))


def enum_maps(n: int) -> list[RootedMap]:
    """Every rooted planar map with ``n`` edges, as canonical forms."""
    if not 0 <= n <= MAP_CAP:
        raise ValueError(f"map enumeration is capped at n <= {MAP_CAP}")
    return list(_enum_maps(n))


def tree_shape(m: RootedMap) -> tuple:
    return tuple(block_tree(m).outdegrees())


def verify_prop1(n: int) -> bool:
    """Group maps by block-tree shape and compare with the tree weights.

    Each group must have ``m(t)`` members, and the tuples of blocks read off
    the group (in preorder) must be exactly the product of the sets of
    2-connected maps of the corresponding sizes.
    """
    groups = defaultdict(list)
    for m in enum_maps(n):
        t = block_tree(m)
        groups[tuple(t.outdegrees())].append(tuple(node.block for node in t.nodes()))
    trees = {tuple(t.outdegrees): t for t in enum_even_trees(n)} if n >= 1 else {(0,): None}
    if set(groups) != set(trees):
        return False
    for shape, members in groups.items():
        if len(members) != tree_weight(shape):
            return False
        expected = set(itertools.product(*(two_connected_maps(d // 2) for d in shape)))
        if set(members) != expected or len(set(members)) != len(members):
            return False
    return True


def roundtrip_check(n: int) -> bool:
    return all(canonical(assemble(block_tree(m))) == m for m in enum_maps(n))


# -- 2-connected maps ---------------------------------------------------------

def unrooted_key(m: RootedMap) -> tuple:
    return min(_key(canonical(reroot(m, r))) for r in range(m.num_darts))


def _insert_edge(m: RootedMap, a: int, b: int) -> RootedMap:
    """New edge with one dart placed right after ``a`` and the other right after ``b``."""
    nd = m.num_darts
    x, y = nd, nd + 1
    twin = list(m.twin) + [y, x]
    nxt = list(m.next) + [0, 0]
    nxt[x], nxt[a] = nxt[a], x
    nxt[y], nxt[b] = nxt[b], y
    return RootedMap(tuple(twin), tuple(nxt), m.root)


def _subdivide(m: RootedMap, d: int) -> RootedMap:
    """Split the edge of ``d`` by a new degree-2 vertex."""
    nd = m.num_darts
    t = m.twin[d]
    x, y = nd, nd + 1          # x at the new vertex facing d's tail, y towards t's tail
    twin = list(m.twin) + [0, 0]
    nxt = list(m.next) + [y, x]
    twin[d], twin[x] = x, d
    twin[t], twin[y] = y, t
    return RootedMap(tuple(twin), tuple(nxt), m.root)


def _grow(prev: list[RootedMap]) -> list[RootedMap]:
    reps = {}
    for m in prev:
        reps.setdefault(unrooted_key(m), m)
    found = {}
    for m in reps.values():
        vid = m.vertex_of()
        cands = [_subdivide(m, d) for d in range(m.num_darts)]
        cands += [_insert_edge(m, a, b) for a in range(m.num_darts) for b in range(m.num_darts)
                  if vid[a] != vid[b]]
        for c in cands:
            if is_valid(c) and is_two_connected(c):
                found.setdefault(unrooted_key(c), c)
    out = {canonical(reroot(c, r)) for c in found.values() for r in range(c.num_darts)}
    return sorted(out, key=_key)


@lru_cache(maxsize=None)
def _two_connected(k: int) -> tuple:
    if k == 0:
        return (TRIVIAL,)
    if k == 1:
        return tuple(sorted((canonical(loop_map()), canonical(link_map())), key=_key))
    if k <= MAP_CAP:
        return tuple(m for m in _enum_maps(k) if is_two_connected(m))
    return tuple(_grow(list(_two_connected(k - 1))))


def two_connected_maps(k: int) -> list[RootedMap]:
    """Every 2-connected rooted map with ``k`` edges (``k <= 6``), canonical and sorted."""
    if not 0 <= k <= BLOCK_CAP:
        raise ValueError("block enumeration cap exceeded")
    out = list(_two_connected(k))
    if len(out) != count_two_connected(k):
        raise AssertionError(f"2-connected cache for k={k} has {len(out)} maps")
    return out


def grown_two_connected(k: int) -> list[RootedMap]:
    """The growth construction run from the single 2-edge block, for cross-checking small k."""
    if k < 2:
        raise ValueError("k must be at least 2")
    cur = list(_two_connected(2))
    for _ in range(k - 2):
        cur = _grow(cur)
    return cur


# -- JSON ---------------------------------------------------------------------

def law_to_json(law: dict) -> str:
    """Law as ``{value: "p/q"}``; size vectors are written as ``"[3,1]"``."""
    def key(v):
        return json.dumps(list(v), separators=(",", ":")) if isinstance(v, tuple) else str(v)
    return json.dumps({key(v): f"{p.numerator}/{p.denominator}" for v, p in sorted(law.items())})


def law_from_json(text: str) -> dict:
    out = {}
    for k, v in json.loads(text).items():
        value = tuple(json.loads(k)) if k.startswith("[") else int(k)
        out[value] = Fraction(v)
    return out


def trees_to_json(trees) -> str:
    return json.dumps([[int(x) for x in t.outdegrees] for t in trees])


def maps_to_json(maps) -> str:
    return json.dumps([m.to_dict() for m in maps], separators=(",", ":"))
