from collections import Counter
from fractions import Fraction

import pytest

from blockmaps.blocks import block_tree, is_two_connected
from blockmaps.counting import count_maps, count_two_connected
from blockmaps.maps import is_valid
from blockmaps.oracle import (count_even_trees, enum_even_trees, enum_maps, exact_block_law,
                              exact_size_law, exact_tree_law, grown_two_connected, law_from_json,
                              law_to_json, maps_to_json, tree_shape, tree_weight, trees_to_json,
                              two_connected_maps, unrooted_key, verify_prop1, weight_sum_check)


def test_enum_even_trees_examples():
    assert [t.outdegrees.tolist() for t in enum_even_trees(1)] == [[2, 0, 0]]
    assert sorted(tuple(t.outdegrees.tolist()) for t in enum_even_trees(2)) == sorted(
        [(4, 0, 0, 0, 0), (2, 2, 0, 0, 0), (2, 0, 2, 0, 0)])
    with pytest.raises(ValueError):
        enum_even_trees(7)
    with pytest.raises(ValueError):
        enum_even_trees(0)


@pytest.mark.parametrize("n", range(1, 7))
def test_enum_even_trees_matches_closed_count(n):
    trees = enum_even_trees(n)
    assert len(trees) == count_even_trees(n)
    assert len(set(trees)) == len(trees)
    assert all(all(d % 2 == 0 for d in t.outdegrees) and len(t) == 2 * n + 1 for t in trees)


def test_tree_weight():
    assert tree_weight([2, 0, 0]) == 2
    assert tree_weight([4, 0, 0, 0, 0]) == 1
    assert tree_weight([2, 2, 0, 0, 0]) == 4
    with pytest.raises(ValueError, match="odd outdegree"):
        tree_weight([3, 0, 0, 0])


@pytest.mark.parametrize("n", range(1, 7))
def test_weight_sums(n):
    assert weight_sum_check(n)


def test_weight_sum_n2_by_hand():
    assert sorted(tree_weight(t) for t in enum_even_trees(2)) == [1, 4, 4]
    assert count_maps(2) == 9


def test_exact_block_law_examples():
    assert exact_block_law(2, 1) == {2: Fraction(1, 9), 1: Fraction(8, 9)}
    assert exact_block_law(2, 2) == {0: Fraction(1, 9), 1: Fraction(8, 9)}
    assert exact_block_law(1, 1) == {1: Fraction(1)}
    with pytest.raises(ValueError):
        exact_block_law(2, 0)


@pytest.mark.parametrize("n", range(1, 7))
def test_exact_laws_are_probability_laws(n):
    for law in (exact_tree_law(n), exact_size_law(n), exact_block_law(n, 1), exact_block_law(n, 3)):
        assert sum(law.values()) == 1 and all(p > 0 for p in law.values())
    mean = sum(v * p for v, p in exact_block_law(n, 1).items())
    direct = Fraction(sum(tree_weight(t) * max(t.outdegrees.tolist()) // 2 for t in enum_even_trees(n)),
                      count_maps(n))
    assert mean == direct
    assert all(sum(s) == n for s in exact_size_law(n))


def test_enum_maps_counts_and_validity():
    for n in range(4):
        maps = enum_maps(n)
        assert len(maps) == count_maps(n)
        assert len(set(maps)) == len(maps)
        if n:
            assert all(is_valid(m) for m in maps)
    with pytest.raises(ValueError):
        enum_maps(4)


def test_verify_prop1():
    for n in range(4):
        assert verify_prop1(n)
    sizes = Counter(tree_shape(m) for m in enum_maps(1))
    assert list(sizes.values()) == [2]
    assert sorted(Counter(tree_shape(m) for m in enum_maps(2)).values()) == [1, 4, 4]


def test_block_law_from_maps_matches_trees():
    # block sizes read directly off the enumerated maps
    for n in (2, 3):
        c = Counter(tuple(block_tree(m).block_sizes()) for m in enum_maps(n))
        assert {k: Fraction(v, count_maps(n)) for k, v in c.items()} == exact_size_law(n)


def test_two_connected_cache():
    for k in range(7):
        maps = two_connected_maps(k)
        assert len(maps) == count_two_connected(k)
        assert len(set(maps)) == len(maps)
        assert all(is_two_connected(m) and (k == 0 or is_valid(m)) for m in maps)
        assert all(m.num_edges == k for m in maps)
    with pytest.raises(ValueError, match="block enumeration cap exceeded"):
        two_connected_maps(7)


def test_growth_matches_brute_force():
    for k in (2, 3):
        assert grown_two_connected(k) == two_connected_maps(k)
    # the four-edge blocks: the 4-cycle, the triangle with a doubled edge, four parallel edges
    assert len({unrooted_key(m) for m in two_connected_maps(4)}) == 3


def test_json_dumps():
    law = exact_block_law(3, 1)
    assert law_from_json(law_to_json(law)) == law
    vec = exact_size_law(3)
    assert law_from_json(law_to_json(vec)) == vec
    assert '"[3]": "' in law_to_json(vec)
    assert trees_to_json(enum_even_trees(1)) == "[[2, 0, 0]]"
    assert maps_to_json(two_connected_maps(0)) == '[{"num_darts":0}]'
