# tests/test_trees.py
from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings

from tests.conftest import SHARED, random_forests, random_trees
from trees.binary import (
    BinaryTree,
    Encoding,
    decode,
    encode,
    fcns,
    fcns_inverse,
    lcps,
    lcps_inverse,
    mirror_binary,
    parse_binary_term,
)
from trees.generators import all_binary_trees, all_unranked_trees, alphabet, from_degrees, random_tree, trees_up_to
from trees.terms import TermSyntaxError
from trees.unranked import (
    PLACEHOLDER,
    PositionOutOfRange,
    UnrankedTree,
    mirror,
    mirror_forest,
    parse_term,
    sibseq_at,
    subtree_at,
)


def _seq(trees_: list[UnrankedTree]) -> tuple[str, ...]:
    return tuple(t.to_term() for t in trees_)


# --- terms ---


@pytest.mark.parametrize(
    "text, nodes, edges",
    [
        ("a", 1, 0),
        (SHARED, 10, 9),
        ("f(a,f(b,a),b,a)", 7, 6),
        ("  f ( a , b )  ", 3, 2),
    ],
)
def test_parse_term_sizes(text, nodes, edges):
    t = parse_term(text)
    assert t.node_count == nodes
    assert t.edge_count == edges


def test_term_round_trip():
    assert parse_term(SHARED).to_term() == SHARED


@pytest.mark.parametrize(
    "text, offset",
    [
        ("", 0),
        ("f(a,)", 4),
        ("f(a", 3),
        ("a b", 2),
        ("f(a))", 4),
    ],
)
def test_parse_term_errors_carry_byte_offset(text, offset):
    with pytest.raises(TermSyntaxError) as exc:
        parse_term(text)
    assert exc.value.offset == offset


def test_placeholder_is_not_a_label():
    with pytest.raises(ValueError):
        UnrankedTree.leaf(PLACEHOLDER)


def test_empty_labels_are_rejected():
    with pytest.raises(ValueError, match="non-empty"):
        UnrankedTree.leaf("")
    with pytest.raises(ValueError, match="non-empty"):
        UnrankedTree(("f", ""), ((1,), ()))


def test_deep_chain_parses_without_recursion():
    depth = 5000
    text = "a(" * depth + "a" + ")" * depth
    t = parse_term(text)
    assert t.depth == depth
    assert t.to_term() == text


# --- unranked ---


def test_shape_statistics():
    t = parse_term(SHARED)
    assert t.depth == 3
    assert t.max_children == 3
    assert t.internal_count == 6
    assert t.subtree_size(1) == 5


def test_from_adjacency_renumbers_into_preorder():
    t = UnrankedTree.from_adjacency({"r": "f", "x": "a", "y": "g", "z": "b"}, {"r": ["y", "x"], "y": ["z"]}, "r")
    assert t.to_term() == "f(g(b),a)"


def test_subtree_and_sibseq_at():
    t = parse_term("f(a,f(b,a),b,a)")
    assert subtree_at(t, 1) == t
    assert subtree_at(t, 3).to_term() == "f(b,a)"
    assert _seq(sibseq_at(t, 1)) == ("f(a,f(b,a),b,a)",)
    assert _seq(sibseq_at(t, 3)) == ("f(b,a)", "b", "a")
    with pytest.raises(PositionOutOfRange):
        subtree_at(t, 0)
    with pytest.raises(IndexError):
        sibseq_at(t, 8)


def test_distinct_sibling_sequences_of_example_tree():
    t = parse_term("f(a,f(b,a),b,a)")
    distinct = {_seq(sibseq_at(t, p)) for p in range(1, t.node_count + 1)}
    assert distinct == {
        ("f(a,f(b,a),b,a)",),
        ("a", "f(b,a)", "b", "a"),
        ("f(b,a)", "b", "a"),
        ("b", "a"),
        ("a",),
    }


def test_distinct_subtrees_of_shared_tree():
    t = parse_term(SHARED)
    distinct = {subtree_at(t, p) for p in range(1, t.node_count + 1)}
    assert {s.to_term() for s in distinct} == {"a", "g(a)", "f(g(a),g(a))", SHARED}


def test_mirror():
    assert mirror(parse_term("f(a,g(b,c))")).to_term() == "f(g(c,b),a)"


# --- binary encodings ---


def test_fcns_of_a_forest():
    forest = [parse_term("f(a1,a2,a3)"), parse_term("g(b1,b2)")]
    b = fcns(forest)
    assert b.to_term() == "f(a1(_,a2(_,a3)),g(b1(_,b2),_))"
    assert _seq(fcns_inverse(b)) == ("f(a1,a2,a3)", "g(b1,b2)")


def test_lcps_of_a_forest():
    forest = [parse_term("f(a1,a2,a3)"), parse_term("g(b1,b2)")]
    b = lcps(forest)
    assert b.to_term() == "g(f(_,a3(a2(a1,_),_)),b2(b1,_))"
    assert _seq(lcps_inverse(b)) == ("f(a1,a2,a3)", "g(b1,b2)")


def test_single_leaf_and_empty_forest():
    assert fcns(parse_term("a")) == BinaryTree.leaf("a")
    assert lcps(parse_term("a")) == BinaryTree.leaf("a")
    assert fcns([]) == BinaryTree.empty()
    assert fcns_inverse(BinaryTree.empty()) == []


def test_single_child_sides_differ():
    left = parse_binary_term("g(a,_)")
    right = parse_binary_term("g(_,a)")
    assert left != right
    assert left.edge_size == right.edge_size == 1


def test_binary_term_errors():
    with pytest.raises(TermSyntaxError):
        parse_binary_term("f(a)")
    with pytest.raises(TermSyntaxError):
        parse_binary_term("_(a,b)")


@given(random_forests())
@settings(max_examples=200, deadline=None)
def test_encodings_are_bijective(forest):
    for encoding in Encoding:
        assert decode(encode(forest, encoding), encoding) == forest


@given(random_forests())
@settings(max_examples=200, deadline=None)
def test_lcps_is_mirrored_fcns(forest):
    assert lcps(forest) == mirror_binary(fcns(mirror_forest(forest)))


@given(random_trees())
@settings(max_examples=200, deadline=None)
def test_fcns_preserves_sizes(t):
    b = fcns(t)
    assert b.node_size == t.node_count
    assert b.edge_size == t.edge_count


def test_exhaustive_round_trip_small_trees():
    for t in trees_up_to(6, ("a", "b")):
        for encoding in Encoding:
            assert decode(encode(t, encoding), encoding) == [t]


# --- generators ---


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
@pytest.mark.parametrize("m", [1, 2])
def test_enumeration_counts(n, m):
    catalan = math.comb(2 * n, n) // (n + 1)
    assert len(all_unranked_trees(n, alphabet(m))) == catalan * m ** (n + 1)
    catalan_next = math.comb(2 * n + 2, n + 1) // (n + 2)
    assert len(all_binary_trees(n, alphabet(m))) == catalan_next * m ** (n + 1)


def test_enumerations_have_no_duplicates():
    unranked = all_unranked_trees(4, ("a", "b"))
    binary = all_binary_trees(3, ("a", "b"))
    assert len(set(unranked)) == len(unranked)
    assert len(set(binary)) == len(binary)
    assert all(b.edge_size == 3 for b in binary)


def test_random_tree_respects_size_and_alphabet(rng):
    for n in (0, 1, 7, 50):
        t = random_tree(n, ("a", "b"), rng)
        assert t.edge_count == n
        assert set(t.labels) <= {"a", "b"}


def test_random_tree_reaches_every_shape():
    rng = np.random.default_rng(1)
    seen = Counter(random_tree(3, ("a",), rng).to_term() for _ in range(2000))
    assert set(seen) == {t.to_term() for t in all_unranked_trees(3, ("a",))}
    # five shapes, roughly 400 draws each
    assert min(seen.values()) > 250


def test_random_tree_is_seeded():
    a = random_tree(40, alphabet(3), np.random.default_rng(11))
    b = random_tree(40, alphabet(3), np.random.default_rng(11))
    assert a == b


def test_alphabet_bounds():
    assert alphabet(3) == ("a", "b", "c")
    with pytest.raises(ValueError):
        alphabet(0)


def test_from_degrees_builds_preorder_shape():
    t = from_degrees([3, 0, 2, 0, 0, 0], ["f", "a", "g", "b", "b", "a"])
    assert t.to_term() == "f(a,g(b,b),a)"
    with pytest.raises(ValueError):
        from_degrees([2, 0], ["f", "a"])
