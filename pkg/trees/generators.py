# trees/generators.py
from __future__ import annotations

import string
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from trees.binary import BinaryTree
from trees.unranked import UnrankedTree

LETTERS = tuple(string.ascii_lowercase)


def alphabet(m: int) -> tuple[str, ...]:
    if not 1 <= m <= len(LETTERS):
        raise ValueError(f"label count must be in 1..{len(LETTERS)}")
    return LETTERS[:m]


def from_degrees(degrees: Sequence[int], labels: Sequence[str]) -> UnrankedTree:
    """Tree whose preorder out-degree sequence is `degrees`."""
    children: list[list[int]] = [[] for _ in degrees]
    remaining = list(degrees)
    stack: list[int] = []
    for i, d in enumerate(degrees):
        if stack:
            p = stack[-1]
            children[p].append(i)
            remaining[p] -= 1
            if remaining[p] == 0:
                stack.pop()
        if d > 0:
            stack.append(i)
    if stack:
        raise ValueError("degree sequence does not describe a tree")
    return UnrankedTree(tuple(labels), tuple(tuple(kids) for kids in children))


def random_tree(n_edges: int, labels: Sequence[str], rng: np.random.Generator) -> UnrankedTree:
    """
    Uniform random ordered tree with `n_edges` edges and uniform labels.

    A random word with n child marks and n+1 node marks is read cyclically as a
    degree sequence; the cycle lemma picks the unique rotation that is a valid
    preorder degree sequence.
    """
    if n_edges < 0:
        raise ValueError("n_edges must be >= 0")
    total = 2 * n_edges + 1
    marks = np.zeros(total, dtype=bool)
    if n_edges:
        marks[rng.choice(total, size=n_edges, replace=False)] = True

    degrees: list[int] = []
    run = 0
    for is_child in marks:
        if is_child:
            run += 1
        else:
            degrees.append(run)
            run = 0
    degrees[0] += run

    prefix = np.cumsum(np.asarray(degrees) - 1)
    k = int(np.argmin(prefix))
    degrees = degrees[k + 1:] + degrees[: k + 1]

    picks = rng.integers(len(labels), size=n_edges + 1)
    return from_degrees(degrees, [labels[int(i)] for i in picks])


def random_forest(size: int, max_edges: int, labels: Sequence[str], rng: np.random.Generator) -> list[UnrankedTree]:
    return [random_tree(int(rng.integers(0, max_edges + 1)), labels, rng) for _ in range(size)]


@lru_cache(maxsize=None)
def _forests(nodes: int, labels: tuple[str, ...]) -> tuple[tuple[UnrankedTree, ...], ...]:
    if nodes == 0:
        return ((),)
    out = []
    for first in range(1, nodes + 1):
        for head in _trees(first, labels):
            for tail in _forests(nodes - first, labels):
                out.append((head, *tail))
    return tuple(out)


@lru_cache(maxsize=None)
def _trees(nodes: int, labels: tuple[str, ...]) -> tuple[UnrankedTree, ...]:
    return tuple(
        UnrankedTree.build(label, forest)
        for label in labels
        for forest in _forests(nodes - 1, labels)
    )


def all_unranked_trees(n_edges: int, labels: Sequence[str]) -> tuple[UnrankedTree, ...]:
    """Every ordered labeled tree with exactly `n_edges` edges."""
    if n_edges < 0:
        raise ValueError("n_edges must be >= 0")
    return _trees(n_edges + 1, tuple(labels))


def trees_up_to(max_nodes: int, labels: Sequence[str]) -> Iterator[UnrankedTree]:
    for nodes in range(1, max_nodes + 1):
        yield from _trees(nodes, tuple(labels))


@lru_cache(maxsize=None)
def _binary(nodes: int, labels: tuple[str, ...]) -> tuple[BinaryTree | None, ...]:
    if nodes == 0:
        return (None,)
    out = []
    for label in labels:
        for left_nodes in range(nodes):
            for left in _binary(left_nodes, labels):
                for right in _binary(nodes - 1 - left_nodes, labels):
                    out.append(BinaryTree.build(label, left, right))
    return tuple(out)


def all_binary_trees(n_edges: int, labels: Sequence[str]) -> tuple[BinaryTree, ...]:
    """Binary trees with `n_edges` counted edges; a lone left child differs from a lone right child."""
    if n_edges < 0:
        raise ValueError("n_edges must be >= 0")
    return tuple(t for t in _binary(n_edges + 1, tuple(labels)) if t is not None)
