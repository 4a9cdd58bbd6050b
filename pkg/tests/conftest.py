# tests/conftest.py
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.strategies import DrawFn, composite

from trees.generators import alphabet, random_forest, random_tree
from trees.unranked import UnrankedTree, parse_term

SHARED = "f(f(g(a),g(a)),g(a),g(a))"
TWINS = "f(f(a,a,b),f(a,a,c))"

# a dag with child sequences A A2 A3 A4 A2 A3 C | A A A | A A B | A2 A3,
# RePair-compressed with D -> A2 A3 and E -> A A
COMPRESSED_TEXT = """\
A1 -> f(A,D,A4,D,C)
A2 -> g(E,A)
A3 -> h(E,B)
A4 -> f(D)
A -> a
B -> b
C -> c
D -> A2 A3
E -> A A
"""


@composite
def random_trees(draw: DrawFn, max_edges: int = 30, max_labels: int = 3) -> UnrankedTree:
    """Uniform random trees; hypothesis drives size, alphabet and the numpy seed."""
    n = draw(st.integers(min_value=0, max_value=max_edges))
    m = draw(st.integers(min_value=1, max_value=max_labels))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_tree(n, alphabet(m), np.random.default_rng(seed))


@composite
def random_forests(draw: DrawFn, max_trees: int = 4, max_edges: int = 12) -> list[UnrankedTree]:
    size = draw(st.integers(min_value=0, max_value=max_trees))
    m = draw(st.integers(min_value=1, max_value=3))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_forest(size, max_edges, alphabet(m), np.random.default_rng(seed))


@pytest.fixture
def shared_tree() -> UnrankedTree:
    return parse_term(SHARED)


@pytest.fixture
def twins() -> UnrankedTree:
    return parse_term(TWINS)


@pytest.fixture
def compressed_text() -> str:
    return COMPRESSED_TEXT


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)
