# dags/families.py
from __future__ import annotations

from typing import Callable

from dags.dag import Dag
from dags.grammar import ReducedGrammar, reduced_grammar
from trees.unranked import UnrankedTree


def _check(n: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")


def comb_family(n: int) -> UnrankedTree:
    """f with n children g(a): dag n+1 edges, bdag 2n."""
    _check(n)
    ga = UnrankedTree.build("g", [UnrankedTree.leaf("a")])
    return UnrankedTree.build("f", [ga] * n)


def staircase_family(n: int) -> UnrankedTree:
    """
    v_n = f(a^n) and v_i = f(v_{i+1}, a^(n-1)); the tree is v_1.
    The dag has n^2 edges while bdag and hdag have 3n-2.
    """
    _check(n)
    a = UnrankedTree.leaf("a")
    v = UnrankedTree.build("f", [a] * n)
    for _ in range(n - 1):
        v = UnrankedTree.build("f", [v] + [a] * (n - 1))
    return v


def suffix_family(n: int) -> ReducedGrammar:
    """
    Rules A_i -> f(A_{i+1}, ..., A_n, a^n) for 0 <= i <= n. The tree is
    exponential in n, so only its grammar is built: dag 3n(n+1)/2, hdag 3n.
    """
    _check(n)
    # node 0 is a, node n - i + 1 is A_i
    labels = ("a",) + ("f",) * (n + 1)
    children = [()]
    for node in range(1, n + 2):
        children.append(tuple(range(node - 1, 0, -1)) + (0,) * n)
    return reduced_grammar(Dag(labels, tuple(children), (n + 1,)))


def doubling_dag(n: int) -> Dag:
    """v_0 = a, v_i = f(v_{i-1}, v_{i-1}): 2n dag edges, 2(2^n - 1) tree edges."""
    _check(n)
    labels = ("a",) + ("f",) * n
    children = ((),) + tuple((i - 1, i - 1) for i in range(1, n + 1))
    return Dag(labels, children, (n,))


def wide_tree(k: int) -> UnrankedTree:
    """f(a, ..., a) with k children."""
    _check(k)
    return UnrankedTree.build("f", [UnrankedTree.leaf("a")] * k)


FAMILIES: dict[str, Callable[[int], UnrankedTree | ReducedGrammar]] = {
    "tn": comb_family,
    "sn": staircase_family,
    "thm3": suffix_family,
    # alias named after what the family builds
    "sfx": suffix_family,
}


def witness_family(name: str, n: int) -> UnrankedTree | ReducedGrammar:
    try:
        build = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None
    return build(n)
