# grammars/queries.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from dags.dag import BudgetExceeded, Dag, EvalConfig, eval_dag, is_minimal
from dags.grammar import SingleNodeDag
from dags.hybrid import HybridConfig, HybridDag, hdag_from_dag
from grammars.compressed import CompressedDag, Item, normalize_right_regular
from grammars.strings import (
    AccessIndex,
    ExpandConfig,
    Nonterminal,
    SLStringGrammar,
    StringSymbol,
    Word,
    expand,
    random_access,
)
from trees.binary import BinaryTree, counts_as_edge
from trees.unranked import Label, PositionOutOfRange, UnrankedTree

logger = logging.getLogger(__name__)


class NonMinimalCompressedDag(ValueError):
    pass


class IndexSource(str, Enum):
    DAG = "dag"
    BDAG = "bdag"
    COMPRESSED = "compressed"
    HDAG = "hdag"


def _hat(name: str) -> Nonterminal:
    # `'` never occurs in parsed rule names
    return Nonterminal(f"{name}'")


@dataclass(frozen=True)
class _PreorderGrammar:
    grammar: SLStringGrammar
    start: Word
    access: AccessIndex
    names: tuple[str, ...]

    @classmethod
    def build(cls, rules: dict[Nonterminal, Word], start: Word, names: tuple[str, ...]) -> _PreorderGrammar:
        grammar = SLStringGrammar(rules)
        return cls(grammar, start, AccessIndex.build(grammar, start), names)

    @property
    def length(self) -> int:
        return self.access.total

    def symbol_name(self, s: StringSymbol) -> str:
        return self.names[s] if isinstance(s, int) else str(s)

    def render(self) -> str:
        return self.grammar.render(self.symbol_name, self.start)


@dataclass(frozen=True)
class SubtreeIndex:
    """
    String grammar G' deriving, for every preorder position of the tree,
    the dag node its subtree belongs to. For a bdag the node stands for the
    sibling sequence starting there, so subtree equality also compares
    labels and left children.
    """

    source: IndexSource
    preorder: _PreorderGrammar
    labels: tuple[Label, ...]
    left: tuple[int, ...]
    dag: Dag

    @property
    def node_count(self) -> int:
        return self.preorder.length

    @property
    def grammar(self) -> SLStringGrammar:
        return self.preorder.grammar

    def node_at(self, p: int) -> int:
        return random_access(self.preorder.access, p)

    def expansion(self, cfg: ExpandConfig = ExpandConfig()) -> list[int]:
        return expand(self.preorder.grammar, self.preorder.start, cfg)

    def expansion_text(self, cfg: ExpandConfig = ExpandConfig()) -> str:
        return " ".join(self.preorder.symbol_name(s) for s in self.expansion(cfg))

    def subtree(self, p: int, cfg: EvalConfig = EvalConfig()) -> UnrankedTree | BinaryTree:
        """The dag unfolding at p; for a bdag this is the encoded sibling sequence."""
        return eval_dag(self.dag, self.node_at(p), cfg)

    def render(self) -> str:
        return self.preorder.render()


def _dag_subtree_index(d: Dag) -> SubtreeIndex:
    if not is_minimal(d):
        raise ValueError("subtree equality needs a minimal dag")
    names = tuple(f"A{v}" for v in range(d.node_count))
    rules: dict[Nonterminal, Word] = {}
    left = [-1] * d.node_count
    for v in range(d.node_count):
        if not counts_as_edge(d.labels[v]):
            continue
        if d.binary:
            left[v] = d.children[v][0]
        rules[_hat(names[v])] = (v, *(_hat(names[c]) for c in d.counted_children(v)))
    preorder = _PreorderGrammar.build(rules, (_hat(names[d.root]),), names)
    source = IndexSource.BDAG if d.binary else IndexSource.DAG
    return SubtreeIndex(source, preorder, d.labels, tuple(left), d)


def _compressed_subtree_index(c: CompressedDag, source: IndexSource) -> SubtreeIndex:
    # minimality is checked on the expanded child words, so this step costs
    # the size of the plain dag rather than of the compressed one
    try:
        expanded = c.expanded_dag()
    except BudgetExceeded as exc:
        raise BudgetExceeded(f"child words are too long to check minimality: {exc}") from exc
    if not is_minimal(expanded):
        raise NonMinimalCompressedDag("the compressed dag does not unfold from a minimal dag")

    def hat(a: Item) -> StringSymbol:
        return a if isinstance(a, Nonterminal) else _hat(c.names[a])

    rules: dict[Nonterminal, Word] = {}
    for v in range(c.node_count):
        rules[_hat(c.names[v])] = (v, *(hat(a) for a in c.words[v]))
    for x, rhs in c.grammar.rules.items():
        rules[x] = tuple(hat(a) for a in rhs)
    preorder = _PreorderGrammar.build(rules, (_hat(c.names[c.root]),), c.names)
    return SubtreeIndex(source, preorder, c.labels, (-1,) * c.node_count, expanded)


def build_subtree_index(g: Dag | CompressedDag | HybridDag) -> SubtreeIndex:
    """
    Linear-size index; the tree itself is never unfolded. Compressed inputs
    have their child words expanded once to check minimality.
    """
    if isinstance(g, HybridDag):
        idx = _compressed_subtree_index(normalize_right_regular(g), IndexSource.HDAG)
    elif isinstance(g, CompressedDag):
        idx = _compressed_subtree_index(g, IndexSource.COMPRESSED)
    else:
        idx = _dag_subtree_index(g)
    logger.debug("subtree index over %s: |G'| = %d, N = %d", idx.source.value, idx.grammar.size, idx.node_count)
    return idx


def subtree_eq(idx: SubtreeIndex, p: int, q: int) -> bool:
    """t/p == t/q."""
    yp, yq = idx.node_at(p), idx.node_at(q)
    if idx.source is not IndexSource.BDAG:
        return yp == yq
    return idx.labels[yp] == idx.labels[yq] and idx.left[yp] == idx.left[yq]


@dataclass(frozen=True)
class SibseqIndex:
    """
    String grammar G' of length N - 1 whose (p - 1)-th symbol names the
    sibling sequence starting at preorder position p > 1. For a bdag the
    subtree grammar already does this for every position.
    """

    source: IndexSource
    preorder: _PreorderGrammar | None
    node_count: int

    @property
    def grammar(self) -> SLStringGrammar:
        return self.preorder.grammar if self.preorder else SLStringGrammar()

    def expansion(self, cfg: ExpandConfig = ExpandConfig()) -> list[StringSymbol]:
        if self.preorder is None:
            return []
        return expand(self.preorder.grammar, self.preorder.start, cfg)

    def expansion_text(self, cfg: ExpandConfig = ExpandConfig()) -> str:
        if self.preorder is None:
            return ""
        return " ".join(self.preorder.symbol_name(s) for s in self.expansion(cfg))

    def render(self) -> str:
        return self.preorder.render() if self.preorder else ""


def _hdag_sibseq_grammar(c: CompressedDag) -> _PreorderGrammar:
    rules: dict[Nonterminal, Word] = {}
    for v in range(c.node_count):
        rules[_hat(c.names[v])] = tuple(_hat(str(x)) for x in c.words[v])
    for x, rhs in c.grammar.rules.items():
        head = _hat(c.names[rhs[0]])
        rules[_hat(str(x))] = (x, head, *(_hat(str(y)) for y in rhs[1:]))
    return _PreorderGrammar.build(rules, (_hat(c.names[c.root]),), c.names)


def build_sibseq_index(g: Dag | HybridDag) -> SibseqIndex:
    if isinstance(g, Dag) and g.binary:
        sub = _dag_subtree_index(g)
        return SibseqIndex(IndexSource.BDAG, sub.preorder, sub.node_count)
    if isinstance(g, Dag):
        if not is_minimal(g):
            raise ValueError("sibling equality needs a minimal dag")
        try:
            h = hdag_from_dag(g, HybridConfig())
        except SingleNodeDag:
            return SibseqIndex(IndexSource.DAG, None, 1)
        source = IndexSource.DAG
    else:
        h = g
        source = IndexSource.HDAG
    preorder = _hdag_sibseq_grammar(normalize_right_regular(h))
    return SibseqIndex(source, preorder, preorder.length + 1)


def sibseq_eq(idx: SibseqIndex, p: int, q: int) -> bool:
    """sibseq(p) == sibseq(q)."""
    for r in (p, q):
        if not 1 <= r <= idx.node_count:
            raise PositionOutOfRange(f"preorder position {r} outside 1..{idx.node_count}")
    if idx.source is IndexSource.BDAG:
        assert idx.preorder is not None
        return random_access(idx.preorder.access, p) == random_access(idx.preorder.access, q)
    if p == q:
        return True
    # the root's sequence is the whole tree, which no other position starts
    if p == 1 or q == 1:
        return False
    assert idx.preorder is not None
    return random_access(idx.preorder.access, p - 1) == random_access(idx.preorder.access, q - 1)
