# dags/hybrid.py
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from dags.dag import Dag, EvalConfig, eval_dag, minimize
from dags.grammar import ReducedGrammar, RuleRef, SingleNodeDag, reduced_grammar
from trees.binary import NO_CHILD, BinaryTree, Encoding, counts_as_edge, decode, encode
from trees.terms import RULE_SYMBOL, TermSyntaxError, parse_nested, render_term, split_rules
from trees.unranked import PLACEHOLDER, Label, UnrankedTree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuleRoot:
    """Root label of an encoded right-hand side, annotated with its rule."""

    rule: int
    label: Label

    def __str__(self) -> str:
        return f"A{self.rule}:{self.label}"


@dataclass(frozen=True)
class HybridConfig:
    encoding: Encoding = Encoding.FCNS
    # Inline rules referenced only once before encoding; edge size is unchanged.
    inline_single_use: bool = False


@dataclass(frozen=True)
class HybridDag:
    grammar: ReducedGrammar
    shared: Dag
    encoding: Encoding
    kept_rules: tuple[int, ...]
    inlined: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return self.shared.edge_size

    @property
    def node_size(self) -> int:
        return self.shared.node_size

    @cached_property
    def _root_of(self) -> dict[int, int]:
        return dict(zip(self.kept_rules, self.shared.roots))

    def rule_root(self, rule: int) -> int:
        return self._root_of[rule]

    def first_child(self, rule: int) -> int:
        """Shared node holding the encoded child sequence of `rule` (□ when empty)."""
        root = self.rule_root(rule)
        left, right = self.shared.children[root]
        return left if self.encoding is Encoding.FCNS else right

    def render(self) -> str:
        return render_shared(self.shared)


def _right_hand_sides(g: ReducedGrammar, inline: bool) -> tuple[list[int], dict[int, UnrankedTree], list[int]]:
    uses = Counter(s.node for r in g.rules for s in r.children if isinstance(s, RuleRef))
    inlined = {r.nonterminal for r in g.rules[1:] if inline and uses[r.nonterminal] == 1}
    kept = [r.nonterminal for r in g.rules if r.nonterminal not in inlined]

    trees: dict[int, UnrankedTree] = {}
    for rule in kept:
        labels: list[Label] = []
        kids: list[list[int]] = []
        # (symbol, parent index); rules marked for inlining are expanded in place
        stack: list[tuple[object, int]] = [(RuleRoot(rule, g.rule(rule).label), NO_CHILD)]
        while stack:
            symbol, parent = stack.pop()
            idx = len(labels)
            kids.append([])
            if parent != NO_CHILD:
                kids[parent].append(idx)
            if isinstance(symbol, RuleRoot):
                labels.append(symbol)
                body = g.rule(rule).children
            elif isinstance(symbol, RuleRef) and symbol.node in inlined:
                labels.append(g.rule(symbol.node).label)
                body = g.rule(symbol.node).children
            else:
                labels.append(symbol)
                body = ()
            stack.extend((s, idx) for s in reversed(body))
        trees[rule] = UnrankedTree(tuple(labels), tuple(tuple(k) for k in kids))
    return kept, trees, sorted(inlined)


def hdag_from_dag(d: Dag, cfg: HybridConfig = HybridConfig()) -> HybridDag:
    """Hybrid dag of the tree represented by a minimal dag; the tree is never built."""
    g = reduced_grammar(d)
    kept, trees, inlined = _right_hand_sides(g, cfg.inline_single_use)
    if inlined:
        logger.debug("inlined %d single-use rules", len(inlined))
    shared = minimize([encode(trees[rule], cfg.encoding) for rule in kept])
    return HybridDag(g, shared, cfg.encoding, tuple(kept), tuple(inlined))


def build_hdag(t: UnrankedTree, cfg: HybridConfig = HybridConfig()) -> HybridDag:
    if t.edge_count < 1:
        raise SingleNodeDag("hybrid dags need a tree with at least one edge")
    return hdag_from_dag(minimize(t), cfg)


def unfold_shared(shared: Dag, encoding: Encoding, cfg: EvalConfig = EvalConfig()) -> UnrankedTree:
    """
    Three passes: unshare each encoded right-hand side, decode it, then
    unfold the dag those right-hand sides describe. The first root is the start.
    """
    labels: dict[object, Label] = {}
    children: dict[object, tuple[object, ...]] = {}
    start = None
    for r in shared.roots:
        (rhs,) = decode(eval_dag(shared, r, cfg), encoding)
        top = rhs.labels[0]
        if not isinstance(top, RuleRoot):
            raise ValueError("shared dag roots must carry rule annotations")
        start = top.rule if start is None else start
        for i, label in enumerate(rhs.labels):
            key = (top.rule, i)
            if i == 0:
                label = top.label
            labels[key] = label
            children[key] = tuple(
                (rhs.labels[c].node, 0) if isinstance(rhs.labels[c], RuleRef) else (top.rule, c)
                for c in rhs.children[i]
            )
    d = Dag.from_adjacency(labels, children, [(start, 0)])
    return eval_dag(d, d.root, cfg)


def unfold_hdag(h: HybridDag, cfg: EvalConfig = EvalConfig()) -> UnrankedTree:
    return unfold_shared(h.shared, h.encoding, cfg)


def render_shared(shared: Dag) -> str:
    """
    Roots print as `A3:f(...)`; inner nodes with several parents get
    `H<k> -> ...` lines numbered in order of first visit.
    """
    indegree: Counter[int] = Counter()
    for v in range(shared.node_count):
        for c in shared.children[v]:
            if counts_as_edge(shared.labels[c]):
                indegree[c] += 1
    roots = set(shared.roots)

    names: dict[int, str] = {}
    seen: set[int] = set()
    for r in shared.roots:
        stack = [r]
        while stack:
            v = stack.pop()
            if v in seen or not counts_as_edge(shared.labels[v]) or shared.is_leaf(v):
                continue
            seen.add(v)
            if v not in roots and indegree[v] >= 2:
                names[v] = f"H{len(names) + 1}"
            stack.extend(reversed(shared.children[v]))

    def symbol(item: object) -> str:
        v = item if isinstance(item, int) else item[1]
        if not counts_as_edge(shared.labels[v]):
            return "_"
        if isinstance(item, int) and (v in names or v in roots):
            return names.get(v, f"A{shared.labels[v].rule}")
        return str(shared.labels[v])

    def kids(item: object) -> tuple[object, ...]:
        v = item if isinstance(item, int) else item[1]
        if not counts_as_edge(shared.labels[v]) or shared.is_leaf(v):
            return ()
        if isinstance(item, int) and (v in names or v in roots):
            return ()
        return tuple(shared.children[v])

    lines = [render_term(("def", r), symbol, kids) for r in shared.roots]
    lines += [f"{name} -> {render_term(('def', v), symbol, kids)}" for v, name in names.items()]
    return "\n".join(lines) + "\n"


def parse_shared(text: str) -> Dag:
    """Inverse of render_shared."""
    lines = split_rules(text)
    if not lines:
        raise TermSyntaxError("no rules", 0)
    root_terms = [parse_nested(r.rhs, RULE_SYMBOL) for r in lines if not r.lhs]
    named = {r.lhs: parse_nested(r.rhs, RULE_SYMBOL) for r in lines if r.lhs}
    rule_numbers = set()
    for term in root_terms:
        head, colon, _ = term.symbol.partition(":")
        if not colon or not head.startswith("A") or not head[1:].isdigit():
            raise TermSyntaxError("root lines start with an annotated label `A<k>:f`", term.offset)
        rule_numbers.add(int(head[1:]))

    hole = ("hole",)
    labels: dict[object, Label] = {hole: PLACEHOLDER}
    children: dict[object, tuple[object, ...]] = {}
    roots: list[object] = []

    def visit(term, key: object, annotated: bool) -> None:
        stack = [(term, key)]
        while stack:
            node, k = stack.pop()
            symbol = node.symbol
            head, _, rest = symbol.partition(":")
            if annotated and k == key:
                labels[k] = RuleRoot(int(head[1:]), rest)
            elif symbol.startswith("A") and symbol[1:].isdigit() and int(symbol[1:]) in rule_numbers:
                labels[k] = RuleRef(int(symbol[1:]))
            else:
                labels[k] = symbol
            if not node.children:
                children[k] = (hole, hole)
                continue
            if len(node.children) != 2:
                raise TermSyntaxError("binary nodes take two children", node.offset)
            kid_keys = []
            for c in node.children:
                if c.symbol == "_" and not c.children:
                    kid_keys.append(hole)
                elif c.symbol in named and not c.children:
                    kid_keys.append(("named", c.symbol))
                else:
                    kid_keys.append(("node", id(c)))
                    stack.append((c, ("node", id(c))))
            children[k] = tuple(kid_keys)

    for term in root_terms:
        key = ("node", id(term))
        roots.append(key)
        visit(term, key, True)
    for name, term in named.items():
        visit(term, ("named", name), False)
    return Dag.from_adjacency(labels, children, roots, binary=True)


def encoding_tree(h: HybridDag, rule: int) -> BinaryTree:
    """The unshared encoded right-hand side of one rule."""
    return eval_dag(h.shared, h.rule_root(rule))
