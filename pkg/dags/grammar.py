# dags/grammar.py
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

from dags.dag import Dag
from trees.binary import counts_as_edge
from trees.terms import RULE_SYMBOL, TermSyntaxError, parse_nested, split_rules
from trees.unranked import PLACEHOLDER, Label


class SingleNodeDag(ValueError):
    pass


@dataclass(frozen=True, order=True)
class RuleRef:
    """Reference to the rule of dag node `node`, written A<node>."""

    node: int

    def __str__(self) -> str:
        return f"A{self.node}"


Symbol = Union[RuleRef, Label]


@dataclass(frozen=True)
class ReducedRule:
    nonterminal: int
    label: Label
    children: tuple[Symbol, ...]

    @property
    def name(self) -> str:
        return f"A{self.nonterminal}"

    def render(self) -> str:
        return f"{self.name} -> {self.label}({','.join(str(s) for s in self.children)})"


@dataclass(frozen=True)
class ReducedGrammar:
    """
    Reduced 0-SLT view of a dag: one height-1 rule per non-leaf node,
    leaves written as their labels. The start rule comes first, the
    others follow in decreasing node id.
    """

    dag: Dag
    rules: tuple[ReducedRule, ...]
    _by_node: dict[int, ReducedRule] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_node", {r.nonterminal: r for r in self.rules})

    @property
    def start(self) -> int:
        return self.rules[0].nonterminal

    def rule(self, node: int) -> ReducedRule:
        return self._by_node[node]

    def has_rule(self, node: int) -> bool:
        return node in self._by_node

    @property
    def edge_size(self) -> int:
        return sum(len(r.children) for r in self.rules)

    def child_sequences(self) -> set[tuple[Symbol, ...]]:
        return {r.children for r in self.rules}

    @cached_property
    def leaf_ids(self) -> dict[Label, int]:
        return {self.dag.labels[v]: v for v in range(self.dag.node_count) if not self.dag.children[v]}

    def render(self) -> str:
        return "\n".join(r.render() for r in self.rules) + "\n"


def reduced_grammar(d: Dag) -> ReducedGrammar:
    if d.binary:
        raise ValueError("reduced grammars are defined for unranked dags")
    root = d.root
    if not d.children[root]:
        raise SingleNodeDag("a single-node dag has no reduced grammar")

    reachable = {root}
    for v in range(root, -1, -1):
        if v in reachable:
            reachable.update(d.children[v])
    order = [root] + [v for v in range(root - 1, -1, -1) if v in reachable and d.children[v]]

    rules = tuple(
        ReducedRule(
            v,
            d.labels[v],
            tuple(RuleRef(c) if d.children[c] else d.labels[c] for c in d.children[v]),
        )
        for v in order
    )
    return ReducedGrammar(d, rules)


def render_dag(d: Dag) -> str:
    """Rule text of an unranked dag; a single node is written `A0 -> a`."""
    if not d.children[d.root]:
        return f"A{d.root} -> {d.labels[d.root]}\n"
    return reduced_grammar(d).render()


def parse_dag_text(text: str) -> Dag:
    """Inverse of render_dag. Symbols with a rule are references, the rest are leaf labels."""
    lines = [r for r in split_rules(text) if r.lhs]
    if not lines:
        raise TermSyntaxError("no rules", 0)
    terms = {r.lhs: parse_nested(r.rhs, RULE_SYMBOL) for r in lines}
    labels: dict[object, Label] = {}
    children: dict[object, tuple[object, ...]] = {}
    for name, term in terms.items():
        labels[name] = term.symbol
        kids = []
        for child in term.children:
            if child.children:
                raise TermSyntaxError("right-hand sides have height at most 1", child.offset)
            if child.symbol in terms:
                kids.append(child.symbol)
            else:
                key = ("leaf", child.symbol)
                labels[key] = child.symbol
                kids.append(key)
        children[name] = tuple(kids)
    return Dag.from_adjacency(labels, children, [lines[0].lhs])


def _binary_names(d: Dag) -> dict[int, str]:
    order = [v for v in range(d.node_count - 1, -1, -1) if counts_as_edge(d.labels[v]) and not d.is_leaf(v)]
    return {v: f"A{v}" for v in order}


def render_binary_dag(d: Dag) -> str:
    """`A5 -> f(A4,_)`: □ is `_`, a node with two □ children is its bare label."""
    if not d.binary:
        raise ValueError("render_binary_dag expects a binary dag")
    root = d.root
    names = _binary_names(d)

    def child(c: int) -> str:
        if not counts_as_edge(d.labels[c]):
            return "_"
        return names.get(c, str(d.labels[c]))

    if root not in names:
        return f"A{root} -> {child(root)}\n"
    reachable = _reachable(d)
    order = [root] + [v for v in names if v != root and v in reachable]
    lines = [f"{names[v]} -> {d.labels[v]}({','.join(child(c) for c in d.children[v])})" for v in order]
    return "\n".join(lines) + "\n"


def _reachable(d: Dag) -> set[int]:
    seen = set(d.roots)
    for v in range(d.node_count - 1, -1, -1):
        if v in seen:
            seen.update(d.children[v])
    return seen


def parse_binary_dag_text(text: str) -> Dag:
    lines = [r for r in split_rules(text) if r.lhs]
    if not lines:
        raise TermSyntaxError("no rules", 0)
    terms = {r.lhs: parse_nested(r.rhs, RULE_SYMBOL) for r in lines}
    hole = ("hole",)
    labels: dict[object, Label] = {hole: PLACEHOLDER}
    children: dict[object, tuple[object, ...]] = {}

    def leaf(symbol: str) -> object:
        key = ("leaf", symbol)
        labels[key] = symbol
        children[key] = (hole, hole)
        return key

    for name, term in terms.items():
        if not term.children:
            # a leaf root: `A0 -> a`
            labels[name] = term.symbol
            children[name] = (hole, hole)
            continue
        if len(term.children) != 2:
            raise TermSyntaxError("binary nodes take two children", term.offset)
        labels[name] = term.symbol
        kids = []
        for c in term.children:
            if c.children:
                raise TermSyntaxError("right-hand sides have height at most 1", c.offset)
            if c.symbol == "_":
                kids.append(hole)
            elif c.symbol in terms:
                kids.append(c.symbol)
            else:
                kids.append(leaf(c.symbol))
        children[name] = tuple(kids)
    return Dag.from_adjacency(labels, children, [lines[0].lhs], binary=True)

