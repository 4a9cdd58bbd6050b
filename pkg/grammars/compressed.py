# grammars/compressed.py
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from dags.dag import Dag, EvalConfig, eval_dag, is_minimal, minimize
from dags.hybrid import HybridDag
from dags.grammar import RuleRef
from grammars.strings import (
    ExpandConfig,
    MalformedGrammar,
    Nonterminal,
    RePairConfig,
    SLStringGrammar,
    expand,
    repair,
)
from trees.binary import Encoding, counts_as_edge
from trees.terms import split_rules
from trees.unranked import Label, UnrankedTree

# a child word holds dag node ids and string nonterminals
Item = Union[int, Nonterminal]


@dataclass(frozen=True)
class CompressedDag:
    """
    Dag whose child words are compressed by a straight-line string grammar.
    The grammar's terminals are the node ids; children stay numbered below
    their parent once the words are expanded.
    """

    labels: tuple[Label, ...]
    words: tuple[tuple[Item, ...], ...]
    grammar: SLStringGrammar
    root: int
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(self.words) != n:
            raise ValueError("labels and words must have the same length")
        if not 0 <= self.root < n:
            raise ValueError("root id out of range")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"A{v}" for v in range(n)))
        elif len(self.names) != n:
            raise ValueError("one name per node")

        def top(body) -> int:
            best = -1
            for s in body:
                if isinstance(s, Nonterminal):
                    if s not in max_child:
                        raise ValueError(f"unknown nonterminal {s}")
                    best = max(best, max_child[s])
                elif isinstance(s, int) and 0 <= s < n:
                    best = max(best, s)
                else:
                    raise ValueError(f"{s!r} is neither a node id nor a nonterminal")
            return best

        # rules are checked in dependency order, so every referenced bound is known
        max_child: dict[Nonterminal, int] = {}
        for x in self.grammar.expansion_lengths():
            max_child[x] = top(self.grammar.rules[x])
        for v, word in enumerate(self.words):
            if top(word) >= v:
                raise ValueError(f"node {v} reaches a node that is not numbered below it")

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        return self.grammar.size + sum(len(w) for w in self.words)

    def expanded_words(self, cfg: ExpandConfig = ExpandConfig()) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(expand(self.grammar, w, cfg)) for w in self.words)

    def expanded_dag(self, cfg: ExpandConfig = ExpandConfig()) -> Dag:
        return Dag(self.labels, self.expanded_words(cfg), (self.root,))

    @property
    def is_minimal(self) -> bool:
        return is_minimal(self.expanded_dag())

    @property
    def is_right_regular(self) -> bool:
        """Nonterminals only ever close a rule or a child word."""
        bodies = [*self.grammar.rules.values(), *self.words]
        if any(not rhs for rhs in self.grammar.rules.values()):
            return False
        return all(
            not isinstance(s, Nonterminal) for body in bodies for s in body[:-1]
        )

    def unfold(self, cfg: EvalConfig = EvalConfig()) -> UnrankedTree:
        return eval_dag(self.expanded_dag(), self.root, cfg)

    def symbol_name(self, s: Item) -> str:
        return str(s) if isinstance(s, Nonterminal) else self.names[s]

    def render(self) -> str:
        order = [self.root] + [v for v in range(self.node_count - 1, -1, -1) if v != self.root]
        lines = []
        for v in order:
            word = self.words[v]
            if word:
                lines.append(f"{self.names[v]} -> {self.labels[v]}({','.join(self.symbol_name(s) for s in word)})")
            else:
                lines.append(f"{self.names[v]} -> {self.labels[v]}")
        lines += [f"{x} -> {' '.join(self.symbol_name(s) for s in rhs)}" for x, rhs in self.grammar.rules.items()]
        return "\n".join(lines) + "\n"


_NODE_LINE = re.compile(r"^([^\s(),]+)\s*\((.*)\)$")


def parse_compressed(text: str) -> CompressedDag:
    """
    Inverse of CompressedDag.render. `A -> f(B,X)` is a node, `A -> a` a leaf
    when `a` names no rule, anything else a string rule. The first line is the root.
    """
    lines = [r for r in split_rules(text) if r.lhs]
    if not lines:
        raise MalformedGrammar("no rules")
    defined = {r.lhs for r in lines}
    nodes: dict[str, tuple[str, list[str]]] = {}
    strings: dict[str, list[str]] = {}
    for r in lines:
        if r.lhs in nodes or r.lhs in strings:
            raise MalformedGrammar(f"{r.lhs} defined twice (line {r.line})")
        m = _NODE_LINE.match(r.rhs)
        tokens = r.rhs.split()
        if m:
            kids = [k.strip() for k in m.group(2).split(",")] if m.group(2).strip() else []
            nodes[r.lhs] = (m.group(1), kids)
        elif len(tokens) == 1 and tokens[0] not in defined:
            nodes[r.lhs] = (tokens[0], [])
        elif tokens:
            strings[r.lhs] = tokens
        else:
            raise MalformedGrammar(f"empty right-hand side on line {r.line}")
    for name, body in [*((k, v[1]) for k, v in nodes.items()), *strings.items()]:
        for s in body:
            if s not in defined:
                raise MalformedGrammar(f"{name} references undefined {s}")

    # number nodes bottom-up so children end below parents
    root = lines[0].lhs
    if root not in nodes:
        raise MalformedGrammar("the first rule must be a node")
    ids: dict[str, int] = {}
    on_path = {root}
    stack = [(root, iter(nodes[root][1]))]
    while stack:
        name, pending = stack[-1]
        for s in pending:
            if s in ids:
                continue
            if s in on_path:
                raise MalformedGrammar(f"cycle through {s}")
            on_path.add(s)
            stack.append((s, iter(nodes[s][1] if s in nodes else strings[s])))
            break
        else:
            stack.pop()
            on_path.discard(name)
            if name in nodes:
                ids[name] = len(ids)
            else:
                ids[name] = -1  # visited marker for string rules
    node_names = sorted((n for n in ids if n in nodes), key=ids.__getitem__)
    renum = {n: i for i, n in enumerate(node_names)}
    terms = {x: Nonterminal(x) for x in strings}

    def item(s: str) -> Item:
        return terms[s] if s in terms else renum[s]

    rules = {terms[x]: tuple(item(s) for s in body) for x, body in strings.items() if x in ids}
    return CompressedDag(
        labels=tuple(nodes[n][0] for n in node_names),
        words=tuple(tuple(item(s) for s in nodes[n][1]) for n in node_names),
        grammar=SLStringGrammar(rules),
        root=renum[root],
        names=tuple(node_names),
    )


def _grammar_order(d: Dag) -> list[int]:
    root = d.root
    return [root] + [v for v in range(d.node_count - 1, -1, -1) if v != root and d.children[v]]


def compress_dag(d: Dag, cfg: RePairConfig = RePairConfig()) -> CompressedDag:
    """RePair over the child sequences of a dag, root first then decreasing id."""
    order = _grammar_order(d)
    grammar, compressed = repair([d.children[v] for v in order], cfg)
    words: list[tuple[Item, ...]] = [()] * d.node_count
    for v, w in zip(order, compressed):
        words[v] = tuple(w)
    return CompressedDag(d.labels, tuple(words), grammar, d.root)


def build_compressed_dag(t: UnrankedTree, cfg: RePairConfig = RePairConfig()) -> CompressedDag:
    return compress_dag(minimize(t), cfg)


def inline_short_rules(c: CompressedDag, max_length: int = 1) -> CompressedDag:
    """Inline every string rule whose right-hand side has at most `max_length` symbols."""
    rules = c.grammar.rules
    short = {x for x, rhs in rules.items() if len(rhs) <= max_length}
    if not short:
        return c
    resolved: dict[Nonterminal, tuple[Item, ...]] = {}

    def resolve(body) -> tuple[Item, ...]:
        out: list[Item] = []
        for s in body:
            out.extend(resolved[s] if s in short else (s,))
        return tuple(out)

    for x in c.grammar.expansion_lengths():
        resolved[x] = resolve(rules[x])
    kept = {x: resolved[x] for x in rules if x not in short}
    return CompressedDag(c.labels, tuple(resolve(w) for w in c.words), SLStringGrammar(kept), c.root, c.names)


def normalize_right_regular(h: HybridDag) -> CompressedDag:
    """
    Hybrid dag as a compressed dag with rho(X) in VN or V and gamma(v) in N
    or empty: one nonterminal per shared sibling suffix. Nonterminals are
    numbered while walking each rule's suffix chain in grammar order.
    """
    if h.encoding is not Encoding.FCNS:
        raise ValueError("right-regular form needs a first-child/next-sibling hybrid dag")
    if h.inlined:
        raise ValueError("right-regular form needs height-1 right-hand sides")
    g = h.grammar
    d = g.dag
    shared = h.shared

    def node_of(label: Label) -> int:
        return label.node if isinstance(label, RuleRef) else g.leaf_ids[label]

    def next_in_chain(u: int) -> int | None:
        right = shared.children[u][1]
        return right if counts_as_edge(shared.labels[right]) else None

    xs: dict[int, Nonterminal] = {}
    rho: dict[Nonterminal, tuple[Item, ...]] = {}
    words: list[tuple[Item, ...]] = [()] * d.node_count
    for rule in h.kept_rules:
        u = h.first_child(rule)
        if u not in xs:
            xs[u] = Nonterminal(f"X{len(xs)}")
        words[rule] = (xs[u],)
        while u is not None and xs[u] not in rho:
            nxt = next_in_chain(u)
            if nxt is not None and nxt not in xs:
                xs[nxt] = Nonterminal(f"X{len(xs)}")
            head = node_of(shared.labels[u])
            rho[xs[u]] = (head, xs[nxt]) if nxt is not None else (head,)
            u = nxt
    return CompressedDag(d.labels, tuple(words), SLStringGrammar(rho), d.root)
