# grammars/slt.py
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from dags.dag import BudgetExceeded
from dags.hybrid import HybridDag
from grammars.compressed import CompressedDag, Item, inline_short_rules, normalize_right_regular
from grammars.strings import CyclicGrammarError, MalformedGrammar, Nonterminal
from trees.binary import NO_CHILD, BinaryTree, counts_as_edge
from trees.terms import RULE_SYMBOL, Term, parse_nested, split_rules, walk_preorder
from trees.unranked import UnrankedTree

logger = logging.getLogger(__name__)

class NotRightRegular(ValueError):
    pass


class SymbolKind(str, Enum):
    TERMINAL = "terminal"
    NONTERMINAL = "nonterminal"
    PARAMETER = "parameter"
    HOLE = "hole"


@dataclass(frozen=True)
class SLTSymbol:
    kind: SymbolKind
    name: str

    @property
    def is_placeholder(self) -> bool:
        return self.kind is SymbolKind.HOLE

    @property
    def parameter_index(self) -> int:
        return int(self.name[1:])

    def __str__(self) -> str:
        return self.name


HOLE = SLTSymbol(SymbolKind.HOLE, "_")


def terminal(name: str) -> SLTSymbol:
    return SLTSymbol(SymbolKind.TERMINAL, name)


def nonterminal(name: str) -> SLTSymbol:
    return SLTSymbol(SymbolKind.NONTERMINAL, name)


def parameter(i: int) -> SLTSymbol:
    return SLTSymbol(SymbolKind.PARAMETER, f"y{i}")


def node(symbol: SLTSymbol, *kids: UnrankedTree) -> UnrankedTree:
    return UnrankedTree.build(symbol, kids)


def leaf(symbol: SLTSymbol) -> UnrankedTree:
    return UnrankedTree.leaf(symbol)


def _edges(rhs: UnrankedTree) -> int:
    return sum(1 for kids in rhs.children for c in kids if counts_as_edge(rhs.labels[c]))


@dataclass(frozen=True)
class SLTRule:
    name: str
    rank: int
    rhs: UnrankedTree

    @property
    def size(self) -> int:
        return _edges(self.rhs)

    def render(self) -> str:
        params = f"({','.join(f'y{i}' for i in range(1, self.rank + 1))})" if self.rank else ""
        return f"{self.name}{params} -> {self.rhs.to_term()}"


@dataclass(frozen=True)
class SLTGrammar:
    """
    Straight-line tree grammar; the first rule is the start rule and has rank 0.
    Right-hand sides are trees over SLTSymbol; holes (`_`) mark □ in binary output.
    """

    rules: tuple[SLTRule, ...]
    _by_name: dict[str, SLTRule] = field(init=False, repr=False, compare=False)
    _order: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.rules:
            raise MalformedGrammar("a grammar needs a start rule")
        by_name: dict[str, SLTRule] = {}
        for rule in self.rules:
            if rule.name in by_name:
                raise MalformedGrammar(f"{rule.name} defined twice")
            by_name[rule.name] = rule
        if self.rules[0].rank != 0:
            raise MalformedGrammar("the start rule must have rank 0")
        for rule in self.rules:
            _check_rule(rule, by_name)
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_order", _dependency_order(self.rules, by_name))

    @property
    def start(self) -> SLTRule:
        return self.rules[0]

    def rule(self, name: str) -> SLTRule:
        return self._by_name[name]

    @property
    def size(self) -> int:
        return sum(r.size for r in self.rules)

    @property
    def max_rank(self) -> int:
        return max(r.rank for r in self.rules)

    def render(self) -> str:
        return "\n".join(r.render() for r in self.rules) + "\n"

    def unfolded_sizes(self) -> dict[str, int]:
        """Non-parameter node count each nonterminal contributes, □ included."""
        sizes: dict[str, int] = {}
        for name in self._order:
            total = 0
            for symbol in self._by_name[name].rhs.labels:
                if symbol.kind is SymbolKind.NONTERMINAL:
                    total += sizes[symbol.name]
                elif symbol.kind is not SymbolKind.PARAMETER:
                    total += 1
            sizes[name] = total
        return sizes


def _check_rule(rule: SLTRule, by_name: dict[str, SLTRule]) -> None:
    seen: Counter[int] = Counter()
    rhs = rule.rhs
    for i, symbol in enumerate(rhs.labels):
        if not isinstance(symbol, SLTSymbol):
            raise MalformedGrammar(f"{rule.name}: right-hand side holds {symbol!r}")
        kids = rhs.children[i]
        if symbol.kind in (SymbolKind.PARAMETER, SymbolKind.HOLE) and kids:
            raise MalformedGrammar(f"{rule.name}: {symbol} must be a leaf")
        if symbol.kind is SymbolKind.PARAMETER:
            seen[symbol.parameter_index] += 1
        elif symbol.kind is SymbolKind.NONTERMINAL:
            callee = by_name.get(symbol.name)
            if callee is None:
                raise MalformedGrammar(f"{rule.name}: undefined nonterminal {symbol}")
            if len(kids) != callee.rank:
                raise MalformedGrammar(f"{rule.name}: {symbol} takes {callee.rank} arguments, got {len(kids)}")
    expected = {i: 1 for i in range(1, rule.rank + 1)}
    if dict(seen) != expected:
        raise MalformedGrammar(f"{rule.name}: each of y1..y{rule.rank} must occur exactly once")


def _dependency_order(rules: Sequence[SLTRule], by_name: dict[str, SLTRule]) -> tuple[str, ...]:
    def callees(rule: SLTRule) -> list[str]:
        return [s.name for s in rule.rhs.labels if s.kind is SymbolKind.NONTERMINAL]

    order: list[str] = []
    state: dict[str, int] = {}
    for top in rules:
        if top.name in state:
            continue
        state[top.name] = 1
        stack = [(top.name, iter(callees(top)))]
        while stack:
            name, pending = stack[-1]
            for c in pending:
                if state.get(c) == 1:
                    raise CyclicGrammarError(f"nonterminal {c} derives itself")
                if c not in state:
                    state[c] = 1
                    stack.append((c, iter(callees(by_name[c]))))
                    break
            else:
                stack.pop()
                state[name] = 2
                order.append(name)
    return tuple(order)


@dataclass(frozen=True)
class SLTConfig:
    # inline helper rules and drop unreachable ones after a conversion
    prune: bool = True
    node_budget: int = 10_000_000

    def __post_init__(self) -> None:
        if self.node_budget <= 0:
            raise ValueError("node_budget must be > 0")


def unfold_slt(g: SLTGrammar, cfg: SLTConfig = SLTConfig()) -> BinaryTree | UnrankedTree:
    """
    The tree derived from the start rule. Output containing holes is a
    binary tree where a terminal leaf stands for a(□,□).
    """
    size = g.unfolded_sizes()[g.start.name]
    if size > cfg.node_budget:
        raise BudgetExceeded(f"derived tree has {size} nodes, budget is {cfg.node_budget}")

    labels: list[SLTSymbol] = []
    kids: list[list[int]] = []
    # (rhs, node, arguments of the rule instance, parent in the output)
    stack: list[tuple[UnrankedTree, int, tuple, int]] = [(g.start.rhs, 0, (), NO_CHILD)]
    while stack:
        rhs, i, env, parent = stack.pop()
        symbol = rhs.labels[i]
        if symbol.kind is SymbolKind.PARAMETER:
            arg_rhs, arg_node, arg_env = env[symbol.parameter_index - 1]
            stack.append((arg_rhs, arg_node, arg_env, parent))
            continue
        if symbol.kind is SymbolKind.NONTERMINAL:
            args = tuple((rhs, c, env) for c in rhs.children[i])
            stack.append((g.rule(symbol.name).rhs, 0, args, parent))
            continue
        idx = len(labels)
        labels.append(symbol)
        kids.append([])
        if parent != NO_CHILD:
            kids[parent].append(idx)
        stack.extend((rhs, c, env, idx) for c in reversed(rhs.children[i]))

    if not any(s.kind is SymbolKind.HOLE for s in labels):
        return UnrankedTree(tuple(s.name for s in labels), tuple(tuple(k) for k in kids))

    out_labels: dict[object, str] = {}
    links: dict[object, tuple[object, object]] = {}
    for v, symbol in enumerate(labels):
        if symbol.kind is SymbolKind.HOLE:
            continue
        out_labels[v] = symbol.name
        if not kids[v]:
            links[v] = (("hole", v, 0), ("hole", v, 1))
        elif len(kids[v]) == 2:
            links[v] = (kids[v][0], kids[v][1])
        else:
            raise MalformedGrammar(f"binary output: {symbol} has {len(kids[v])} children")
    if 0 not in links:
        return BinaryTree.empty()
    return BinaryTree.from_links(out_labels, links, 0)


def _expand(tree: UnrankedTree, bodies: dict[str, UnrankedTree]) -> UnrankedTree:
    """`tree` with every nonterminal in `bodies` replaced by its body, nested uses included."""
    labels: list[SLTSymbol] = []
    kids: list[list[int]] = []
    # (rhs, node, arguments of the inlined body or None at the top, parent in the output)
    stack: list[tuple[UnrankedTree, int, tuple | None, int]] = [(tree, 0, None, NO_CHILD)]
    while stack:
        rhs, i, env, parent = stack.pop()
        symbol = rhs.labels[i]
        if env is not None and symbol.kind is SymbolKind.PARAMETER:
            arg_rhs, arg_node, arg_env = env[symbol.parameter_index - 1]
            stack.append((arg_rhs, arg_node, arg_env, parent))
            continue
        if symbol.kind is SymbolKind.NONTERMINAL and symbol.name in bodies:
            args = tuple((rhs, c, env) for c in rhs.children[i])
            stack.append((bodies[symbol.name], 0, args, parent))
            continue
        idx = len(labels)
        labels.append(symbol)
        kids.append([])
        if parent != NO_CHILD:
            kids[parent].append(idx)
        stack.extend((rhs, c, env, idx) for c in reversed(rhs.children[i]))
    return UnrankedTree(tuple(labels), tuple(tuple(k) for k in kids))


def _reachable(rules: dict[str, SLTRule], start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        for s in rules[stack.pop()].rhs.labels:
            if s.kind is SymbolKind.NONTERMINAL and s.name not in seen:
                seen.add(s.name)
                stack.append(s.name)
    return seen


def prune(g: SLTGrammar, inlinable: set[str]) -> SLTGrammar:
    """
    Drop unreachable rules, then inline rules from `inlinable` where that
    does not grow the grammar: a rule of size s and rank k used occ times
    is inlined when (occ - 1) * s - occ * k <= 0.

    Rules are decided callers first, so a rule's use count is final when it
    is looked at: an inlined caller passes on one copy of its uses per
    occurrence. Kept right-hand sides are then rebuilt once each.
    """
    start = g.start.name
    live = _reachable(g._by_name, start)
    uses: Counter[str] = Counter()
    bodies: dict[str, UnrankedTree] = {}
    for name in reversed(g._order):
        if name not in live:
            continue
        rule = g.rule(name)
        occ = uses[name]
        copies = 1
        if name != start and name in inlinable and (occ - 1) * rule.size - occ * rule.rank <= 0:
            bodies[name] = rule.rhs
            copies = occ
        for s in rule.rhs.labels:
            if s.kind is SymbolKind.NONTERMINAL:
                uses[s.name] += copies
    rules = tuple(
        SLTRule(r.name, r.rank, _expand(r.rhs, bodies))
        for r in g.rules
        if r.name in live and r.name not in bodies
    )
    logger.debug("pruned grammar from %d to %d rules", len(g.rules), len(rules))
    return SLTGrammar(rules)


class _Names:
    """Rule names of a conversion: V12, V12_h, V12_p and R1, R1_h, R1_p."""

    def __init__(self, c: CompressedDag):
        self.c = c

    def base(self, a: Item) -> str:
        return str(a) if isinstance(a, Nonterminal) else f"V{a}"

    def plain(self, a: Item) -> UnrankedTree:
        return leaf(nonterminal(self.base(a)))

    def hat(self, a: Item, arg: UnrankedTree) -> UnrankedTree:
        return node(nonterminal(self.base(a) + "_h"), arg)


def _chain(names: _Names, items: Sequence[Item], tail: UnrankedTree) -> UnrankedTree:
    """hat(a_1)(hat(a_2)(... tail))."""
    out = tail
    for a in reversed(items):
        out = names.hat(a, out)
    return out


def _node_rules(names: _Names, v: int) -> list[SLTRule]:
    c = names.c
    f = terminal(str(c.labels[v]))
    word = c.words[v]
    y1 = leaf(parameter(1))
    hole = leaf(HOLE)
    base = names.base(v)
    if not word:
        return [
            SLTRule(base, 0, node(f, hole, hole)),
            SLTRule(base + "_h", 1, node(f, hole, y1)),
        ]
    inner = leaf(nonterminal(base + "_p"))
    return [
        SLTRule(base, 0, node(f, inner, hole)),
        SLTRule(base + "_h", 1, node(f, inner, y1)),
        SLTRule(base + "_p", 0, _chain(names, word[:-1], names.plain(word[-1]))),
    ]


def _order(c: CompressedDag) -> list[int]:
    return [c.root] + [v for v in range(c.node_count - 1, -1, -1) if v != c.root]


def _finish(rules: list[SLTRule], inlinable: set[str], cfg: SLTConfig) -> SLTGrammar:
    g = SLTGrammar(tuple(rules))
    return prune(g, inlinable) if cfg.prune else g


def to_one_slt(c: CompressedDag, cfg: SLTConfig = SLTConfig()) -> SLTGrammar:
    """1-SLT grammar deriving the first-child/next-sibling encoding of the tree of `c`."""
    c = inline_short_rules(c)
    names = _Names(c)
    y1 = leaf(parameter(1))
    rules: list[SLTRule] = []
    inlinable: set[str] = set()
    for v in _order(c):
        rules += _node_rules(names, v)
        if c.words[v]:
            inlinable.add(names.base(v) + "_p")
        else:
            inlinable.update((names.base(v), names.base(v) + "_h"))
    for x, rhs in c.grammar.rules.items():
        base = names.base(x)
        helper = nonterminal(base + "_p")
        rules += [
            SLTRule(base, 0, node(helper, names.plain(rhs[-1]))),
            SLTRule(base + "_h", 1, node(helper, names.hat(rhs[-1], y1))),
            SLTRule(base + "_p", 1, _chain(names, rhs[:-1], y1)),
        ]
        inlinable.add(base + "_p")
    return _finish(rules, inlinable, cfg)


def hdag_to_one_slt(h: HybridDag | CompressedDag, cfg: SLTConfig = SLTConfig()) -> SLTGrammar:
    """
    1-SLT grammar for a right-regular compressed dag such as a hybrid dag.
    String nonterminals only produce sibling suffixes, so they need no
    hatted or helper copies.
    """
    c = normalize_right_regular(h) if isinstance(h, HybridDag) else h
    if not c.is_right_regular:
        raise NotRightRegular("string nonterminals may only close a rule or child word")
    names = _Names(c)
    rules: list[SLTRule] = []
    inlinable: set[str] = set()
    for v in _order(c):
        rules += _node_rules(names, v)
        if c.words[v]:
            inlinable.add(names.base(v) + "_p")
        else:
            inlinable.update((names.base(v), names.base(v) + "_h"))
    for x, rhs in c.grammar.rules.items():
        rules.append(SLTRule(names.base(x), 0, _chain(names, rhs[:-1], names.plain(rhs[-1]))))
        inlinable.add(names.base(x))
    return _finish(rules, inlinable, cfg)


def _build_rhs(term: Term, nonterminals: set[str], params: set[str]) -> UnrankedTree:
    nodes = walk_preorder(term)
    index = {id(n): i for i, n in enumerate(nodes)}

    def classify(symbol: str) -> SLTSymbol:
        if symbol == "_":
            return HOLE
        if symbol in params:
            return SLTSymbol(SymbolKind.PARAMETER, symbol)
        if symbol in nonterminals:
            return nonterminal(symbol)
        return terminal(symbol)

    return UnrankedTree(
        tuple(classify(n.symbol) for n in nodes),
        tuple(tuple(index[id(c)] for c in n.children) for n in nodes),
    )


def parse_slt(text: str) -> SLTGrammar:
    """Parse `B(y1,y2) -> A(y1,A(y2,a))` rules; the first rule is the start rule."""
    lines = split_rules(text)
    if not lines or any(not r.lhs for r in lines):
        raise MalformedGrammar("every line must be a rule `lhs -> rhs`")
    heads = [parse_nested(r.lhs, RULE_SYMBOL) for r in lines]
    nonterminals = {h.symbol for h in heads}
    rules = []
    for r, head in zip(lines, heads):
        params = [c.symbol for c in head.children]
        if any(c.children for c in head.children) or params != [f"y{i}" for i in range(1, len(params) + 1)]:
            raise MalformedGrammar(f"line {r.line}: parameters must be y1, y2, ... in order")
        rhs = _build_rhs(parse_nested(r.rhs, RULE_SYMBOL), nonterminals, set(params))
        rules.append(SLTRule(head.symbol, len(params), rhs))
    return SLTGrammar(tuple(rules))
