# grammars/strings.py
from __future__ import annotations

import heapq
import itertools
import logging
from bisect import bisect_right
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from dags.dag import BudgetExceeded
from trees.terms import split_rules
from trees.unranked import PositionOutOfRange

logger = logging.getLogger(__name__)


class CyclicGrammarError(ValueError):
    pass


class MalformedGrammar(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Nonterminal:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Separator:
    """Reserved symbol `$k` joining the input strings of a multi-string compression."""

    index: int

    def __str__(self) -> str:
        return f"${self.index}"


StringSymbol = Hashable
Word = tuple[StringSymbol, ...]


@dataclass(frozen=True)
class SLStringGrammar:
    """
    Straight-line string grammar. Keys of `rules` are the nonterminals,
    every other symbol is a terminal. Rules are kept in creation order.
    """

    rules: Mapping[Nonterminal, Word] = field(default_factory=dict)
    _order: tuple[Nonterminal, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", {x: tuple(rhs) for x, rhs in self.rules.items()})
        object.__setattr__(self, "_order", _topological(self.rules))

    def is_nonterminal(self, s: StringSymbol) -> bool:
        return isinstance(s, Nonterminal) and s in self.rules

    @property
    def size(self) -> int:
        return sum(len(rhs) for rhs in self.rules.values())

    def expansion_lengths(self) -> dict[Nonterminal, int]:
        """Exact expansion length of every nonterminal; Python ints never overflow."""
        lengths: dict[Nonterminal, int] = {}
        for x in self._order:
            lengths[x] = sum(lengths[s] if s in lengths else 1 for s in self.rules[x])
        return lengths

    def word_length(self, word: Sequence[StringSymbol], lengths: Mapping[Nonterminal, int] | None = None) -> int:
        lengths = self.expansion_lengths() if lengths is None else lengths
        return sum(lengths.get(s, 1) if isinstance(s, Nonterminal) else 1 for s in word)

    def render(self, symbol: Callable[[StringSymbol], str] = str, start: Sequence[StringSymbol] | None = None) -> str:
        lines = [f"{x} -> {' '.join(symbol(s) for s in rhs)}" for x, rhs in self.rules.items()]
        if start is not None:
            lines.append(f"start: {' '.join(symbol(s) for s in start)}")
        return "\n".join(lines) + "\n" if lines else ""


def _topological(rules: Mapping[Nonterminal, Word]) -> tuple[Nonterminal, ...]:
    order: list[Nonterminal] = []
    state: dict[Nonterminal, int] = {}  # 1 on the current path, 2 done
    for top in rules:
        if top in state:
            continue
        state[top] = 1
        stack = [(top, iter(rules[top]))]
        while stack:
            x, pending = stack[-1]
            for s in pending:
                if not isinstance(s, Nonterminal) or s not in rules:
                    continue
                if state.get(s) == 1:
                    raise CyclicGrammarError(f"nonterminal {s} derives itself")
                if s not in state:
                    state[s] = 1
                    stack.append((s, iter(rules[s])))
                    break
            else:
                stack.pop()
                state[x] = 2
                order.append(x)
    return tuple(order)


@dataclass(frozen=True)
class ExpandConfig:
    symbol_budget: int = 10_000_000

    def __post_init__(self) -> None:
        if self.symbol_budget <= 0:
            raise ValueError("symbol_budget must be > 0")


def expand(g: SLStringGrammar, word: Sequence[StringSymbol], cfg: ExpandConfig = ExpandConfig()) -> list[StringSymbol]:
    """The terminal word derived from `word`."""
    total = g.word_length(word)
    if total > cfg.symbol_budget:
        raise BudgetExceeded(f"expansion has {total} symbols, budget is {cfg.symbol_budget}")
    out: list[StringSymbol] = []
    stack = [iter(word)]
    while stack:
        for s in stack[-1]:
            if g.is_nonterminal(s):
                stack.append(iter(g.rules[s]))
                break
            out.append(s)
        else:
            stack.pop()
    return out


@dataclass(frozen=True)
class RePairConfig:
    min_frequency: int = 2
    # inline rules that end up referenced only once
    prune_single_use: bool = True

    def __post_init__(self) -> None:
        if self.min_frequency < 2:
            raise ValueError("min_frequency must be >= 2")


class _Sequence:
    """
    The joined input as a linked list over node ids. A replaced pair keeps
    the id of its left node, so ids stay in sequence order and the smallest
    id holding a pair is its first occurrence.
    """

    def __init__(self, seq: Sequence[StringSymbol]):
        n = len(seq)
        self.sym: list[StringSymbol | None] = list(seq)
        self.nxt = [*range(1, n), -1] if n else []
        self.prv = list(range(-1, n - 1))
        # left node ids of every adjacent occurrence, overlapping ones included
        self.occ: dict[tuple, set[int]] = defaultdict(set)
        self.starts: dict[tuple, list[int]] = defaultdict(list)
        # runs of one symbol with length >= 2; both ends point at the other end
        self.run_end: dict[int, int] = {}
        self.run_len: dict[int, int] = {}
        # per symbol, the sum of length // 2 over its runs
        self.run_pairs: Counter[StringSymbol] = Counter()
        self.touched: set[tuple] = set()
        for i in range(n - 1):
            self._add(i)
        self._index_runs(range(n))

    def _pair_at(self, i: int) -> tuple | None:
        if i < 0 or self.nxt[i] < 0:
            return None
        a, b = self.sym[i], self.sym[self.nxt[i]]
        if isinstance(a, Separator) or isinstance(b, Separator):
            return None
        return (a, b)

    def _add(self, i: int) -> None:
        pair = self._pair_at(i)
        if pair is not None:
            self.occ[pair].add(i)
            heapq.heappush(self.starts[pair], i)
            self.touched.add(pair)

    def _remove(self, i: int) -> None:
        pair = self._pair_at(i)
        if pair is not None:
            self.occ[pair].discard(i)
            self.touched.add(pair)

    def count(self, pair: tuple) -> int:
        """Occurrences counted left-greedily without overlap."""
        a, b = pair
        return self.run_pairs[a] if a == b else len(self.occ[pair])

    def first(self, pair: tuple) -> int | None:
        starts, live = self.starts[pair], self.occ[pair]
        while starts and starts[0] not in live:
            heapq.heappop(starts)
        return starts[0] if starts else None

    def _set_run(self, head: int, tail: int, length: int) -> None:
        self.run_end[head], self.run_end[tail] = tail, head
        self.run_len[head] = self.run_len[tail] = length
        self.run_pairs[self.sym[head]] += length // 2

    def _drop_run(self, end: int) -> tuple[int, int, int]:
        other = self.run_end.pop(end)
        del self.run_end[other]
        length = self.run_len.pop(end)
        del self.run_len[other]
        head, tail = min(end, other), max(end, other)
        self.run_pairs[self.sym[head]] -= length // 2
        return head, tail, length

    def _index_runs(self, nodes: Iterable[int]) -> None:
        head = prev = -1
        length = 0
        for u in nodes:
            if prev >= 0 and self.nxt[prev] == u and self.sym[prev] == self.sym[u]:
                length += 1
            else:
                if length >= 2:
                    self._set_run(head, prev, length)
                head, length = u, 1
            prev = u
        if length >= 2:
            self._set_run(head, prev, length)

    def _leave_run(self, u: int) -> None:
        """Shorten the run that has u at one end; u is about to change."""
        if u not in self.run_end:
            return
        head, tail, length = self._drop_run(u)
        if length > 2:
            if u == head:
                self._set_run(self.nxt[u], tail, length - 1)
            else:
                self._set_run(head, self.prv[u], length - 1)

    def replace(self, pair: tuple, x: Nonterminal) -> None:
        """Replace the pair left to right, like a greedy scan of the sequence."""
        a, b = pair
        made: list[int] = []
        for i in sorted(self.occ[pair]):
            if self._pair_at(i) != pair:
                continue  # consumed by the occurrence just before it
            j = self.nxt[i]
            p, q = self.prv[i], self.nxt[j]
            if a == b:
                # runs of a are replaced from their head; every one disappears
                if i in self.run_end:
                    self._drop_run(i)
            else:
                self._leave_run(i)
                self._leave_run(j)
            self._remove(p)
            self._remove(i)
            self._remove(j)
            self.sym[i] = x
            self.sym[j] = None
            self.nxt[i], self.nxt[j] = q, -1
            if q >= 0:
                self.prv[q] = i
            self._add(p)
            self._add(i)
            made.append(i)
        self._index_runs(made)

    def symbols(self) -> Iterator[StringSymbol]:
        i = 0 if self.sym else -1
        while i >= 0:
            yield self.sym[i]
            i = self.nxt[i]


def _prune(rules: dict[Nonterminal, Word], words: list[list[StringSymbol]]) -> tuple[dict[Nonterminal, Word], list[Word]]:
    uses: dict[Nonterminal, int] = {x: 0 for x in rules}
    for body in [*rules.values(), *words]:
        for s in body:
            if s in uses:
                uses[s] += 1

    resolved: dict[Nonterminal, Word] = {}

    def resolve(body: Iterable[StringSymbol]) -> Word:
        out: list[StringSymbol] = []
        for s in body:
            if s in uses and uses[s] == 1:
                out.extend(resolved[s])
            else:
                out.append(s)
        return tuple(out)

    # rules only reference older rules, so creation order resolves bottom-up
    for x, rhs in rules.items():
        resolved[x] = resolve(rhs)

    kept = [x for x in rules if uses[x] != 1]
    rename = {x: Nonterminal(f"R{i}") for i, x in enumerate(kept, start=1)}

    def renamed(body: Word) -> Word:
        return tuple(rename.get(s, s) for s in body)

    new_rules = {rename[x]: renamed(resolved[x]) for x in kept}
    return new_rules, [renamed(resolve(w)) for w in words]


def repair(strings: Sequence[Sequence[StringSymbol]], cfg: RePairConfig = RePairConfig()) -> tuple[SLStringGrammar, list[Word]]:
    """
    RePair over several strings at once. The strings are joined with unique
    separators, so no rule ever spans two of them. Each round replaces the
    most frequent pair (the earliest one on ties); a priority queue keeps
    every round proportional to the occurrences it rewrites.
    """
    seq: list[StringSymbol] = []
    for k, s in enumerate(strings):
        if k:
            seq.append(Separator(k))
        seq.extend(s)

    state = _Sequence(seq)
    queue: list[tuple[int, int, int, tuple]] = []
    serial = itertools.count()

    def push(pairs: Iterable[tuple]) -> None:
        for pair in pairs:
            n = state.count(pair)
            if n >= cfg.min_frequency:
                heapq.heappush(queue, (-n, state.first(pair), next(serial), pair))

    push(list(state.occ))
    rules: dict[Nonterminal, Word] = {}
    while queue:
        negative, first, _, pair = heapq.heappop(queue)
        # stale entries are skipped; the current key was pushed when it changed
        if -negative != state.count(pair) or first != state.first(pair):
            continue
        x = Nonterminal(f"R{len(rules) + 1}")
        rules[x] = pair
        state.touched = set()
        state.replace(pair, x)
        push(state.touched)

    words: list[list[StringSymbol]] = [[]]
    for s in state.symbols():
        if isinstance(s, Separator):
            words.append([])
        else:
            words[-1].append(s)
    if not strings:
        words = []

    created = len(rules)
    if cfg.prune_single_use:
        rules, out = _prune(rules, words)
    else:
        out = [tuple(w) for w in words]
    logger.debug("repair: %d rules created, %d kept", created, len(rules))
    return SLStringGrammar(rules), out


@dataclass(frozen=True)
class AccessIndex:
    """
    Random access into the expansion of `word`. Each rule keeps the prefix
    sums of its symbols' expansion lengths; a lookup descends one rule per
    level with a binary search, like walking a balanced binarization.
    """

    grammar: SLStringGrammar
    word: Word
    lengths: dict[Nonterminal, int]
    prefix: dict[Nonterminal | None, tuple[int, ...]]

    @classmethod
    def build(cls, grammar: SLStringGrammar, word: Sequence[StringSymbol]) -> AccessIndex:
        lengths = grammar.expansion_lengths()

        def sums(body: Sequence[StringSymbol]) -> tuple[int, ...]:
            out = [0]
            for s in body:
                out.append(out[-1] + (lengths[s] if s in lengths else 1))
            return tuple(out)

        prefix: dict[Nonterminal | None, tuple[int, ...]] = {x: sums(rhs) for x, rhs in grammar.rules.items()}
        prefix[None] = sums(word)
        return cls(grammar, tuple(word), lengths, prefix)

    @property
    def total(self) -> int:
        return self.prefix[None][-1]


def random_access(idx: AccessIndex, p: int) -> StringSymbol:
    """The p-th (1-based) terminal of the expansion."""
    if not 1 <= p <= idx.total:
        raise PositionOutOfRange(f"position {p} outside 1..{idx.total}")
    owner: Nonterminal | None = None
    body: Word = idx.word
    offset = p - 1
    while True:
        sums = idx.prefix[owner]
        # pieces of length 0 are skipped by bisect_right
        j = bisect_right(sums, offset) - 1
        s = body[j]
        offset -= sums[j]
        if s not in idx.lengths:
            return s
        owner, body = s, idx.grammar.rules[s]


def parse_string_grammar(text: str) -> tuple[SLStringGrammar, Word | None]:
    """Inverse of SLStringGrammar.render; terminals come back as strings."""
    heads = [r for r in split_rules(text) if r.lhs]
    names = {r.lhs: Nonterminal(r.lhs) for r in heads}

    def symbol(token: str) -> StringSymbol:
        if token in names:
            return names[token]
        if token.startswith("$") and token[1:].isdigit():
            return Separator(int(token[1:]))
        return token

    rules = {names[r.lhs]: tuple(symbol(tok) for tok in r.rhs.split()) for r in heads}
    start = None
    for r in split_rules(text):
        if not r.lhs and r.rhs.startswith("start:"):
            start = tuple(symbol(tok) for tok in r.rhs[len("start:"):].split())
    return SLStringGrammar(rules), start
