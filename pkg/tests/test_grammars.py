# tests/test_grammars.py
from __future__ import annotations

import time

import numpy as np
import pytest
from hypothesis import given, settings

from dags.dag import BudgetExceeded, minimize
from dags.families import wide_tree
from dags.hybrid import build_hdag
from grammars.compressed import (
    build_compressed_dag,
    compress_dag,
    inline_short_rules,
    normalize_right_regular,
    parse_compressed,
)
from grammars.slt import (
    NotRightRegular,
    SLTConfig,
    hdag_to_one_slt,
    parse_slt,
    prune,
    to_one_slt,
    unfold_slt,
)
from grammars.strings import (
    AccessIndex,
    CyclicGrammarError,
    ExpandConfig,
    MalformedGrammar,
    Nonterminal,
    RePairConfig,
    Separator,
    SLStringGrammar,
    expand,
    parse_string_grammar,
    random_access,
    repair,
)
from grammars.textio import Method, compress, decompress, read_method
from tests.conftest import random_trees
from trees.binary import fcns
from trees.generators import random_tree
from trees.unranked import PositionOutOfRange, parse_term

UNFOLDED = "f(a,g(a,a,a),h(a,a,b),f(g(a,a,a),h(a,a,b)),g(a,a,a),h(a,a,b),c)"

EXAMPLE_SLT = """\
S -> B(a,b,B(c,d,a))
B(y1,y2,y3) -> A(y1,A(y2,y3))
A(y1,y2) -> f(g(y1),y2)
"""

SMALLER_SLT = """\
S -> A(a,A(b,A(c,A(d,a))))
A(y1,y2) -> f(g(y1),y2)
"""


def _random_grammar(rng: np.random.Generator, rules: int, terminals: int) -> tuple[SLStringGrammar, tuple]:
    out: dict[Nonterminal, tuple] = {}
    names = []
    for i in range(rules):
        body = []
        for _ in range(int(rng.integers(1, 4))):
            if names and rng.random() < 0.6:
                body.append(names[int(rng.integers(len(names)))])
            else:
                body.append(f"t{int(rng.integers(terminals))}")
        x = Nonterminal(f"X{i}")
        out[x] = tuple(body)
        names.append(x)
    start = tuple(names[-3:])
    return SLStringGrammar(out), start


def _naive(g: SLStringGrammar, word) -> list:
    while any(g.is_nonterminal(s) for s in word):
        nxt = []
        for s in word:
            nxt.extend(g.rules[s] if g.is_nonterminal(s) else (s,))
        word = nxt
    return list(word)


# --- straight-line string grammars ---


def test_repair_on_child_sequences():
    strings = [
        ["A", "A2", "A3", "A4", "A2", "A3", "C"],
        ["A", "A", "A"],
        ["A", "A", "B"],
        ["A2", "A3"],
    ]
    g, words = repair(strings)
    d, e = Nonterminal("R1"), Nonterminal("R2")
    assert g.rules == {d: ("A2", "A3"), e: ("A", "A")}
    assert words == [("A", d, "A4", d, "C"), (e, "A"), (e, "B"), (d,)]


@pytest.mark.parametrize("n", [1, 2, 5, 10, 16])
def test_repair_builds_the_doubling_grammar(n):
    g, (word,) = repair([["a"] * 2**n])
    assert g.size + len(word) == 2 * n
    assert expand(g, word) == ["a"] * 2**n
    assert g.word_length(word) == 2**n


def test_repair_keeps_strings_apart():
    g, words = repair([["a", "b"], ["a", "b"]])
    assert [expand(g, w) for w in words] == [["a", "b"], ["a", "b"]]


def test_repair_without_pruning_keeps_single_use_rules():
    g, _ = repair([["a", "b", "a", "b", "c", "a", "b", "c"]], RePairConfig(prune_single_use=False))
    pruned, _ = repair([["a", "b", "a", "b", "c", "a", "b", "c"]])
    assert len(g.rules) >= len(pruned.rules)


def _round_by_round_repair(strings, min_frequency=2):
    """Reference RePair: count every pair afresh each round, then rewrite the whole sequence."""
    seq = []
    for k, s in enumerate(strings):
        if k:
            seq.append(Separator(k))
        seq.extend(s)
    rules = {}
    while True:
        counts, first, last_end = {}, {}, {}
        for i in range(len(seq) - 1):
            key = (seq[i], seq[i + 1])
            if any(isinstance(s, Separator) for s in key) or last_end.get(key, -1) >= i:
                continue
            counts[key] = counts.get(key, 0) + 1
            last_end[key] = i + 1
            first.setdefault(key, i)
        ranked = sorted((key for key in counts if counts[key] >= min_frequency), key=lambda k: (-counts[k], first[k]))
        if not ranked:
            break
        pair, x = ranked[0], Nonterminal(f"R{len(rules) + 1}")
        rules[x] = pair
        out, i = [], 0
        while i < len(seq):
            if tuple(seq[i:i + 2]) == pair:
                out.append(x)
                i += 2
            else:
                out.append(seq[i])
                i += 1
        seq = out
    words = [[]]
    for s in seq:
        if isinstance(s, Separator):
            words.append([])
        else:
            words[-1].append(s)
    return rules, [tuple(w) for w in words]


@pytest.mark.parametrize("min_frequency", [2, 3])
def test_repair_matches_round_by_round_rewriting(min_frequency):
    rng = np.random.default_rng(17)
    cfg = RePairConfig(min_frequency=min_frequency, prune_single_use=False)
    for _ in range(300):
        alphabet = "ab" if rng.random() < 0.5 else "abcd"
        strings = [
            [alphabet[int(k)] for k in rng.integers(0, len(alphabet), size=int(rng.integers(0, 40)))]
            for _ in range(int(rng.integers(1, 5)))
        ]
        g, words = repair(strings, cfg)
        rules, expected = _round_by_round_repair(strings, min_frequency)
        assert g.rules == rules, strings
        assert words == expected, strings


def test_repair_of_runs_and_repeats():
    strings = [list("aaaaaaab"), list("abababa"), list("aaabaaab")]
    g, words = repair(strings, RePairConfig(prune_single_use=False))
    rules, expected = _round_by_round_repair(strings)
    assert (g.rules, words) == (rules, expected)
    assert [expand(g, w) for w in words] == strings


@pytest.mark.slow
def test_repair_of_a_long_sequence():
    rng = np.random.default_rng(23)
    text = [f"t{int(k)}" for k in rng.integers(0, 4, size=100_000)]
    began = time.perf_counter()
    g, (word,) = repair([text])
    assert time.perf_counter() - began < 60
    assert expand(g, word) == text
    assert g.size + len(word) < len(text)


def test_expand_agrees_with_naive_substitution():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        g, start = _random_grammar(rng, int(rng.integers(1, 12)), 3)
        assert expand(g, start) == _naive(g, start)


def test_random_access_agrees_with_expansion():
    rng = np.random.default_rng(5)
    for _ in range(100):
        g, start = _random_grammar(rng, int(rng.integers(1, 15)), 4)
        full = expand(g, start)
        idx = AccessIndex.build(g, start)
        assert idx.total == len(full)
        assert [random_access(idx, p) for p in range(1, idx.total + 1)] == full


def test_random_access_on_a_huge_expansion():
    n = 200
    rules = {Nonterminal(f"A{i}"): (Nonterminal(f"A{i + 1}"), Nonterminal(f"A{i + 1}")) for i in range(n)}
    rules[Nonterminal(f"A{n}")] = ("a", "b")
    g = SLStringGrammar(rules)
    idx = AccessIndex.build(g, (Nonterminal("A0"),))
    assert idx.total == 2 ** (n + 1)
    assert random_access(idx, 1) == "a"
    assert random_access(idx, 2 ** (n + 1)) == "b"
    with pytest.raises(PositionOutOfRange):
        random_access(idx, 0)
    with pytest.raises(BudgetExceeded):
        expand(g, (Nonterminal("A0"),), ExpandConfig(symbol_budget=1000))


def test_cyclic_string_grammar():
    x, y = Nonterminal("X"), Nonterminal("Y")
    with pytest.raises(CyclicGrammarError):
        SLStringGrammar({x: ("a", y), y: (x,)})


def test_string_grammar_text_round_trip():
    g, (word,) = repair([list("abababcabc")])
    parsed, start = parse_string_grammar(g.render(start=word))
    assert expand(parsed, start) == list("abababcabc")


# --- compressed dags ---


def test_parse_compressed_example(compressed_text):
    c = parse_compressed(compressed_text)
    assert c.size == 14
    assert c.is_minimal
    assert not c.is_right_regular
    assert c.unfold().to_term() == UNFOLDED
    assert parse_compressed(c.render()).render() == c.render()


def test_compressed_dag_of_the_unfolded_example():
    t = parse_term(UNFOLDED)
    c = build_compressed_dag(t)
    assert c.unfold() == t
    assert c.size <= minimize(t).edge_size


@pytest.mark.parametrize(
    "text",
    [
        "A1 -> f(B)\n",
        "A1 -> f(a)\nA1 -> g(a)\n",
        "D -> A B\nA -> a\nB -> b\n",
        "A1 -> f(D)\nD -> A1 A1\n",
    ],
)
def test_parse_compressed_rejects(text):
    with pytest.raises(MalformedGrammar):
        parse_compressed(text)


def test_inline_short_rules_keeps_the_tree(compressed_text):
    c = parse_compressed(compressed_text)
    inlined = inline_short_rules(c, max_length=2)
    assert not inlined.grammar.rules
    assert inlined.unfold() == c.unfold()
    assert inlined.size == sum(len(w) for w in c.expanded_words())


@given(random_trees(max_edges=40))
@settings(max_examples=150, deadline=None)
def test_compressed_dag_unfolds_to_the_tree(t):
    c = build_compressed_dag(t)
    assert c.unfold() == t
    assert c.size <= minimize(t).edge_size
    assert parse_compressed(c.render()).unfold() == t


def test_right_regular_form_of_shared_tree(shared_tree):
    h = build_hdag(shared_tree)
    c = normalize_right_regular(h)
    assert c.is_right_regular
    assert c.render() == (
        "A3 -> f(X0)\n"
        "A2 -> f(X1)\n"
        "A1 -> g(X3)\n"
        "A0 -> a\n"
        "X0 -> A2 X1\n"
        "X1 -> A1 X2\n"
        "X2 -> A1\n"
        "X3 -> A0\n"
    )
    assert c.unfold() == shared_tree


@given(random_trees(max_edges=40))
@settings(max_examples=150, deadline=None)
def test_right_regular_form_adds_one_symbol_per_suffix(t):
    if t.edge_count == 0:
        return
    h = build_hdag(t)
    c = normalize_right_regular(h)
    assert c.is_right_regular
    assert c.size == h.size + len(c.grammar.rules)
    assert c.unfold() == t


# --- straight-line tree grammars ---


def test_example_grammars_unfold_to_the_same_tree():
    big, small = parse_slt(EXAMPLE_SLT), parse_slt(SMALLER_SLT)
    assert big.size == 13
    assert small.size == 11
    assert big.max_rank == 3
    expected = "f(g(a),f(g(b),f(g(c),f(g(d),a))))"
    assert unfold_slt(big).to_term() == expected
    assert unfold_slt(small).to_term() == expected


def test_slt_render_round_trip():
    g = parse_slt(EXAMPLE_SLT)
    assert parse_slt(g.render()) == g


@pytest.mark.parametrize(
    "text",
    [
        "S -> A(a)\nA(y1,y2) -> f(y1,y2)\n",
        "S -> A(a)\nA(y1) -> f(y1,y1)\n",
        "A(y1) -> f(y1)\n",
        "S -> A(a)\nA(y2) -> f(y2)\n",
    ],
)
def test_malformed_slt(text):
    with pytest.raises(MalformedGrammar):
        parse_slt(text)


def test_cyclic_slt():
    with pytest.raises(CyclicGrammarError):
        parse_slt("S -> A\nA -> f(B)\nB -> g(A)\n")


def test_unfold_budget():
    with pytest.raises(BudgetExceeded):
        unfold_slt(parse_slt(EXAMPLE_SLT), SLTConfig(node_budget=5))


@pytest.mark.parametrize("n", range(4, 13))
def test_doubling_pipeline(n):
    t = wide_tree(2**n)
    c = build_compressed_dag(t)
    assert c.size == 2 * n
    g = to_one_slt(c)
    assert g.max_rank <= 1
    assert g.size == 3 * n - 1
    assert unfold_slt(g) == fcns(t)


@given(random_trees(max_edges=40))
@settings(max_examples=150, deadline=None)
def test_one_slt_of_a_compressed_dag(t):
    c = build_compressed_dag(t)
    for cfg in (SLTConfig(), SLTConfig(prune=False)):
        g = to_one_slt(c, cfg)
        assert g.max_rank <= 1
        assert unfold_slt(g) == fcns(t)
        assert g.size <= c.size + 2 * (c.node_count + len(c.grammar.rules))


@given(random_trees(max_edges=40))
@settings(max_examples=150, deadline=None)
def test_one_slt_of_a_hybrid_dag(t):
    if t.edge_count == 0:
        return
    c = normalize_right_regular(build_hdag(t))
    g = hdag_to_one_slt(c)
    assert g.max_rank <= 1
    assert unfold_slt(g) == fcns(t)
    assert g.size <= c.size + 2 * c.node_count
    assert parse_slt(g.render()) == g


def test_one_slt_of_shared_tree(shared_tree):
    g = hdag_to_one_slt(build_hdag(shared_tree))
    assert g.size <= 13
    assert unfold_slt(g) == fcns(shared_tree)


def test_hybrid_conversion_needs_right_regular_input(compressed_text):
    with pytest.raises(NotRightRegular):
        hdag_to_one_slt(parse_compressed(compressed_text))


def test_unpruned_conversion_of_a_single_leaf():
    t = parse_term("a")
    g = to_one_slt(compress_dag(minimize(t)), SLTConfig(prune=False))
    assert unfold_slt(g) == fcns(t)


def test_pruning_counts_uses_of_inlined_callers():
    g = parse_slt("S -> f(A,A)\nA -> B\nB -> g(a)\n")
    pruned = prune(g, {"A", "B"})
    # A is free to inline, which leaves B used twice
    assert pruned.render() == "S -> f(B,B)\nB -> g(a)\n"
    assert unfold_slt(pruned) == unfold_slt(g)


def test_pruning_keeps_rules_outside_the_inlinable_set():
    g = parse_slt("S -> f(A,B)\nA -> g(a)\nB -> h(a)\nC -> c\n")
    assert prune(g, {"B", "C"}).render() == "S -> f(A,h(a))\nA -> g(a)\n"


def test_pruning_a_long_chain_of_single_use_rules():
    k = 3000
    lines = ["S -> A1"] + [f"A{i} -> f(A{i + 1})" for i in range(1, k)] + [f"A{k} -> a"]
    g = parse_slt("\n".join(lines) + "\n")
    pruned = prune(g, {f"A{i}" for i in range(1, k + 1)})
    assert len(pruned.rules) == 1
    assert pruned.size == k - 1
    assert unfold_slt(pruned) == unfold_slt(g)


@pytest.mark.slow
def test_pruning_stays_close_to_the_unpruned_conversion():
    t = random_tree(8000, ("a", "b", "c"), np.random.default_rng(3))
    c = build_compressed_dag(t)
    timings = []
    for cfg in (SLTConfig(prune=False), SLTConfig()):
        began = time.perf_counter()
        g = to_one_slt(c, cfg)
        timings.append(time.perf_counter() - began)
    assert g.max_rank <= 1
    assert timings[1] < 10 * timings[0] + 1.0


# --- compressed text files ---


@given(random_trees(max_edges=30))
@settings(max_examples=100, deadline=None)
def test_every_method_round_trips(t):
    for method in Method:
        if t.edge_count == 0 and method in (Method.HDAG, Method.RHDAG, Method.SLT):
            continue
        text = compress(t, method)
        assert read_method(text)[0] is method
        assert decompress(text) == t


def test_compressed_text_header(shared_tree):
    text = compress(shared_tree, "dag")
    assert text.startswith("# method: dag\n")
    assert decompress(text) == shared_tree


@pytest.mark.parametrize("text", ["A0 -> a\n", "# method: zip\nA0 -> a\n"])
def test_bad_headers(text):
    with pytest.raises(ValueError):
        read_method(text)
