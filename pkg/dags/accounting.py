# dags/accounting.py
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import pandas as pd

from dags.dag import Dag, minimize, subtree_classes
from dags.grammar import Symbol, reduced_grammar
from dags.hybrid import HybridConfig, build_hdag
from trees.binary import Encoding, encode
from trees.unranked import UnrankedTree

logger = logging.getLogger(__name__)

_END = -1


class AccountingMismatch(RuntimeError):
    pass


class BoundViolation(RuntimeError):
    pass


def edge_count_e(w: Sequence[UnrankedTree | Symbol]) -> int:
    """
    Outgoing binary edges of the node standing for sibling sequence `w`:
    one towards the first tree's children, one towards the rest of `w`.
    Grammar symbols count as trees of size 0.
    """
    if not w:
        raise ValueError("sibling sequence must be non-empty")
    first = w[0]
    first_size = first.edge_count if isinstance(first, UnrankedTree) else 0
    return int(first_size > 0) + int(len(w) >= 2)


def _suffix_table(d: Dag, classes: Sequence[int], t: UnrankedTree) -> dict[tuple[int, int], int]:
    """Distinct sibling sequences of t, interned as (class of head, id of tail)."""
    table: dict[tuple[int, int], int] = {}
    table[(classes[0], _END)] = 0
    for v in range(t.node_count):
        tail = _END
        for c in reversed(t.children[v]):
            tail = table.setdefault((classes[c], tail), len(table))
    return table


def bdag_size_by_accounting(t: UnrankedTree) -> int:
    """|bdag(t)| as the sum of e(w) over the distinct sibling sequences of t."""
    d, classes = subtree_classes(t)
    total = 0
    for head, tail in _suffix_table(d, classes, t):
        total += int(bool(d.children[head])) + int(tail != _END)
    return total


def _rule_sum(d: Dag) -> int:
    g = reduced_grammar(d)
    suffixes: set[tuple[Symbol, ...]] = set()
    for rule in g.rules:
        kids = rule.children
        suffixes.update(kids[i:] for i in range(len(kids) - 1))
    # every annotated root is its own length-1 sequence of a tree of size >= 1
    return len(g.rules) + len(suffixes)


def _tree_sum(d: Dag, classes: Sequence[int], t: UnrankedTree) -> int:
    long_sequences = sum(1 for _, tail in _suffix_table(d, classes, t) if tail != _END)
    return d.internal_count + long_sequences


def hdag_size_by_accounting(t: UnrankedTree) -> int:
    """
    |hdag(t)| computed twice: over the sibling sequences of the reduced
    grammar, and as |N| plus the tree's sibling sequences of length >= 2.
    """
    if t.edge_count < 1:
        return 0
    d, classes = subtree_classes(t)
    by_rules = _rule_sum(d)
    by_tree = _tree_sum(d, classes, t)
    if by_rules != by_tree:
        raise AccountingMismatch(f"grammar sum {by_rules} != tree sum {by_tree}")
    return by_rules


@dataclass(frozen=True)
class TreeSizes:
    edges: int
    dag: int
    bdag: int
    rbdag: int
    hdag: int
    rhdag: int
    dag_nodes: int
    bdag_nodes: int
    dag_internal: int

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


def tree_sizes(t: UnrankedTree) -> TreeSizes:
    d = minimize(t)
    bdag = minimize(encode(t, Encoding.FCNS))
    rbdag = minimize(encode(t, Encoding.LCPS))
    if t.edge_count == 0:
        logger.info("single-node tree: hybrid dags are empty")
        hdag = rhdag = 0
    else:
        hdag = build_hdag(t).size
        rhdag = build_hdag(t, HybridConfig(encoding=Encoding.LCPS)).size
    return TreeSizes(
        edges=t.edge_count,
        dag=d.edge_size,
        bdag=bdag.edge_size,
        rbdag=rbdag.edge_size,
        hdag=hdag,
        rhdag=rhdag,
        dag_nodes=d.node_size,
        bdag_nodes=bdag.node_size,
        dag_internal=d.internal_count,
    )


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: Fraction
    rhs: Fraction
    skipped: bool = False

    @property
    def holds(self) -> bool:
        return self.skipped or self.lhs <= self.rhs


@dataclass(frozen=True)
class BoundsReport:
    sizes: TreeSizes
    checks: tuple[BoundCheck, ...]

    @property
    def violations(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.holds]

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_for_violations(self) -> None:
        if self.violations:
            detail = "; ".join(f"{c.name}: {c.lhs} > {c.rhs}" for c in self.violations)
            raise BoundViolation(detail)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "bound": c.name,
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "holds": c.holds,
                    "skipped": c.skipped,
                }
                for c in self.checks
            ]
        )


def check_bounds(t: UnrankedTree, sizes: TreeSizes | None = None) -> BoundsReport:
    s = sizes or tree_sizes(t)
    small = s.edges < 2
    if small:
        logger.info("tree has %d edges; squared bounds skipped", s.edges)
    half = Fraction(1, 2)
    checks = (
        BoundCheck("hdag <= min(dag, bdag)", Fraction(s.hdag), Fraction(min(s.dag, s.bdag))),
        BoundCheck("rhdag <= min(dag, rbdag)", Fraction(s.rhdag), Fraction(min(s.dag, s.rbdag))),
        BoundCheck("bdag + n <= 2 hdag", Fraction(s.bdag + s.dag_internal), Fraction(2 * s.hdag)),
        BoundCheck("dag <= hdag^2 / 2", Fraction(s.dag), half * s.hdag**2, skipped=small),
        BoundCheck("dag <= bdag^2 / 2", Fraction(s.dag), half * s.bdag**2, skipped=small),
        BoundCheck("bdag / 2 <= dag", half * s.bdag, Fraction(s.dag)),
        BoundCheck("dag nodes <= bdag nodes", Fraction(s.dag_nodes), Fraction(s.bdag_nodes)),
    )
    return BoundsReport(s, checks)


def sibling_sequence_count(t: UnrankedTree) -> int:
    """Number of distinct sibling sequences; equals the non-□ node count of bdag(t)."""
    d, classes = subtree_classes(t)
    return len(_suffix_table(d, classes, t))

