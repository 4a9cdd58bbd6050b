# census/counting.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import pandas as pd

from census.series import TruncatedSeries
from dags.dag import minimize
from trees.generators import alphabet, all_binary_trees, all_unranked_trees

logger = logging.getLogger(__name__)


class TooLargeInstance(ValueError):
    pass


class TreeClass(str, Enum):
    BINARY = "binary"
    UNRANKED = "unranked"


class Measure(str, Enum):
    NODES = "nodes"
    EDGES = "edges"


@dataclass(frozen=True)
class CensusConfig:
    # refuse brute-force enumerations with more trees than this
    brute_force_limit: int = 10**7
    digits: int = 12

    def __post_init__(self) -> None:
        if self.brute_force_limit <= 0:
            raise ValueError("brute_force_limit must be > 0")
        if self.digits < 0:
            raise ValueError("digits must be >= 0")


def _check(m: int, n: int) -> None:
    if m < 1:
        raise ValueError("m must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")


def tree_count(cls: TreeClass | str, m: int, p: int) -> int:
    """Number of m-labeled trees with p edges."""
    _check(m, p)
    if TreeClass(cls) is TreeClass.BINARY:
        return math.comb(2 * p + 2, p + 1) // (p + 2) * m ** (p + 1)
    return math.comb(2 * p, p) // (p + 1) * m ** (p + 1)


def edge_weight(cls: TreeClass | str, m: int, p: int) -> int:
    """Sum of root degrees over all m-labeled trees with p edges."""
    if p == 0:
        return 0
    count = tree_count(cls, m, p)
    if TreeClass(cls) is TreeClass.BINARY:
        # one child: 2m B_(p-1) trees, two children: the rest
        return 2 * (count - m * tree_count(cls, m, p - 1))
    weight = Fraction(3 * p * count, p + 2)
    if weight.denominator != 1:
        raise ArithmeticError(f"root degree sum for p={p} is not an integer")
    return int(weight)


@lru_cache(maxsize=8)
def _base_root(m: int, order: int) -> TruncatedSeries:
    return TruncatedSeries.from_terms({0: 1, 1: -4 * m}, order).sqrt()


def containment_series(cls: TreeClass | str, m: int, p: int, order: int) -> TruncatedSeries:
    """Counts, by edge size up to z^order, the trees containing a fixed tree with p edges."""
    _check(m, p)
    if order < 0:
        raise ValueError("order must be >= 0")
    if TreeClass(cls) is TreeClass.BINARY:
        # (sqrt(1 - 4mz + 4mz^(p+2)) - sqrt(1 - 4mz)) / (2mz^2)
        work = order + 2
        root = TruncatedSeries.from_terms({0: 1, 1: -4 * m, p + 2: 4 * m}, work).sqrt()
        series = (root - _base_root(m, work)).divide_by_z(2) * Fraction(1, 2 * m)
    else:
        # (z^(p+1) + sqrt(1 - 4mz + 2z^(p+1) + z^(2p+2)) - sqrt(1 - 4mz)) / (2z)
        work = order + 1
        root = TruncatedSeries.from_terms({0: 1, 1: -4 * m, p + 1: 2, 2 * p + 2: 1}, work).sqrt()
        shift = TruncatedSeries.from_terms({p + 1: 1}, work)
        series = (shift + root - _base_root(m, work)).divide_by_z(1) * Fraction(1, 2)
    if not series.is_integral or any(c < 0 for c in series.coefficients):
        raise ArithmeticError(f"containment series for p={p} has a coefficient that counts no trees")
    return series


def accumulated_totals(cls: TreeClass | str, m: int, order: int) -> dict[Measure, list[int]]:
    """
    Accumulated dag node and edge counts for every size 0..order. Each
    containment series is built once, at the largest order; a series for
    p only counts trees with at least p edges.
    """
    _check(m, order)
    cls = TreeClass(cls)
    totals = {measure: [0] * (order + 1) for measure in Measure}
    for p in range(order + 1):
        weights = {Measure.NODES: tree_count(cls, m, p), Measure.EDGES: edge_weight(cls, m, p)}
        series = containment_series(cls, m, p, order)
        for n in range(p, order + 1):
            contained = int(series[n])
            for measure, weight in weights.items():
                totals[measure][n] += weight * contained
    return totals


def accumulated(cls: TreeClass | str, m: int, n: int, measure: Measure | str) -> int:
    """Total dag node (or edge) count over all m-labeled trees with n edges."""
    measure = Measure(measure)
    return accumulated_totals(cls, m, n)[measure][n]


def brute_force(
    cls: TreeClass | str,
    m: int,
    n: int,
    measure: Measure | str,
    cfg: CensusConfig = CensusConfig(),
) -> int:
    """The same total by minimizing every tree; an independent check on `accumulated`."""
    _check(m, n)
    cls, measure = TreeClass(cls), Measure(measure)
    count = tree_count(cls, m, n)
    if count > cfg.brute_force_limit:
        raise TooLargeInstance(f"{count} trees exceed the brute-force limit of {cfg.brute_force_limit}")
    labels = alphabet(m)
    trees = all_binary_trees(n, labels) if cls is TreeClass.BINARY else all_unranked_trees(n, labels)
    total = 0
    for t in trees:
        d = minimize(t)
        total += d.node_size if measure is Measure.NODES else d.edge_size
    logger.debug("brute force over %d %s trees", len(trees), cls.value)
    return total


def kappa(m: int) -> float:
    return math.sqrt(math.log(4 * m) / math.pi)


_LEADING = {
    (TreeClass.BINARY, Measure.NODES): 2,
    (TreeClass.BINARY, Measure.EDGES): 3,
    (TreeClass.UNRANKED, Measure.NODES): 1,
    (TreeClass.UNRANKED, Measure.EDGES): 3,
}


def asymptotic_prediction(cls: TreeClass | str, m: int, n: int, measure: Measure | str) -> float:
    """Leading term c * kappa_m * n / sqrt(ln n) of the average size."""
    if n < 2:
        raise ValueError("the prediction needs n >= 2")
    _check(m, n)
    c = _LEADING[(TreeClass(cls), Measure(measure))]
    return c * kappa(m) * n / math.sqrt(math.log(n))


@dataclass(frozen=True)
class CensusResult:
    tree_class: TreeClass
    m: int
    n: int
    measure: Measure
    accumulated: int
    count: int

    @property
    def average(self) -> Fraction:
        return Fraction(self.accumulated, self.count)

    def as_row(self, cfg: CensusConfig = CensusConfig(), predict: bool = False) -> dict[str, object]:
        row: dict[str, object] = {
            "class": self.tree_class.value,
            "m": self.m,
            "n": self.n,
            "measure": self.measure.value,
            "accumulated": self.accumulated,
            "count": self.count,
            "average": f"{float(self.average):.{cfg.digits}f}",
            "fraction": str(self.average),
        }
        if predict:
            row["prediction"] = (
                asymptotic_prediction(self.tree_class, self.m, self.n, self.measure) if self.n >= 2 else None
            )
        return row


def census(
    cls: TreeClass | str,
    m: int,
    n: int,
    measure: Measure | str,
    use_brute_force: bool = False,
    cfg: CensusConfig = CensusConfig(),
) -> CensusResult:
    cls, measure = TreeClass(cls), Measure(measure)
    total = brute_force(cls, m, n, measure, cfg) if use_brute_force else accumulated(cls, m, n, measure)
    return CensusResult(cls, m, n, measure, total, tree_count(cls, m, n))


def census_table(
    cls: TreeClass | str,
    m: int,
    ns: range | list[int],
    measures: tuple[Measure | str, ...] = (Measure.NODES, Measure.EDGES),
    use_brute_force: bool = False,
    predict: bool = False,
    cfg: CensusConfig = CensusConfig(),
) -> pd.DataFrame:
    cls = TreeClass(cls)
    ns = list(ns)
    for n in ns:
        _check(m, n)
    totals = accumulated_totals(cls, m, max(ns)) if ns and not use_brute_force else None
    rows = []
    for n in ns:
        for measure in map(Measure, measures):
            if totals is None:
                result = census(cls, m, n, measure, use_brute_force=True, cfg=cfg)
            else:
                result = CensusResult(cls, m, n, measure, totals[measure][n], tree_count(cls, m, n))
            rows.append(result.as_row(cfg, predict))
        logger.info("census %s m=%d n=%d done", cls.value, m, n)
    return pd.DataFrame(rows)
