# analysis/sweep.py
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from dags.accounting import (
    AccountingMismatch,
    bdag_size_by_accounting,
    check_bounds,
    hdag_size_by_accounting,
    tree_sizes,
)
from trees.generators import alphabet, random_tree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepConfig:
    trees: int = 10_000
    seed: int = 0
    max_edges: int = 200
    # label alphabets are drawn from 1..max_labels letters
    max_labels: int = 4

    def __post_init__(self) -> None:
        if self.trees < 1:
            raise ValueError("trees must be >= 1")
        if self.max_edges < 0:
            raise ValueError("max_edges must be >= 0")
        if not 1 <= self.max_labels <= 26:
            raise ValueError("max_labels must be in 1..26")


def run_bound_sweep(cfg: SweepConfig = SweepConfig()) -> pd.DataFrame:
    """
    Random trees checked against every size bound. Each row holds the sizes,
    whether both accounting identities matched and the names of broken bounds.
    """
    rng = np.random.default_rng(cfg.seed)
    results = []

    for i in range(cfg.trees):
        # 1. Draw a tree
        n = int(rng.integers(0, cfg.max_edges + 1))
        m = int(rng.integers(1, cfg.max_labels + 1))
        t = random_tree(n, alphabet(m), rng)

        # 2. Sizes and bounds
        sizes = tree_sizes(t)
        report = check_bounds(t, sizes)

        # 3. Accounting identities
        try:
            accounting_ok = bdag_size_by_accounting(t) == sizes.bdag and hdag_size_by_accounting(t) == sizes.hdag
        except AccountingMismatch:
            accounting_ok = False

        results.append({
            "tree": i,
            "labels": m,
            **sizes.as_dict(),
            "accounting_ok": accounting_ok,
            "violations": "; ".join(c.name for c in report.violations),
        })

    frame = pd.DataFrame(results)
    bad = int((frame["violations"] != "").sum() + (~frame["accounting_ok"]).sum())
    if bad:
        logger.warning("bound sweep: %d of %d trees broke a bound or an identity", bad, cfg.trees)
    else:
        logger.info("bound sweep: all %d trees passed", cfg.trees)
    return frame


def sweep_failures(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[(frame["violations"] != "") | (~frame["accounting_ok"])]
