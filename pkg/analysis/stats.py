# analysis/stats.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from dags.accounting import tree_sizes
from grammars.compressed import build_compressed_dag
from grammars.slt import to_one_slt
from trees.unranked import UnrankedTree

logger = logging.getLogger(__name__)

COLUMNS = (
    "edges",
    "maxDepth",
    "avgChildren",
    "maxChildren",
    "dag",
    "bdag",
    "rbdag",
    "hdag",
    "rhdag",
    "ds",
    "slt8",
)
SIZE_COLUMNS = COLUMNS[4:]


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class DocumentStats:
    edges: int
    max_depth: int
    avg_children: Fraction
    max_children: int
    dag: int
    bdag: int
    rbdag: int
    hdag: int
    rhdag: int
    ds: int
    slt8: int

    def violations(self) -> list[str]:
        out = []
        if self.hdag > min(self.dag, self.bdag):
            out.append("hdag <= min(dag, bdag)")
        if self.rhdag > min(self.dag, self.rbdag):
            out.append("rhdag <= min(dag, rbdag)")
        if self.bdag > 2 * self.hdag:
            out.append("bdag <= 2 hdag")
        if self.ds > self.dag:
            out.append("ds <= dag")
        return out

    def check(self) -> None:
        broken = self.violations()
        if broken:
            raise InvariantViolation("; ".join(broken))

    def as_row(self) -> dict[str, object]:
        return {
            "edges": self.edges,
            "maxDepth": self.max_depth,
            "avgChildren": f"{float(self.avg_children):.1f}",
            "maxChildren": self.max_children,
            "dag": self.dag,
            "bdag": self.bdag,
            "rbdag": self.rbdag,
            "hdag": self.hdag,
            "rhdag": self.rhdag,
            "ds": self.ds,
            "slt8": self.slt8,
        }


def stats(t: UnrankedTree) -> DocumentStats:
    """Shape statistics and the size under every compressor, each run once."""
    sizes = tree_sizes(t)
    internal = t.internal_count
    if not internal:
        logger.info("single-node document: every compressed size is 0")
    ds = build_compressed_dag(t)
    return DocumentStats(
        edges=t.edge_count,
        max_depth=t.depth,
        avg_children=Fraction(t.edge_count, internal) if internal else Fraction(0),
        max_children=t.max_children,
        dag=sizes.dag,
        bdag=sizes.bdag,
        rbdag=sizes.rbdag,
        hdag=sizes.hdag,
        rhdag=sizes.rhdag,
        ds=ds.size,
        slt8=to_one_slt(ds).size,
    )
