# analysis/corpus.py
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from analysis.stats import COLUMNS, SIZE_COLUMNS, DocumentStats, stats
from data.xml_ingest import IngestConfig, XmlIngestError, read_xml_file

logger = logging.getLogger(__name__)

TOTAL_LABEL = "Accumulated"


@dataclass(frozen=True)
class CorpusConfig:
    min_edges: int = 0
    min_depth: int = 0
    workers: int = 1
    pattern: str = "*.xml"

    def __post_init__(self) -> None:
        if self.min_edges < 0 or self.min_depth < 0:
            raise ValueError("filters must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class CorpusReport:
    rows: pd.DataFrame
    failures: list[tuple[str, str]] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def to_tsv(self) -> str:
        return self.rows.to_csv(sep="\t", index=False)


def _process(path: str) -> tuple[str, DocumentStats | None, str | None]:
    try:
        s = stats(read_xml_file(path, IngestConfig()))
    except (XmlIngestError, OSError) as exc:
        return path, None, str(exc)
    s.check()
    return path, s, None


def _totals(accepted: list[DocumentStats]) -> dict[str, object]:
    row: dict[str, object] = {"file": TOTAL_LABEL, "edges": sum(s.edges for s in accepted)}
    for col in ("maxDepth", "avgChildren", "maxChildren"):
        row[col] = None
    for col in SIZE_COLUMNS:
        row[col] = sum(getattr(s, col) for s in accepted)
    return row


def run_corpus(directory: Path | str, cfg: CorpusConfig = CorpusConfig()) -> CorpusReport:
    """
    One row per accepted file in filename order, then the accumulated row.
    Files that fail to parse are listed in `failures`, never fatal.
    """
    root = Path(directory)
    if not root.is_dir():
        raise ValueError(f"{root} is not a directory")
    paths = sorted(str(p) for p in root.glob(cfg.pattern) if p.is_file())

    if cfg.workers > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_process, paths))
    else:
        results = [_process(p) for p in paths]

    rows: list[dict[str, object]] = []
    accepted: list[DocumentStats] = []
    failures: list[tuple[str, str]] = []
    skipped: list[str] = []
    for path, s, error in sorted(results, key=lambda r: r[0]):
        name = Path(path).name
        if s is None:
            logger.warning("skipping %s: %s", name, error)
            failures.append((name, error or ""))
            continue
        if s.edges < cfg.min_edges or s.max_depth < cfg.min_depth:
            logger.info("filtered out %s (%d edges, depth %d)", name, s.edges, s.max_depth)
            skipped.append(name)
            continue
        accepted.append(s)
        rows.append({"file": name, **s.as_row()})

    rows.append(_totals(accepted))
    frame = pd.DataFrame(rows, columns=["file", *COLUMNS])
    logger.info("corpus: %d rows, %d failures, %d filtered", len(accepted), len(failures), len(skipped))
    return CorpusReport(frame, failures, skipped)
