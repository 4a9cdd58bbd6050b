# tests/test_analysis.py
from __future__ import annotations

from fractions import Fraction

import pytest

from analysis.corpus import TOTAL_LABEL, CorpusConfig, run_corpus
from analysis.stats import COLUMNS, InvariantViolation, DocumentStats, stats
from analysis.sweep import SweepConfig, run_bound_sweep, sweep_failures
from dags.accounting import tree_sizes
from dags.families import staircase_family
from data.xml_ingest import tree_to_xml
from trees.unranked import parse_term


def test_stats_of_shared_tree(shared_tree):
    s = stats(shared_tree)
    assert (s.dag, s.bdag, s.rbdag, s.hdag) == (6, 6, 6, 5)
    assert (s.edges, s.max_depth, s.max_children) == (9, 3, 3)
    assert s.avg_children == Fraction(3, 2)
    assert s.ds <= s.dag
    assert s.slt8 > 0
    assert s.violations() == []
    row = s.as_row()
    assert list(row) == list(COLUMNS)
    assert row["avgChildren"] == "1.5"


def test_stats_of_twins(twins):
    s = stats(twins)
    assert (s.dag, s.bdag, s.rbdag, s.hdag) == (8, 8, 7, 8)
    assert s.avg_children == Fraction(8, 3)


def test_single_node_document():
    s = stats(parse_term("a"))
    assert s.edges == 0
    assert s.avg_children == 0
    assert s.dag == 0


def test_check_raises_on_broken_bounds():
    s = DocumentStats(
        edges=3, max_depth=1, avg_children=Fraction(3), max_children=3,
        dag=2, bdag=2, rbdag=2, hdag=3, rhdag=2, ds=2, slt8=2,
    )
    assert "hdag <= min(dag, bdag)" in s.violations()
    with pytest.raises(InvariantViolation):
        s.check()


def test_staircase_separates_dag_and_bdag():
    s = tree_sizes(staircase_family(50))
    assert s.dag == 2500
    assert s.bdag == 148


@pytest.fixture
def corpus_dir(tmp_path, shared_tree):
    (tmp_path / "a.xml").write_bytes(b"<f><g><a/></g><g><a/></g></f>")
    (tmp_path / "b.xml").write_bytes(tree_to_xml(shared_tree))
    (tmp_path / "bad.xml").write_bytes(b"<f><g></f>")
    (tmp_path / "notes.txt").write_text("not xml")
    return tmp_path


def test_corpus_rows(corpus_dir):
    report = run_corpus(corpus_dir)
    assert list(report.rows["file"]) == ["a.xml", "b.xml", TOTAL_LABEL]
    assert list(report.rows.columns) == ["file", *COLUMNS]
    assert [name for name, _ in report.failures] == ["bad.xml"]
    total = report.rows.iloc[-1]
    assert total["edges"] == 4 + 9
    assert total["hdag"] == report.rows["hdag"].iloc[:-1].sum()
    assert report.to_tsv().startswith("file\tedges\t")


def test_corpus_is_deterministic(corpus_dir):
    first = run_corpus(corpus_dir).to_tsv()
    assert run_corpus(corpus_dir).to_tsv() == first
    assert run_corpus(corpus_dir, CorpusConfig(workers=2)).to_tsv() == first


def test_corpus_filters(corpus_dir):
    report = run_corpus(corpus_dir, CorpusConfig(min_edges=5))
    assert report.skipped == ["a.xml"]
    assert list(report.rows["file"]) == ["b.xml", TOTAL_LABEL]
    deep = run_corpus(corpus_dir, CorpusConfig(min_depth=3))
    assert deep.skipped == ["a.xml"]


def test_corpus_needs_a_directory(tmp_path):
    with pytest.raises(ValueError):
        run_corpus(tmp_path / "missing")
    with pytest.raises(ValueError):
        CorpusConfig(workers=0)


def test_empty_corpus_has_only_the_total(tmp_path):
    report = run_corpus(tmp_path)
    assert list(report.rows["file"]) == [TOTAL_LABEL]
    assert report.rows.iloc[0]["edges"] == 0


def test_small_bound_sweep():
    frame = run_bound_sweep(SweepConfig(trees=200, seed=3, max_edges=40))
    assert len(frame) == 200
    assert frame["accounting_ok"].all()
    assert sweep_failures(frame).empty


@pytest.mark.slow
def test_full_bound_sweep():
    cfg = SweepConfig(trees=10_000, seed=0, max_edges=200, max_labels=4)
    frame = run_bound_sweep(cfg)
    assert len(frame) == 10_000
    assert frame["edges"].max() <= 200
    assert set(frame["labels"]) <= {1, 2, 3, 4}
    assert sweep_failures(frame).empty


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(trees=0)
    with pytest.raises(ValueError):
        SweepConfig(max_labels=27)
