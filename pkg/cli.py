# cli.py
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

import pandas as pd

from analysis.corpus import CorpusConfig, run_corpus
from analysis.stats import InvariantViolation, stats
from analysis.sweep import SweepConfig, run_bound_sweep, sweep_failures
from census.counting import CensusConfig, Measure, TreeClass, census_table
from dags.accounting import AccountingMismatch, BoundViolation
from dags.dag import minimize
from dags.families import FAMILIES, witness_family
from dags.grammar import ReducedGrammar
from dags.hybrid import build_hdag
from data.xml_ingest import read_xml_file, tree_to_xml
from grammars.compressed import build_compressed_dag
from grammars.queries import build_sibseq_index, build_subtree_index, sibseq_eq, subtree_eq
from grammars.textio import Method, compress, decompress
from trees.binary import Encoding, encode
from trees.unranked import UnrankedTree, parse_term

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_tree(args: argparse.Namespace) -> UnrankedTree:
    if args.term:
        return parse_term(args.term)
    if not args.input:
        raise ValueError("give an input file or --term")
    path = Path(args.input)
    if path.suffix.lower() == ".xml":
        return read_xml_file(path)
    return parse_term(path.read_text(encoding="utf-8"))


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="XML document, or a file holding a term")
    p.add_argument("--term", help="tree in term notation, e.g. 'f(g(a),b)'")


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_stats(args: argparse.Namespace) -> int:
    s = stats(_load_tree(args))
    s.check()
    _write(pd.DataFrame([s.as_row()]).to_csv(sep="\t", index=False), args.out)
    return EXIT_OK


def cmd_compress(args: argparse.Namespace) -> int:
    _write(compress(_load_tree(args), args.method), args.out)
    return EXIT_OK


def cmd_decompress(args: argparse.Namespace) -> int:
    t = decompress(Path(args.input).read_text(encoding="utf-8"))
    if args.xml:
        sys.stdout.buffer.write(tree_to_xml(t))
    else:
        sys.stdout.write(t.to_term() + "\n")
    return EXIT_OK


def _representation(t: UnrankedTree, rep: str):
    if rep == "dag":
        return minimize(t)
    if rep == "bdag":
        return minimize(encode(t, Encoding.FCNS))
    if rep == "hdag":
        return build_hdag(t)
    return build_compressed_dag(t)


def cmd_query(args: argparse.Namespace) -> int:
    t = _load_tree(args)
    g = _representation(t, args.rep)
    if args.kind == "subtree-eq":
        answer = subtree_eq(build_subtree_index(g), args.p, args.q)
    else:
        if args.rep == "ds":
            raise ValueError("sibling-sequence equality is available for dag, bdag and hdag")
        answer = sibseq_eq(build_sibseq_index(g), args.p, args.q)
    print("true" if answer else "false")
    return EXIT_OK


def cmd_census(args: argparse.Namespace) -> int:
    cfg = CensusConfig()
    measures = [args.measure] if args.measure else [Measure.NODES, Measure.EDGES]
    table = census_table(args.tree_class, args.m, [args.n], tuple(measures), args.brute_force, args.predict, cfg)
    _write(table.to_csv(sep="\t", index=False), args.out)
    return EXIT_OK


def cmd_verify_bounds(args: argparse.Namespace) -> int:
    frame = run_bound_sweep(
        SweepConfig(trees=args.trees, seed=args.seed, max_edges=args.max_edges, max_labels=args.max_labels)
    )
    failures = sweep_failures(frame)
    if args.out:
        frame.to_csv(args.out, sep="\t", index=False)
    print(f"{len(frame)} trees checked, {len(failures)} failures")
    if not failures.empty:
        sys.stderr.write(failures.to_csv(sep="\t", index=False))
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_family(args: argparse.Namespace) -> int:
    built = witness_family(args.name, args.n)
    if isinstance(built, ReducedGrammar):
        if args.format != "dag":
            raise ValueError(f"family {args.name} is only available as a grammar; use --format dag")
        _write(built.render(), args.out)
    elif args.format == "xml":
        data = tree_to_xml(built)
        if args.out:
            Path(args.out).write_bytes(data)
        else:
            sys.stdout.buffer.write(data)
    elif args.format == "dag":
        _write(compress(built, Method.DAG), args.out)
    else:
        _write(built.to_term() + "\n", args.out)
    return EXIT_OK


def cmd_corpus(args: argparse.Namespace) -> int:
    cfg = CorpusConfig(min_edges=args.min_edges, min_depth=args.min_depth, workers=args.workers, pattern=args.pattern)
    report = run_corpus(args.directory, cfg)
    _write(report.to_tsv(), args.out)
    for name, error in report.failures:
        sys.stderr.write(f"failed: {name}: {error}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treecomp", description="Dag, hybrid dag and grammar compression of unranked trees.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="shape and compressed sizes of one document")
    _add_input(p)
    p.add_argument("--out")
    p.set_defaults(run=cmd_stats)

    p = sub.add_parser("compress", help="write a compressed representation")
    _add_input(p)
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.HDAG.value)
    p.add_argument("--out")
    p.set_defaults(run=cmd_compress)

    p = sub.add_parser("decompress", help="unfold a compressed file")
    p.add_argument("input")
    p.add_argument("--xml", action="store_true", help="print XML instead of a term")
    p.set_defaults(run=cmd_decompress)

    p = sub.add_parser("query", help="subtree or sibling-sequence equality of two preorder positions")
    p.add_argument("kind", choices=["subtree-eq", "sibseq-eq"])
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    _add_input(p)
    p.add_argument("--rep", choices=["dag", "bdag", "hdag", "ds"], default="dag")
    p.set_defaults(run=cmd_query)

    p = sub.add_parser("census", help="exact accumulated dag sizes over all trees of a size")
    p.add_argument("--class", dest="tree_class", choices=[c.value for c in TreeClass], default=TreeClass.BINARY.value)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--measure", choices=[m.value for m in Measure])
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--predict", action="store_true")
    p.add_argument("--out")
    p.set_defaults(run=cmd_census)

    p = sub.add_parser("verify-bounds", help="check the size bounds on random trees")
    p.add_argument("--trees", type=int, default=SweepConfig.trees)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--max-edges", type=int, default=SweepConfig.max_edges)
    p.add_argument("--max-labels", type=int, default=SweepConfig.max_labels)
    p.add_argument("--out")
    p.set_defaults(run=cmd_verify_bounds)

    p = sub.add_parser("family", help="print a member of a witness family")
    p.add_argument("name", choices=sorted(FAMILIES))
    p.add_argument("n", type=int)
    p.add_argument("--format", choices=["term", "xml", "dag"], default="term")
    p.add_argument("--out")
    p.set_defaults(run=cmd_family)

    p = sub.add_parser("corpus", help="statistics for every XML file of a directory")
    p.add_argument("directory")
    p.add_argument("--min-edges", type=int, default=CorpusConfig.min_edges)
    p.add_argument("--min-depth", type=int, default=CorpusConfig.min_depth)
    p.add_argument("--workers", type=int, default=CorpusConfig.workers)
    p.add_argument("--pattern", default=CorpusConfig.pattern)
    p.add_argument("--out")
    p.set_defaults(run=cmd_corpus)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.run(args)
    except (BoundViolation, InvariantViolation, AccountingMismatch, ArithmeticError) as exc:
        logger.error("invariant violated: %s", exc)
        return EXIT_INVARIANT
    except (ValueError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
