# grammars/textio.py
from __future__ import annotations

import logging
from enum import Enum

from dags.dag import EvalConfig, eval_dag, minimize
from dags.grammar import parse_binary_dag_text, parse_dag_text, render_binary_dag, render_dag
from dags.hybrid import HybridConfig, build_hdag, parse_shared, unfold_shared
from grammars.compressed import build_compressed_dag, parse_compressed
from grammars.slt import SLTConfig, hdag_to_one_slt, parse_slt, unfold_slt
from trees.binary import BinaryTree, Encoding, decode, encode
from trees.unranked import UnrankedTree

logger = logging.getLogger(__name__)

HEADER = "# method:"


class Method(str, Enum):
    DAG = "dag"
    BDAG = "bdag"
    RBDAG = "rbdag"
    HDAG = "hdag"
    RHDAG = "rhdag"
    DS = "ds"  # dag with RePair-compressed child sequences
    SLT = "slt"


_ENCODING = {
    Method.BDAG: Encoding.FCNS,
    Method.RBDAG: Encoding.LCPS,
    Method.HDAG: Encoding.FCNS,
    Method.RHDAG: Encoding.LCPS,
}


def compress(t: UnrankedTree, method: Method | str) -> str:
    """Rule text of `t` under `method`, headed by `# method: <m>`."""
    method = Method(method)
    if method is Method.DAG:
        body = render_dag(minimize(t))
    elif method in (Method.BDAG, Method.RBDAG):
        body = render_binary_dag(minimize(encode(t, _ENCODING[method])))
    elif method in (Method.HDAG, Method.RHDAG):
        body = build_hdag(t, HybridConfig(encoding=_ENCODING[method])).render()
    elif method is Method.DS:
        body = build_compressed_dag(t).render()
    else:
        body = hdag_to_one_slt(build_hdag(t)).render()
    return f"{HEADER} {method.value}\n{body}"


def read_method(text: str) -> tuple[Method, str]:
    first, _, rest = text.lstrip().partition("\n")
    if not first.startswith(HEADER):
        raise ValueError(f"compressed text must start with '{HEADER} <method>'")
    name = first[len(HEADER):].strip()
    try:
        return Method(name), rest
    except ValueError:
        raise ValueError(f"unknown method {name!r}; expected one of {[m.value for m in Method]}") from None


def _single(trees: list[UnrankedTree]) -> UnrankedTree:
    if len(trees) != 1:
        raise ValueError(f"decoded {len(trees)} trees, expected one")
    return trees[0]


def decompress(text: str, cfg: EvalConfig = EvalConfig()) -> UnrankedTree:
    method, body = read_method(text)
    logger.debug("decompressing %s text", method.value)
    if method is Method.DAG:
        d = parse_dag_text(body)
        return eval_dag(d, d.root, cfg)
    if method in (Method.BDAG, Method.RBDAG):
        d = parse_binary_dag_text(body)
        return _single(decode(eval_dag(d, d.root, cfg), _ENCODING[method]))
    if method in (Method.HDAG, Method.RHDAG):
        return unfold_shared(parse_shared(body), _ENCODING[method], cfg)
    if method is Method.DS:
        return parse_compressed(body).unfold(cfg)
    unfolded = unfold_slt(parse_slt(body), SLTConfig(node_budget=cfg.node_budget))
    if not isinstance(unfolded, BinaryTree):
        raise ValueError("an slt file must derive a first-child/next-sibling encoding")
    return _single(decode(unfolded, Encoding.FCNS))
