# data/xml_ingest.py
from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Union

from lxml import etree

from trees.unranked import UnrankedTree

logger = logging.getLogger(__name__)

XmlSource = Union[bytes, str, Path, BinaryIO]


class XmlIngestError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class IngestConfig:
    # documents with a DOCTYPE are refused; entities are never expanded
    reject_dtd: bool = True


def _label(elem) -> str:
    q = etree.QName(elem)
    return f"{elem.prefix}:{q.localname}" if elem.prefix else q.localname


def _open(source: XmlSource) -> BinaryIO | str:
    if isinstance(source, bytes):
        return io.BytesIO(source)
    if isinstance(source, Path):
        return str(source)
    return source


def ingest_xml(source: XmlSource, cfg: IngestConfig = IngestConfig()) -> UnrankedTree:
    """
    Element structure of an XML document as a tree labeled by element names.
    Text, attributes, comments and processing instructions are ignored.
    Parsing streams; finished elements are cleared as soon as they close.
    """
    labels: list[str] = []
    children: list[list[int]] = []
    stack: list[int] = []
    events = etree.iterparse(
        _open(source),
        events=("start", "end"),
        resolve_entities=False,
        load_dtd=False,
        no_network=True,
        huge_tree=True,
        remove_comments=True,
        remove_pis=True,
    )
    try:
        for event, elem in events:
            if not isinstance(elem.tag, str):
                continue
            if event == "start":
                if not labels and cfg.reject_dtd and elem.getroottree().docinfo.doctype:
                    raise XmlIngestError("documents with a DOCTYPE are not accepted")
                v = len(labels)
                labels.append(_label(elem))
                children.append([])
                if stack:
                    children[stack[-1]].append(v)
                stack.append(v)
            else:
                stack.pop()
                elem.clear()
                # drop finished siblings so memory tracks depth, not document size
                while elem.getprevious() is not None:
                    del elem.getparent()[0]
    except etree.XMLSyntaxError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise XmlIngestError(f"ill-formed XML: {exc.msg}", line, column) from exc
    if not labels:
        raise XmlIngestError("document has no root element")
    logger.debug("ingested %d elements", len(labels))
    return UnrankedTree.from_adjacency(labels, dict(enumerate(children)), 0)


def tree_to_xml(t: UnrankedTree) -> bytes:
    """Element-only XML for a tree; labels must be valid unprefixed XML names."""
    elems: list[etree._Element] = []
    for label in t.labels:
        try:
            elems.append(etree.Element(str(label)))
        except ValueError as exc:
            raise ValueError(f"label {label!r} is not an XML element name") from exc
    for v, kids in enumerate(t.children):
        for c in kids:
            elems[v].append(elems[c])
    return etree.tostring(elems[0], xml_declaration=True, encoding="utf-8", pretty_print=True)


def read_xml_file(path: Path | str, cfg: IngestConfig = IngestConfig()) -> UnrankedTree:
    return ingest_xml(Path(path), cfg)
