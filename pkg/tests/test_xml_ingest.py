# tests/test_xml_ingest.py
from __future__ import annotations

import io

import pytest

from data.xml_ingest import IngestConfig, XmlIngestError, ingest_xml, read_xml_file, tree_to_xml
from trees.unranked import UnrankedTree, parse_term


def test_element_structure():
    t = ingest_xml(b"<a><b/><b/></a>")
    assert t.to_term() == "a(b,b)"
    assert t.edge_count == 2


def test_text_attributes_comments_are_ignored():
    doc = b'<a id="1">text<b k="v">more</b><!-- note --><?pi x?><c/>tail</a>'
    assert ingest_xml(doc).to_term() == "a(b,c)"


def test_prefixed_names_keep_their_prefix():
    doc = b'<x:a xmlns:x="urn:x"><x:b/><c/></x:a>'
    assert ingest_xml(doc).labels == ("x:a", "x:b", "c")


def test_sources(tmp_path):
    path = tmp_path / "doc.xml"
    path.write_bytes(b"<r><s><t/></s></r>")
    expected = "r(s(t))"
    assert read_xml_file(path).to_term() == expected
    assert read_xml_file(str(path)).to_term() == expected
    assert ingest_xml(io.BytesIO(path.read_bytes())).to_term() == expected


def test_ill_formed_document_reports_position():
    with pytest.raises(XmlIngestError) as exc:
        ingest_xml(b"<a>\n<b></a>")
    assert exc.value.line is not None
    assert "ill-formed" in str(exc.value)


def test_empty_document():
    with pytest.raises(XmlIngestError):
        ingest_xml(b"")


def test_doctype_is_rejected():
    doc = b'<!DOCTYPE a [<!ENTITY e "boom">]><a>&e;</a>'
    with pytest.raises(XmlIngestError, match="DOCTYPE"):
        ingest_xml(doc)


def test_doctype_allowed_when_configured():
    t = ingest_xml(b"<!DOCTYPE a><a><b/></a>", IngestConfig(reject_dtd=False))
    assert t.to_term() == "a(b)"


def test_wide_document():
    doc = b"<r>" + b"<x/>" * 5000 + b"</r>"
    t = ingest_xml(doc)
    assert t.edge_count == 5000
    assert t.max_children == 5000


def test_round_trip_through_xml(shared_tree):
    data = tree_to_xml(shared_tree)
    assert data.startswith(b"<?xml")
    assert ingest_xml(data) == shared_tree


def test_tree_to_xml_rejects_bad_names():
    with pytest.raises(ValueError):
        tree_to_xml(UnrankedTree.build("1a", [parse_term("b")]))
