# app.py
from __future__ import annotations

import streamlit as st

from analysis.stats import stats
from census.counting import CensusConfig, TreeClass, census_table
from census.plots import plot_average_sizes
from dags.dag import minimize
from dags.grammar import render_binary_dag, render_dag
from dags.hybrid import HybridConfig, build_hdag
from data.xml_ingest import XmlIngestError, ingest_xml
from grammars.compressed import build_compressed_dag
from grammars.queries import build_sibseq_index, build_subtree_index, sibseq_eq, subtree_eq
from grammars.slt import hdag_to_one_slt, to_one_slt
from trees.binary import Encoding, encode
from trees.terms import TermSyntaxError
from trees.unranked import UnrankedTree, parse_term
from utils import BG_MAIN, BG_PANEL, BORDER_SUBTLE, GREEN, TEXT_MUTED, TEXT_PRIMARY, fmt_fraction, fmt_ratio

DEFAULT_TERM = "f(f(g(a),g(a)),g(a),g(a))"

st.set_page_config(
    page_title="Tree Compression Lab",
    layout="wide",
    initial_sidebar_state="expanded",
)

st.markdown(
    f"""
    <style>
    .stApp {{
        background: {BG_MAIN};
        color: {TEXT_PRIMARY};
    }}
    section[data-testid="stSidebar"] {{
        background: {BG_PANEL};
        border-right: 1px solid {BORDER_SUBTLE};
    }}
    button[data-baseweb="tab"][aria-selected="true"] {{
        color: {TEXT_PRIMARY} !important;
        border-bottom: 2px solid {GREEN} !important;
    }}
    [data-testid="stMetricLabel"] {{
        color: {TEXT_MUTED};
    }}
    </style>
    """,
    unsafe_allow_html=True,
)


def _get_qp() -> dict:
    try:
        return dict(st.query_params)
    except Exception:
        return {}


def _get_str(qp: dict, key: str, default: str) -> str:
    v = qp.get(key, default)
    if isinstance(v, list):
        return v[0] if v else default
    return v


def _set_qp(params: dict) -> None:
    try:
        st.query_params.clear()
        for k, v in params.items():
            st.query_params[k] = str(v)
    except Exception:
        pass


@st.cache_data(show_spinner=False)
def cached_census(cls: str, m: int, n_max: int):
    return census_table(cls, m, range(0, n_max + 1), predict=True, cfg=CensusConfig())


def load_tree(term: str, upload) -> UnrankedTree:
    if upload is not None:
        return ingest_xml(upload.getvalue())
    return parse_term(term)


qp = _get_qp()

with st.sidebar:
    st.header("Input")
    term = st.text_area("Tree (term notation)", value=_get_str(qp, "term", DEFAULT_TERM))
    upload = st.file_uploader("…or an XML document", type=["xml"])

    st.divider()
    st.header("Census")
    census_class = st.selectbox("Tree class", [c.value for c in TreeClass])
    census_m = st.slider("Labels m", 1, 4, 1)
    census_n = st.slider("Largest edge size n", 2, 60, 20)

_set_qp({"term": term})

tab_overview, tab_grammars, tab_queries, tab_census = st.tabs(["Overview", "Grammars", "Queries", "Census"])

try:
    tree = load_tree(term, upload)
except (TermSyntaxError, XmlIngestError) as e:
    st.error(f"Could not read the tree: {e}")
    st.stop()

doc = stats(tree)

with tab_overview:
    st.markdown(f"## {tree.labels[0]} · {doc.edges} edges")
    st.caption(
        "Sizes count edges; edges into □ are never counted. "
        f"Average children per inner node: {fmt_fraction(doc.avg_children, 3)}."
    )

    c1, c2, c3, c4 = st.columns(4)
    c1.metric("dag", doc.dag, fmt_ratio(doc.dag, doc.edges), delta_color="off")
    c2.metric("bdag", doc.bdag, fmt_ratio(doc.bdag, doc.edges), delta_color="off")
    c3.metric("hdag", doc.hdag, fmt_ratio(doc.hdag, doc.edges), delta_color="off")
    c4.metric("RePair dag", doc.ds, fmt_ratio(doc.ds, doc.edges), delta_color="off")

    st.dataframe([doc.as_row()], use_container_width=True, hide_index=True)
    if doc.violations():
        st.error("Broken size relations: " + "; ".join(doc.violations()))

with tab_grammars:
    left, right = st.columns(2)
    with left:
        st.subheader("dag")
        st.code(render_dag(minimize(tree)), language="text")
        st.subheader("bdag")
        st.code(render_binary_dag(minimize(encode(tree, Encoding.FCNS))), language="text")
    with right:
        if tree.edge_count:
            st.subheader("hdag")
            h = build_hdag(tree)
            st.code(h.render(), language="text")
            st.subheader("rhdag")
            st.code(build_hdag(tree, HybridConfig(encoding=Encoding.LCPS)).render(), language="text")
            st.subheader("1-SLT from the hdag")
            st.code(hdag_to_one_slt(h).render(), language="text")
        ds = build_compressed_dag(tree)
        st.subheader("RePair-compressed dag")
        st.code(ds.render(), language="text")
        st.subheader("1-SLT from the RePair dag")
        st.code(to_one_slt(ds).render(), language="text")

with tab_queries:
    st.caption("Preorder positions start at 1.")
    q1, q2, q3 = st.columns(3)
    p = q1.number_input("p", min_value=1, max_value=tree.node_count, value=1)
    q = q2.number_input("q", min_value=1, max_value=tree.node_count, value=tree.node_count)
    rep = q3.selectbox("Representation", ["dag", "bdag", "hdag"])

    if rep == "dag":
        g = minimize(tree)
    elif rep == "bdag":
        g = minimize(encode(tree, Encoding.FCNS))
    elif tree.edge_count:
        g = build_hdag(tree)
    else:
        g = minimize(tree)

    st.metric("subtree equal", "yes" if subtree_eq(build_subtree_index(g), int(p), int(q)) else "no")
    st.metric("sibling sequence equal", "yes" if sibseq_eq(build_sibseq_index(g), int(p), int(q)) else "no")

with tab_census:
    st.caption("Exact accumulated dag sizes over every tree of each size, against the leading-term law.")
    table = cached_census(census_class, census_m, census_n)
    st.pyplot(plot_average_sizes(table))
    st.dataframe(table, use_container_width=True, hide_index=True)
    st.download_button(
        "Download TSV",
        table.to_csv(sep="\t", index=False),
        file_name=f"census-{census_class}-m{census_m}.tsv",
        mime="text/tab-separated-values",
    )
