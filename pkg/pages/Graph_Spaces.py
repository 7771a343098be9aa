"""
Graph Spaces Page
G_{n,k} graphs, the glued truncations built from them and their C-chain components
"""

import math

import streamlit as st
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from components.instance_selector import chain_scale_selector, graph_grid_selector
from utils.errors import LabError
from utils.metric_core import chain_components, verify_metric
from utils.paper_spaces import ASSEMBLY_KINDS, AssemblyParams, build_assembly, build_gnk, gnk_metric, chain_bound_closed_form
from utils.styles import apply_common_styles, transparent_layout

st.set_page_config(page_title="Graph Spaces", page_icon="🕸️", layout="wide")

apply_common_styles()


@st.cache_data
def load_graph(n, k):
    g = build_gnk(n, k)
    return g, gnk_metric(g)


@st.cache_data
def load_assembly(kind, n_values, k_values, preset, include_midpoints):
    params = AssemblyParams(
        n_values=n_values, k_values=k_values, preset=preset,
        include_midpoints=include_midpoints, xprime_levels=n_values,
    )
    return build_assembly(kind, params)


def create_graph_figure(g):
    """Planar drawing of G_{2,k}: inner square, outer square and the spokes"""
    fig = go.Figure()
    vertices = g.vertices
    for i, j, w in g.edges:
        fig.add_trace(go.Scatter(
            x=[vertices[i][0], vertices[j][0]],
            y=[vertices[i][1], vertices[j][1]],
            mode="lines",
            line=dict(color="#4a5568", width=2),
            hovertext=f"weight {w:g}",
            showlegend=False,
        ))
    labels = g.labels()
    colors = ["#fbbf24" if g.is_inner(i) else "#4299e1" for i in range(g.size)]
    fig.add_trace(go.Scatter(
        x=vertices[:, 0], y=vertices[:, 1],
        mode="markers",
        marker=dict(size=14, color=colors, line=dict(color="white", width=1)),
        text=labels,
        hovertemplate="%{text}<extra></extra>",
        showlegend=False,
    ))
    fig.update_yaxes(scaleanchor="x", scaleratio=1)
    return transparent_layout(fig, height=450)


def create_distance_heatmap(space):
    fig = px.imshow(
        space.dist,
        x=list(space.labels),
        y=list(space.labels),
        color_continuous_scale="Viridis",
        labels={"color": "distance"},
    )
    return transparent_layout(fig, height=550)


def chain_table(space, scales):
    rows = []
    for C in scales:
        report = chain_components(space, C)
        rows.append({
            "C": C,
            "components": len(report.components),
            "max_diameter": report.max_diameter,
            "separation": report.separation,
            "sqrt10_C": math.sqrt(10.0) * C,
            "closed_form": chain_bound_closed_form(C),
        })
    return pd.DataFrame(rows)


def main():
    st.title("Graph Spaces")

    with st.sidebar:
        st.header("Graphs")
        n_values, k_values, preset = graph_grid_selector("graphs")
        kind = st.selectbox("Assembly", ASSEMBLY_KINDS, index=ASSEMBLY_KINDS.index("Y_trunc"))
        include_midpoints = st.checkbox("Midpoints in X_N sample", value=True)
        st.markdown("---")
        scales = chain_scale_selector("graphs")

    if not n_values or not k_values:
        st.warning("Pick at least one dimension and one scale.")
        return

    tab1, tab2, tab3 = st.tabs(["Graph", "Assembly", "Chains"])

    with tab1:
        n, k = n_values[0], k_values[0]
        try:
            g, space = load_graph(n, k)
        except LabError as e:
            st.error(f"Cannot build G_{{{n},{k}}}: {e}")
            return
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("Vertices", g.size)
        with col2:
            st.metric("Edges", len(g.edges))
        with col3:
            st.metric("Diameter", f"{space.diameter():g}")
        if n == 2:
            st.plotly_chart(create_graph_figure(g), use_container_width=True)
        st.plotly_chart(create_distance_heatmap(space), use_container_width=True)

    with tab2:
        try:
            with st.spinner(f"Gluing {kind}..."):
                assembly = load_assembly(kind, n_values, k_values, preset, include_midpoints)
        except LabError as e:
            st.error(f"Cannot build {kind}: {e}")
            return
        report = verify_metric(assembly.space)
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("Points", assembly.space.size)
        with col2:
            st.metric("Metric Axioms", "pass" if report.passed else f"{len(report.violations)} violations")
        with col3:
            st.metric("Shrunk Distances", len(assembly.disagreements))
        if assembly.disagreements:
            with st.expander("Supplied distances the glued metric shrank"):
                st.dataframe(
                    pd.DataFrame(assembly.disagreements, columns=["from", "to", "supplied", "glued"]),
                    use_container_width=True, hide_index=True,
                )
        st.dataframe(
            pd.DataFrame({"label": assembly.space.labels, "tag": assembly.tags, "level": assembly.levels}),
            use_container_width=True, hide_index=True,
        )

    with tab3:
        if kind == "Xprime_slice":
            st.info("Chains are computed on the chosen assembly; pick a graph assembly to see graph chains.")
        table = chain_table(assembly.space, scales)
        fig = px.line(
            table.melt(id_vars="C", value_vars=["max_diameter", "sqrt10_C"], var_name="series"),
            x="C", y="value", color="series", markers=True,
            labels={"value": "diameter", "C": "chain scale C"},
        )
        st.plotly_chart(transparent_layout(fig, height=420), use_container_width=True)
        st.dataframe(table, use_container_width=True, hide_index=True)


if __name__ == "__main__":
    main()
