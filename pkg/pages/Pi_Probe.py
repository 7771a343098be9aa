"""
Pi Probe Page
Empirical check of how far the min-norm point map is from being short
"""

import streamlit as st
import pandas as pd
import numpy as np
import plotly.graph_objects as go
import plotly.express as px

from components.instance_selector import seed_selector
from utils.errors import LabError
from utils.euclid_convex import ProbeFamily, min_norm_point, pi_lemma_probe
from utils.styles import apply_common_styles, transparent_layout

st.set_page_config(page_title="Pi Probe", page_icon="📐", layout="wide")

apply_common_styles()

FAMILIES = ("random", "thin_segments", "translated_singletons", "identical")


def create_witness_figure(A, B):
    """The two witness polytopes, their nearest points and the origin"""
    fig = go.Figure()
    for name, P, color in (("A", A, "#4299e1"), ("B", B, "#fbbf24")):
        v = P.vertices
        closed = np.vstack([v, v[:1]])
        fig.add_trace(go.Scatter(x=closed[:, 0], y=closed[:, 1], mode="lines+markers",
                                 name=name, line=dict(color=color, width=3)))
        y = min_norm_point(P)
        fig.add_trace(go.Scatter(x=[y[0]], y=[y[1]], mode="markers", name=f"pi({name})",
                                 marker=dict(symbol="x", size=14, color=color)))
    fig.add_trace(go.Scatter(x=[0], y=[0], mode="markers", name="origin",
                             marker=dict(size=10, color="white")))
    fig.update_yaxes(scaleanchor="x", scaleratio=1)
    return transparent_layout(fig, height=480)


def main():
    st.title("Min-Norm Point Probe")

    with st.sidebar:
        st.header("Probe")
        family = st.selectbox("Family", FAMILIES)
        trials = st.slider("Trials", 10, 2000, 200, step=10)
        dim = st.slider("Dimension", 2, 6, 2)
        max_vertices = st.slider("Vertices per polytope", 1, 12, 4)
        seed = seed_selector("probe")

    try:
        with st.spinner("Sampling polytope pairs..."):
            report = pi_lemma_probe(trials, seed, ProbeFamily(family, dim=dim, max_vertices=max_vertices), workers=4)
    except LabError as e:
        st.error(f"Probe failed: {e}")
        return

    col1, col2, col3, col4 = st.columns(4)
    with col1:
        st.metric("Fixed Pair Ratio", f"{report.fixed_ratio:.4f}")
    with col2:
        st.metric("Family Max Ratio", f"{report.family_max_ratio:.4f}")
    with col3:
        st.metric("Skipped Pairs", report.skipped)
    with col4:
        st.metric("Shortness", "violated" if report.shortness_violated else "holds")

    if report.shortness_violated:
        st.warning("The probe found pairs where |pi(A) - pi(B)| exceeds the Hausdorff distance.")

    row_col1, row_col2 = st.columns(2)
    with row_col1:
        st.subheader("Ratio Distribution")
        ratios = pd.DataFrame([r for r in report.records if r["trial"] != "fixed"])
        if len(ratios):
            fig = px.histogram(ratios, x="ratio", nbins=40, color_discrete_sequence=["#1f77b4"],
                               labels={"ratio": "|pi(A) - pi(B)| / d_H(A, B)"})
            fig.add_vline(x=1.0, line_dash="dash", line_color="#f56565")
            st.plotly_chart(transparent_layout(fig, height=420, showlegend=False), use_container_width=True)
        else:
            st.info("Every sampled pair had Hausdorff distance zero.")
    with row_col2:
        st.subheader("Worst Pair")
        A, B = report.witness
        if A.dim == 2:
            st.plotly_chart(create_witness_figure(A, B), use_container_width=True)
        else:
            st.json({"A": A.vertices.tolist(), "B": B.vertices.tolist()})


if __name__ == "__main__":
    main()
