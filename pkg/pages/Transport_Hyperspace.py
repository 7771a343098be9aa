"""
Transport and Hyperspace Page
Kantorovich distances with their couplings and potentials, and Hausdorff
distances between convex sets of measures
"""

import streamlit as st
import pandas as pd
import numpy as np
import plotly.express as px

from components.instance_selector import seed_selector
from utils import sampling
from utils.errors import LabError
from utils.measure_hyperspace import ConvexMeasureSet, canonicalize, directed_hausdorff, dist_point_to_hull
from utils.transport import kantorovich
from utils.styles import apply_common_styles, transparent_layout

st.set_page_config(page_title="Transport & Hyperspace", page_icon="⚖️", layout="wide")

apply_common_styles()


def create_coupling_heatmap(result, space):
    support = np.flatnonzero(result.plan.coupling.sum(axis=1) + result.plan.coupling.sum(axis=0) > 0)
    labels = [space.labels[i] for i in support]
    fig = px.imshow(
        result.plan.coupling[np.ix_(support, support)],
        x=labels, y=labels,
        color_continuous_scale="Blues",
        labels={"color": "mass", "x": "to", "y": "from"},
    )
    return transparent_layout(fig, height=420)


def create_measure_scatter(space, mu, nu, phi):
    frame = pd.DataFrame({
        "x": space.coords[:, 0],
        "y": space.coords[:, 1],
        "label": space.labels,
        "mu": mu.weights,
        "nu": nu.weights,
        "potential": phi,
    })
    fig = px.scatter(
        frame, x="x", y="y", color="potential", size=frame["mu"] + frame["nu"] + 0.02,
        hover_data=["label", "mu", "nu", "potential"], color_continuous_scale="RdBu",
    )
    fig.update_yaxes(scaleanchor="x", scaleratio=1)
    return transparent_layout(fig, height=420)


def transport_section(seed, size):
    rng = np.random.default_rng([seed, 0])
    space = sampling.random_space(rng, size)
    mu = sampling.random_measure(rng, space, max(1, size // 2))
    nu = sampling.random_measure(rng, space, max(1, size // 2))
    result = kantorovich(mu, nu)

    col1, col2, col3 = st.columns(3)
    with col1:
        st.metric("Primal", f"{result.plan.cost:.6f}")
    with col2:
        st.metric("Dual", f"{result.potential.value:.6f}")
    with col3:
        st.metric("Duality Gap", f"{result.gap:.1e}")

    col_left, col_right = st.columns(2)
    with col_left:
        st.subheader("Optimal Coupling")
        st.plotly_chart(create_coupling_heatmap(result, space), use_container_width=True)
    with col_right:
        st.subheader("Measures and Short Potential")
        st.plotly_chart(create_measure_scatter(space, mu, nu, result.potential.phi), use_container_width=True)


def hyperspace_section(seed, size, generators):
    rng = np.random.default_rng([seed, 1])
    space = sampling.random_space(rng, size)
    A = ConvexMeasureSet(space, sampling.random_generators(rng, space, generators))
    B = ConvexMeasureSet(space, sampling.random_generators(rng, space, generators))

    forward, fw = directed_hausdorff(A, B)
    backward, bw = directed_hausdorff(B, A)
    col1, col2, col3 = st.columns(3)
    with col1:
        st.metric("Hausdorff", f"{max(forward, backward):.6f}")
    with col2:
        st.metric("A to B", f"{forward:.6f}")
        st.caption(f"attained at generator {fw} of A")
    with col3:
        st.metric("B to A", f"{backward:.6f}")
        st.caption(f"attained at generator {bw} of B")

    rows = []
    for name, src, dst in (("A", A, B), ("B", B, A)):
        for i, g in enumerate(src.generators):
            hull = dist_point_to_hull(g, dst)
            rows.append({"set": name, "generator": i, "distance": hull.value,
                         "mixture": np.round(hull.mixture, 4).tolist()})
    st.dataframe(pd.DataFrame(rows), use_container_width=True, hide_index=True)

    canonical = canonicalize(A)
    st.caption(f"A keeps {len(canonical)} of {len(A)} generators after canonicalization")


def main():
    st.title("Transport & Hyperspace")

    with st.sidebar:
        st.header("Instance")
        seed = seed_selector("transport")
        size = st.slider("Points", 2, 30, 10)
        generators = st.slider("Generators per set", 1, 5, 3)

    tab1, tab2 = st.tabs(["Kantorovich", "Hyperspace"])
    try:
        with tab1:
            with st.spinner("Solving transport..."):
                transport_section(seed, size)
        with tab2:
            with st.spinner("Solving hull programs..."):
                hyperspace_section(seed, size, generators)
    except LabError as e:
        st.error(f"Solver failed: {e}")


if __name__ == "__main__":
    main()
