"""
Obstruction Analysis Page
Least Lipschitz constants of retractions of X_N onto its Euclidean sample
"""

import streamlit as st
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from components.instance_selector import graph_grid_selector
from utils.errors import LabError
from utils.obstruction import instance_from_assembly, lambda_trend, multistart, nested_anchor_chain
from utils.paper_spaces import AssemblyParams, build_assembly
from utils.styles import apply_common_styles, transparent_layout

st.set_page_config(page_title="Obstruction Analysis", page_icon="🧱", layout="wide")

apply_common_styles()


@st.cache_data
def load_trend(n_values, k_values, epsilon, preset):
    return lambda_trend(n_values, k_values, epsilon=epsilon, preset=preset)


def create_placement_figure(assembly, inst, result):
    """Anchors, the optimal placement of the free points and their own coordinates (n = 2)"""
    fig = go.Figure()
    fig.add_trace(go.Scatter(
        x=inst.anchor_coords[:, 0], y=inst.anchor_coords[:, 1], mode="markers", name="anchors",
        marker=dict(size=12, color="#4299e1"),
        text=[assembly.space.labels[i] for i in inst.anchors], hovertemplate="%{text}<extra></extra>",
    ))
    if inst.free_coords is not None:
        fig.add_trace(go.Scatter(
            x=inst.free_coords[:, 0], y=inst.free_coords[:, 1], mode="markers", name="own coordinates",
            marker=dict(size=10, color="#718096", symbol="circle-open"),
        ))
    fig.add_trace(go.Scatter(
        x=result.placement[:, 0], y=result.placement[:, 1], mode="markers", name="placement",
        marker=dict(size=12, color="#fbbf24", symbol="diamond"),
        text=[assembly.space.labels[i] for i in inst.free], hovertemplate="%{text}<extra></extra>",
    ))
    fig.update_yaxes(scaleanchor="x", scaleratio=1)
    return transparent_layout(fig, height=480)


def main():
    st.title("Obstruction Analysis")

    with st.sidebar:
        st.header("Instances")
        n_values, k_values, preset = graph_grid_selector("obstruction")
        epsilon = st.number_input("Additive slack eps", min_value=0.0, value=0.0, step=0.5)
        run = st.button("Compute Trend")

    if not n_values or not k_values:
        st.warning("Pick at least one dimension and one scale.")
        return

    tab1, tab2, tab3 = st.tabs(["Single Instance", "Trend", "Anchor Chain"])

    with tab1:
        n, k = n_values[0], k_values[0]
        try:
            with st.spinner(f"Solving X_{n} with G_{{{n},{k}}}..."):
                assembly = build_assembly("X_N", AssemblyParams(n_values=(n,), k_values=(k,), preset=preset))
                inst = instance_from_assembly(assembly, epsilon)
                results = multistart(inst)
        except LabError as e:
            st.error(f"Cannot solve this instance: {e}")
            return
        best = min(results, key=lambda r: r.lambda_min)
        col1, col2, col3, col4 = st.columns(4)
        with col1:
            st.metric("lambda_min", f"{best.lambda_min:.5f}")
        with col2:
            st.metric("Gap Estimate", f"{best.certificate:.1e}")
        with col3:
            st.metric("Anchors / Free", f"{len(inst.anchors)} / {len(inst.free)}")
        with col4:
            spread = max(r.lambda_min for r in results) - best.lambda_min
            st.metric("Restart Spread", f"{spread:.1e}")
        if not best.converged:
            st.warning("The solver stopped before its gap estimate fell below 1e-3.")
        st.dataframe(pd.DataFrame([r.to_dict() for r in results]).drop(columns=["placement"]),
                     use_container_width=True, hide_index=True)
        if inst.dim == 2:
            st.plotly_chart(create_placement_figure(assembly, inst, best), use_container_width=True)

    with tab2:
        if not run:
            st.info("Press Compute Trend to tabulate lambda_min over the selected grid.")
        else:
            try:
                with st.spinner("Solving every (n, k) instance..."):
                    trend = load_trend(n_values, k_values, epsilon, preset)
            except LabError as e:
                st.error(f"Trend failed: {e}")
                trend = None
            if trend is not None and len(trend):
                fig = px.line(trend, x="k", y="lambda_min", color="n", markers=True,
                              labels={"lambda_min": "lambda_min", "k": "scale k"})
                st.plotly_chart(transparent_layout(fig, height=420), use_container_width=True)
                st.dataframe(trend, use_container_width=True, hide_index=True)

    with tab3:
        if preset != "general":
            st.info("The nested anchor chain uses the general indexing.")
        else:
            n, k = n_values[0], k_values[0]
            with st.spinner("Solving nested samples..."):
                chain = nested_anchor_chain(n, k, epsilon)
            st.dataframe(
                pd.DataFrame([{"sample": name, "anchors": count, "lambda_min": r.lambda_min,
                               "converged": r.converged} for name, count, r in chain]),
                use_container_width=True, hide_index=True,
            )


if __name__ == "__main__":
    main()
