"""
Coarse Extension Lab
Streamlit dashboard for running the verification suites and browsing their records
"""

import streamlit as st
import pandas as pd
import plotly.express as px

from components.instance_selector import experiment_config_selector
from utils.errors import LabError
from utils.styles import STATUS_COLORS, apply_common_styles, status_badge, transparent_layout
from utils.suites import run_suite

# Page configuration
st.set_page_config(
    page_title="Coarse Extension Lab",
    page_icon="🔷",
    layout="wide",
    initial_sidebar_state="expanded",
)

apply_common_styles()


def main():
    with st.sidebar:
        try:
            config = experiment_config_selector("overview")
        except LabError as e:
            st.error(f"Invalid configuration: {e}")
            return
        run = st.button("Run Suites")

    st.title("Coarse Extension Lab")

    if run:
        progress = st.progress(0.0)

        def on_cell(done, total, counts):
            progress.progress(done / total, text=f"{done}/{total} cells")

        with st.spinner("Running suites..."):
            report = run_suite(config, progress=on_cell)
        st.session_state["overview_report"] = report
        st.sidebar.success(f"✓ {len(report.records)} records in {report.runtime:.1f}s")

    report = st.session_state.get("overview_report")
    if report is None:
        st.info("Choose an experiment in the sidebar and press Run Suites.")
        return

    counts = report.counts()
    col1, col2, col3, col4 = st.columns(4)
    with col1:
        st.metric("Passed", f"{counts['pass']:,}")
    with col2:
        st.metric("Failed", f"{counts['fail']:,}")
    with col3:
        st.metric("Measured", f"{counts['measured']:,}")
    with col4:
        st.metric("Errors", f"{counts['error']:,}")

    if counts["fail"] or counts["error"]:
        st.warning("Some checks failed; their witnesses are in the record table.")
    else:
        st.success("Every check passed or was measured.")

    frame = report.to_frame()

    row_col1, row_col2 = st.columns([1, 2])
    with row_col1:
        st.subheader("Records by Suite")
        by_suite = frame.groupby(["suite", "status"]).size().reset_index(name="records")
        fig = px.bar(
            by_suite,
            x="suite",
            y="records",
            color="status",
            color_discrete_map=STATUS_COLORS,
            labels={"suite": "", "records": "Records"},
        )
        st.plotly_chart(transparent_layout(fig, height=420), use_container_width=True)

    with row_col2:
        st.subheader("Records")
        statuses = st.multiselect("Status", list(STATUS_COLORS), default=list(STATUS_COLORS))
        shown = frame[frame["status"].isin(statuses)]
        st.dataframe(shown, use_container_width=True, hide_index=True, height=420)

    failing = frame[frame["status"].isin(["fail", "error"])]
    if len(failing):
        st.subheader("Failures")
        for _, row in failing.iterrows():
            with st.expander(f"{row['suite']} / {row['name']} ({row['digest']})"):
                st.markdown(status_badge(row["status"]), unsafe_allow_html=True)
                st.code(row["witness"] if pd.notna(row["witness"]) else row["detail"] or "")

    st.markdown("---")
    col_json, col_csv = st.columns(2)
    with col_json:
        st.download_button("Download JSON", report.to_json(), file_name="suite_report.json",
                           mime="application/json")
    with col_csv:
        st.download_button("Download CSV", frame.to_csv(index=False), file_name="suite_report.csv",
                           mime="text/csv")


if __name__ == "__main__":
    main()
