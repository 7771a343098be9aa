"""
Instance selector component
Reusable sidebar widgets for choosing graph grids, chain scales and seeds
"""

import streamlit as st

from utils.config import DEFAULT_TOLERANCES, SUITES, config_from_dict
from utils.paper_spaces import PRESETS


def graph_grid_selector(key_suffix="", n_options=(2, 3, 4), k_options=(1, 2, 3, 4), multi=True):
    """
    Pick the (n, k) grid of graphs G_{n,k}

    Args:
        key_suffix: Unique suffix for widget keys
        n_options: Dimensions offered
        k_options: Scales offered
        multi: Allow several values per axis

    Returns:
        (n_values, k_values, preset) with tuples of ints
    """
    col1, col2 = st.columns(2)
    with col1:
        if multi:
            n_values = st.multiselect("Dimension n", list(n_options), default=[n_options[0]],
                                      key=f"n_grid_{key_suffix}")
        else:
            n_values = [st.selectbox("Dimension n", list(n_options), key=f"n_grid_{key_suffix}")]
    with col2:
        if multi:
            k_values = st.multiselect("Scale k", list(k_options), default=[k_options[0]],
                                      key=f"k_grid_{key_suffix}")
        else:
            k_values = [st.selectbox("Scale k", list(k_options), key=f"k_grid_{key_suffix}")]

    preset = st.radio(
        "Indexing",
        PRESETS,
        horizontal=True,
        key=f"preset_{key_suffix}",
        help="general: G_{n,k} at level n^2; squared: index (j, l) with l >= j gives G_{j^2, l^2}",
    )
    return tuple(sorted(n_values)), tuple(sorted(k_values)), preset


def chain_scale_selector(key_suffix="", max_scale=50):
    """Range slider for the chain scales C; returns a tuple of ints"""
    lo, hi = st.slider("Chain scale C", 1, max_scale, (1, 10), key=f"chain_scale_{key_suffix}")
    return tuple(range(lo, hi + 1))


def epsilon_selector(key_suffix="", default=(0.0, 1.0, 5.0)):
    """Additive slacks as a multiselect"""
    values = st.multiselect("Additive slack eps", [0.0, 0.5, 1.0, 2.0, 5.0], default=list(default),
                            key=f"eps_{key_suffix}")
    return tuple(sorted(values))


def seed_selector(key_suffix="", default=7):
    return int(st.number_input("Seed", min_value=0, value=default, step=1, key=f"seed_{key_suffix}"))


def experiment_config_selector(key_suffix=""):
    """
    Full sidebar form producing an ExperimentConfig

    Returns:
        The validated config; a UsageError propagates to the caller
    """
    st.header("Experiment")
    suite = st.selectbox("Suite", SUITES, index=SUITES.index("all"), key=f"suite_{key_suffix}")
    n_values, k_values, preset = graph_grid_selector(key_suffix)
    C_values = chain_scale_selector(key_suffix)
    eps_values = epsilon_selector(key_suffix)
    seed = seed_selector(key_suffix)

    with st.expander("Workload sizes"):
        counts = {
            "transport_instances": st.number_input("Transport instances", 1, 1000, 40, key=f"ot_{key_suffix}"),
            "short_maps": st.number_input("Short maps", 1, 1000, 20, key=f"maps_{key_suffix}"),
            "polytopes": st.number_input("Polytopes", 1, 5000, 120, key=f"poly_{key_suffix}"),
            "probe_trials": st.number_input("Probe trials", 1, 5000, 100, key=f"probe_{key_suffix}"),
            "hyperspace_instances": st.number_input("Hyperspace instances", 1, 1000, 20, key=f"hyp_{key_suffix}"),
        }

    with st.expander("Tolerances"):
        tolerances = {
            name: st.number_input(name, value=float(value), format="%.1e", key=f"tol_{name}_{key_suffix}")
            for name, value in DEFAULT_TOLERANCES.items()
        }

    return config_from_dict({
        "suite": suite,
        "n": n_values,
        "k": k_values,
        "C": C_values,
        "eps": eps_values,
        "seed": seed,
        "counts": {name: int(v) for name, v in counts.items()},
        "tolerances": tolerances,
        "preset": preset,
    })
