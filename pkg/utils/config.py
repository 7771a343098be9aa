"""
Experiment configuration
Loads and validates the JSON config that drives the batch suites
"""

import json
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from utils.errors import UsageError
from utils.paper_spaces import PRESETS

logger = logging.getLogger(__name__)

SUITES = ("metrics", "transport", "hyperspace", "euclid", "chains", "obstruction", "all")

DEFAULT_TOLERANCES = {
    "metric": 1e-9,
    "duality": 1e-7,
    "shortness": 1e-7,
    "oracle": 2e-3,
    "probe": 1e-9,
    "solver_gap": 1e-3,
    "multistart": 2e-3,
}

DEFAULT_COUNTS = {
    "transport_instances": 200,
    "short_maps": 100,
    "polytopes": 500,
    "probe_trials": 200,
    "hyperspace_instances": 60,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything a suite run depends on

    Args:
        suite: one of SUITES
        n: graph dimensions
        k: graph scales
        C: chain scales
        eps: additive slacks
        seed: base seed of every randomized workload
        tolerances: overrides merged over DEFAULT_TOLERANCES
        counts: workload sizes merged over DEFAULT_COUNTS
        preset: "general" or "squared" indexing of the graphs
        output: report path, or None for stdout
        workers: thread count for independent cells
    """
    suite: str = "all"
    n: tuple = (2, 3, 4)
    k: tuple = (1, 2, 3, 4)
    C: tuple = tuple(range(1, 51))
    eps: tuple = (0.0, 1.0, 5.0)
    seed: int = 7
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    counts: dict = field(default_factory=lambda: dict(DEFAULT_COUNTS))
    preset: str = "general"
    output: Optional[str] = None
    workers: int = 4

    def tol(self, name):
        return self.tolerances[name]

    def suites(self):
        return SUITES[:-1] if self.suite == "all" else (self.suite,)

    def to_dict(self):
        """Settings the records depend on; output path and worker count are left out"""
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("output", "workers")}


def parse_range(text):
    """'1..4' -> (1, 2, 3, 4); '2,3' -> (2, 3); a single number is a one-element grid"""
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(part) for part in text.split(",") if part.strip())


def parse_tolerance(text):
    """'oracle=1e-3' -> ('oracle', 0.001)"""
    if "=" not in text:
        raise UsageError("tolerances", f"expected name=value, got {text!r}")
    name, value = text.split("=", 1)
    try:
        return name.strip(), float(value)
    except ValueError:
        raise UsageError("tolerances", f"{value!r} is not a number") from None


def _grid(name, value, kind=int):
    if isinstance(value, (int, float)):
        value = (value,)
    try:
        if isinstance(value, str):
            value = parse_range(value)
        grid = tuple(kind(v) for v in value)
    except (TypeError, ValueError):
        raise UsageError(name, f"cannot read grid {value!r}") from None
    if not grid:
        raise UsageError(name, "grid is empty")
    return grid


def validate(config):
    """Raise UsageError naming the first bad field; returns the config unchanged"""
    if config.suite not in SUITES:
        raise UsageError("suite", f"unknown suite {config.suite!r}, expected one of {', '.join(SUITES)}")
    for name in ("n", "k", "C", "eps"):
        if not getattr(config, name):
            raise UsageError(name, "grid is empty")
    if any(n < 2 for n in config.n):
        raise UsageError("n", "graph dimensions start at 2")
    if any(k < 1 for k in config.k):
        raise UsageError("k", "graph scales start at 1")
    if any(c <= 0 for c in config.C):
        raise UsageError("C", "chain scales must be positive")
    if any(e < 0 for e in config.eps):
        raise UsageError("eps", "additive slack must be nonnegative")
    if not isinstance(config.seed, int) or isinstance(config.seed, bool):
        raise UsageError("seed", f"seed must be an integer, got {config.seed!r}")
    unknown = sorted(set(config.tolerances) - set(DEFAULT_TOLERANCES))
    if unknown:
        raise UsageError("tolerances", f"unknown tolerance {unknown[0]!r}")
    if any(v < 0 for v in config.tolerances.values()):
        raise UsageError("tolerances", "tolerances must be nonnegative")
    unknown = sorted(set(config.counts) - set(DEFAULT_COUNTS))
    if unknown:
        raise UsageError("counts", f"unknown count {unknown[0]!r}")
    if any(v < 1 for v in config.counts.values()):
        raise UsageError("counts", "counts must be positive")
    if config.preset not in PRESETS:
        raise UsageError("preset", f"unknown preset {config.preset!r}")
    return config


def config_from_dict(data):
    """Build a validated ExperimentConfig; unknown keys are rejected"""
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise UsageError(unknown[0], "unknown configuration key")

    values = dict(data)
    for name in ("n", "k"):
        if name in values:
            values[name] = _grid(name, values[name])
    if "C" in values:
        values["C"] = _grid("C", values["C"], float)
    if "eps" in values:
        values["eps"] = _grid("eps", values["eps"], float)
    values["tolerances"] = {**DEFAULT_TOLERANCES, **values.get("tolerances", {})}
    values["counts"] = {**DEFAULT_COUNTS, **values.get("counts", {})}
    return validate(ExperimentConfig(**values))


def load_config(path):
    """Read an ExperimentConfig from a JSON file"""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise UsageError("config", f"no such file {path}") from None
    except json.JSONDecodeError as e:
        raise UsageError("config", f"invalid JSON in {path}: {e}") from None
    if not isinstance(data, dict):
        raise UsageError("config", "top level must be an object")
    logger.debug("loaded config from %s", path)
    return config_from_dict(data)


def with_overrides(config, seed=None, tolerances=(), output=None):
    """Apply command line overrides on top of a loaded config"""
    changes = {}
    if seed is not None:
        changes["seed"] = int(seed)
    if tolerances:
        merged = dict(config.tolerances)
        for text in tolerances:
            name, value = parse_tolerance(text)
            merged[name] = value
        changes["tolerances"] = merged
    if output is not None:
        changes["output"] = output
    return validate(replace(config, **changes))
