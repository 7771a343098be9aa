"""
Suite reports
Check records, deterministic JSON output and the flattened CSV projection
"""

import hashlib
import json
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import networkx as nx
import numpy as np
import pandas as pd
import scipy

from utils.data_loader import dumps, to_plain, write_json

STATUSES = ("pass", "fail", "measured", "error")


def digest(inputs):
    """Short stable hash of a record's inputs"""
    text = json.dumps(to_plain(inputs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class CheckRecord:
    suite: str
    name: str
    inputs: dict
    value: Any
    bound: Any = None
    status: str = "measured"
    tolerance: Optional[float] = None
    witness: Any = None
    detail: Optional[str] = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def digest(self):
        return digest(self.inputs)

    @property
    def sort_key(self):
        return (self.suite, self.name, self.digest)

    def to_dict(self):
        out = {
            "suite": self.suite,
            "name": self.name,
            "inputs": self.inputs,
            "digest": self.digest,
            "value": self.value,
            "bound": self.bound,
            "status": self.status,
            "tolerance": self.tolerance,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail is not None:
            out["detail"] = self.detail
        return out


def check(suite, name, inputs, value, bound, tolerance, passed, witness=None):
    """Pass/fail record; failures keep their witness"""
    return CheckRecord(
        suite=suite,
        name=name,
        inputs=inputs,
        value=value,
        bound=bound,
        status="pass" if passed else "fail",
        tolerance=tolerance,
        witness=None if passed else witness,
    )


def measured(suite, name, inputs, value, bound=None, tolerance=None, witness=None):
    """Trend record that is neither pass nor fail"""
    return CheckRecord(
        suite=suite, name=name, inputs=inputs, value=value, bound=bound,
        status="measured", tolerance=tolerance, witness=witness,
    )


def environment_stamp():
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "networkx": nx.__version__,
        "pandas": pd.__version__,
    }


@dataclass
class SuiteReport:
    records: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    environment: dict = field(default_factory=environment_stamp)
    runtime: float = 0.0

    def sorted_records(self):
        return sorted(self.records, key=lambda r: (*r.sort_key, dumps(r.to_dict())))

    def counts(self):
        out = {status: 0 for status in STATUSES}
        for r in self.records:
            out[r.status] += 1
        return out

    @property
    def exit_code(self):
        counts = self.counts()
        return 1 if counts["fail"] or counts["error"] else 0

    def to_dict(self):
        # runtime lives in the sidecar so that reruns stay byte-identical
        return {
            "config": self.config,
            "environment": self.environment,
            "summary": self.counts(),
            "records": [r.to_dict() for r in self.sorted_records()],
        }

    def to_json(self):
        return dumps(self.to_dict())

    def to_frame(self):
        rows = []
        for r in self.sorted_records():
            row = to_plain(r.to_dict())
            row["inputs"] = json.dumps(row["inputs"], sort_keys=True)
            for key in ("value", "bound", "witness"):
                if isinstance(row.get(key), (list, dict)):
                    row[key] = json.dumps(row[key], sort_keys=True)
            rows.append(row)
        columns = ["suite", "name", "digest", "status", "value", "bound", "tolerance", "inputs", "witness", "detail"]
        return pd.DataFrame(rows).reindex(columns=columns)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)
        return Path(path)

    def write(self, path):
        """Write the report and its <path>.meta.json runtime sidecar"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        meta = path.with_name(path.name + ".meta.json")
        write_json({"runtime_seconds": round(self.runtime, 3), "records": len(self.records)}, meta)
        return path, meta
