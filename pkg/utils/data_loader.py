"""
JSON I/O for lab objects
Spaces and assemblies, plus the plain-value conversion every report goes through
"""

import json
import math
from pathlib import Path

import numpy as np

from utils.errors import StructuralError
from utils.metric_core import FiniteMetricSpace


def to_plain(obj):
    """
    Convert to JSON-safe values

    numpy scalars and arrays become Python numbers and lists, tuples become
    lists, and non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


def dumps(obj):
    """Canonical text: sorted keys, two-space indent, trailing newline"""
    return json.dumps(to_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def _float(value):
    if isinstance(value, str):
        return float(value)
    return value


def space_to_dict(space):
    out = {"name": space.name, "labels": list(space.labels), "dist": space.dist.tolist()}
    if space.coords is not None:
        out["coords"] = space.coords.tolist()
    return out


def space_from_dict(data):
    try:
        dist = np.array([[_float(v) for v in row] for row in data["dist"]], dtype=float)
        labels = data.get("labels") or [f"p{i}" for i in range(len(dist))]
    except (KeyError, TypeError) as e:
        raise StructuralError(f"malformed space record: {e}") from None
    return FiniteMetricSpace(
        labels=tuple(labels), dist=dist, coords=data.get("coords"), name=data.get("name", "")
    )


def assembly_to_dict(assembly):
    return {
        "kind": assembly.kind,
        "space": space_to_dict(assembly.space),
        "tags": list(assembly.tags),
        "levels": list(assembly.levels),
        "disagreements": [list(d) for d in assembly.disagreements],
    }
