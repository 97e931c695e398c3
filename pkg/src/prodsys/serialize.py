"""JSON dump and load for systems, vector families, distributions, CP maps and reports.

Floats are written with ``repr`` precision by the json module, so every
object round-trips bit-identically.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import linalg as la
from .amalgam import CPMap
from .ccr import GridCCR
from .cluster import RandomSetDistribution
from .grid import DyadicTime
from .inclusion import GridSystem, TensorPowerSystem
from .report import Report
from .units import VectorFamily

REPORT_SCHEMA = {
    "type": "object",
    "required": ["suite", "passed", "config", "checks", "wall_time"],
    "properties": {
        "suite": {"type": "string"},
        "passed": {"type": "boolean"},
        "config": {"type": "object"},
        "wall_time": {"type": "number", "minimum": 0},
        "info": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "paper_ref", "passed", "measured", "tolerance"],
                "properties": {
                    "name": {"type": "string"},
                    "paper_ref": {"type": "string", "minLength": 1},
                    "passed": {"type": "boolean"},
                    "measured": {"type": ["number", "boolean", "string", "null"]},
                    "tolerance": {"type": ["number", "boolean", "string", "null"]},
                },
            },
        },
    },
}


# grid systems -----------------------------------------------------------

def system_to_json(sys: GridSystem) -> dict:
    """Tensor-power systems are stored by cell dimension, anything else with explicit β."""
    if isinstance(sys, GridCCR):
        return {"type": "ccr", "k": sys.k, "level": sys.level}
    if type(sys) is TensorPowerSystem:
        return {"type": "tensor_power", "cell_dim": sys.cell_dim, "level": sys.level}
    return {
        "type": "grid",
        "level": sys.level,
        "kind": sys.kind,
        "dims": {str(m): d for m, d in sorted(sys.dims.items())},
        "beta": [{"a": a, "b": b, "map": la.operator_to_json(sys.beta(a, b))} for a, b in sys.pairs()],
    }


def system_from_json(d: dict) -> GridSystem:
    kind = d.get("type", "grid")
    if kind == "ccr":
        return GridCCR(d["k"], d["level"])
    if kind == "tensor_power":
        return TensorPowerSystem(d["cell_dim"], d["level"])
    beta = {(e["a"], e["b"]): la.operator_from_json(e["map"]) for e in d["beta"]}
    return GridSystem(d["level"], {int(m): v for m, v in d["dims"].items()}, beta, d["kind"])


# vector families --------------------------------------------------------

def family_to_json(fam: VectorFamily) -> dict:
    sys = fam.system
    ms = sorted(fam.vectors)
    return {"times": [str(DyadicTime(m, sys.level)) for m in ms], "vectors": [la.vector_to_json(fam[m]) for m in ms]}


def family_from_json(d: dict, system: GridSystem) -> VectorFamily:
    vecs = {}
    for t, v in zip(d["times"], d["vectors"]):
        vecs[system.m(t)] = la.vector_from_json(v)
    return VectorFamily(system, vecs)


# CP maps ----------------------------------------------------------------

def cpmap_to_json(phi: CPMap) -> dict:
    return {"in_dim": phi.in_dim, "out_dim": phi.out_dim, "choi": la.operator_to_json(phi.choi)}


def cpmap_from_json(d: dict) -> CPMap:
    return CPMap(d["in_dim"], d["out_dim"], la.operator_from_json(d["choi"]))


# reports ----------------------------------------------------------------

def report_to_json(rep: Report, config: dict | None = None, wall_time: float = 0.0) -> dict:
    out = rep.to_dict()
    return {
        "suite": rep.name,
        "passed": out["passed"],
        "config": dict(config or {}),
        "checks": out["checks"],
        "info": out["info"],
        "wall_time": float(wall_time),
    }


def validate_report(d: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if d does not match :data:`REPORT_SCHEMA`."""
    import jsonschema

    jsonschema.validate(d, REPORT_SCHEMA)


# files ------------------------------------------------------------------

def to_json(obj) -> dict:
    """Tagged JSON for any supported object."""
    if isinstance(obj, GridSystem):
        return {"object": "system", "data": system_to_json(obj)}
    if isinstance(obj, VectorFamily):
        return {"object": "family", "system": system_to_json(obj.system), "data": family_to_json(obj)}
    if isinstance(obj, RandomSetDistribution):
        return {"object": "distribution", "data": obj.to_json()}
    if isinstance(obj, CPMap):
        return {"object": "cpmap", "data": cpmap_to_json(obj)}
    if isinstance(obj, Report):
        return {"object": "report", "data": report_to_json(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_json(d: dict):
    tag, data = d["object"], d["data"]
    if tag == "system":
        return system_from_json(data)
    if tag == "family":
        return family_from_json(data, system_from_json(d["system"]))
    if tag == "distribution":
        return RandomSetDistribution.from_json(data)
    if tag == "cpmap":
        return cpmap_from_json(data)
    if tag == "report":
        return data
    raise ValueError(f"unknown object tag {tag!r}")


def dump(obj, path) -> Path:
    """Write obj as tagged JSON; raises OSError on I/O failure."""
    path = Path(path)
    path.write_text(json.dumps(to_json(obj)))
    return path


def load(path):
    return from_json(json.loads(Path(path).read_text()))


def arrays_identical(a, b) -> bool:
    """Bitwise equality of two complex arrays."""
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and a.tobytes() == b.tobytes()
