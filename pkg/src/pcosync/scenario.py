"""Scenario files: JSON documents describing one network run.

Angles may be written as numbers or as expressions in ``pi`` such as
``"3pi/2"``, ``"0.3*pi"`` or ``"-pi/4"``. Edges are 1-based ``[from, to]``
pairs.
"""
from __future__ import annotations

import ast
import json
import math
import operator
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import jsonschema

from .engine import EPS_FIRE, NetworkConfig
from .exceptions import ConfigError, PCOError
from .monitors import CHECKS, EPS_SYNC
from .phase import EPS_GEOM
from .prc import KINDS, OscillatorProfile, PhaseResponseCurve
from .topology import Topology

__all__ = ["Scenario", "parse_angle", "load_scenario", "load_topology", "parse_scenario",
           "profile_from_dict", "bundled_scenarios", "resolve_path", "PRC_SCHEMA"]

_ANGLE = {"oneOf": [{"type": "number"}, {"type": "string"}]}

PRC_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": list(KINDS)},
        "gain": {"type": "number", "exclusiveMinimum": 0},
        "value_at_pi": _ANGLE,
        "breakpoints": {"type": "array", "items": {"type": "array", "items": _ANGLE,
                                                   "minItems": 2, "maxItems": 2}},
    },
    "required": ["kind", "gain"],
    "additionalProperties": False,
}

_EDGES = {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 1},
                                     "minItems": 2, "maxItems": 2}}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "omega": _ANGLE,
        "edges": _EDGES,
        "oscillators": {"oneOf": [PRC_SCHEMA, {"type": "array", "items": PRC_SCHEMA}]},
        "initial_phases": {"type": "array", "items": _ANGLE},
        "t_max": {"type": "number", "minimum": 0},
        "sample_dt": {"type": "number", "exclusiveMinimum": 0},
        "event_budget": {"type": "integer", "minimum": 0},
        "sync_epsilon": {"type": "number", "exclusiveMinimum": 0},
        "tolerances": {
            "type": "object",
            "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in ("fire", "sync", "geom")},
            "additionalProperties": False,
        },
        "monitors": {"type": "array", "items": {"enum": list(CHECKS)}, "uniqueItems": True},
        "outputs": {
            "type": "object",
            "properties": {k: {"type": "string"} for k in ("dir", "events", "samples", "report")},
            "additionalProperties": False,
        },
    },
    "required": ["n", "omega", "edges", "oscillators", "initial_phases", "t_max"],
    "additionalProperties": False,
}

TOPOLOGY_SCHEMA = {
    "type": "object",
    "properties": {"name": {"type": "string"}, "n": {"type": "integer", "minimum": 1}, "edges": _EDGES},
    "required": ["n", "edges"],
    "additionalProperties": False,
}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow,
        ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_angle(value: Union[str, float, int]) -> float:
    """Evaluate a numeric literal or a ``pi`` arithmetic expression."""
    if isinstance(value, bool):
        raise ValueError("booleans are not angles")
    if isinstance(value, (int, float)):
        return float(value)
    text = value.strip().replace("π", "pi")
    text = re.sub(r"(\d|\))\s*(pi)\b", r"\1*\2", text)
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse angle {value!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported element in angle {value!r}")

    try:
        out = ev(tree)
    except ZeroDivisionError:
        raise ValueError(f"division by zero in angle {value!r}") from None
    if not math.isfinite(out):
        raise ValueError(f"angle {value!r} is not finite")
    return out


@dataclass
class Scenario:
    name: str
    config: NetworkConfig
    t_max: float
    sample_dt: Optional[float] = None
    event_budget: Optional[int] = None
    eps_fire: float = EPS_FIRE
    eps_sync: float = EPS_SYNC
    eps_geom: float = EPS_GEOM
    sync_epsilon: float = 1e-3
    monitors: tuple[str, ...] = CHECKS
    outputs: dict = field(default_factory=dict)
    description: str = ""


def _line_of(text: str, path) -> Optional[int]:
    # line of the innermost object key on the error path
    pos, found = 0, None
    for part in path:
        if isinstance(part, str):
            m = re.compile(r'"%s"\s*:' % re.escape(part)).search(text, pos)
            if not m:
                break
            pos, found = m.start(), m.start()
    return None if found is None else text.count("\n", 0, found) + 1


def _decode(text: str, schema: dict) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {err.message}", _line_of(text, err.absolute_path))
    return data


def profile_from_dict(spec: dict) -> OscillatorProfile:
    bp = tuple((parse_angle(a), parse_angle(v)) for a, v in spec.get("breakpoints", ()))
    vp = spec.get("value_at_pi")
    prc = PhaseResponseCurve(spec["kind"], bp, None if vp is None else parse_angle(vp))
    return OscillatorProfile(prc, float(spec["gain"]))


def _topology(data: dict) -> Topology:
    n = data["n"]
    for j, i in data["edges"]:
        if j > n or i > n:
            raise ValueError(f"edge [{j}, {i}] references a node beyond n = {n}")
    return Topology.from_edges(n, data["edges"], one_based=True)


def parse_scenario(text: str, default_name: str = "scenario") -> Scenario:
    data = _decode(text, SCENARIO_SCHEMA)
    n = data["n"]

    def section(key, build):
        try:
            return build()
        except (ValueError, PCOError) as exc:
            raise ConfigError(f"{key}: {exc}", _line_of(text, [key])) from None

    def profiles():
        osc = data["oscillators"]
        specs = [osc] * n if isinstance(osc, dict) else osc
        if len(specs) != n:
            raise ValueError(f"{len(specs)} entries for n = {n}")
        return tuple(profile_from_dict(s) for s in specs)

    def phases():
        out = [parse_angle(p) for p in data["initial_phases"]]
        if len(out) != n:
            raise ValueError(f"{len(out)} entries for n = {n}")
        return tuple(out)

    topo = section("edges", lambda: _topology(data))
    omega = section("omega", lambda: parse_angle(data["omega"]))
    profs = section("oscillators", profiles)
    init = section("initial_phases", phases)
    config = section("initial_phases", lambda: NetworkConfig(omega, profs, topo, init))
    tol = data.get("tolerances", {})
    return Scenario(
        name=data.get("name", default_name),
        config=config,
        t_max=float(data["t_max"]),
        sample_dt=data.get("sample_dt"),
        event_budget=data.get("event_budget"),
        eps_fire=tol.get("fire", EPS_FIRE),
        eps_sync=tol.get("sync", EPS_SYNC),
        eps_geom=tol.get("geom", EPS_GEOM),
        sync_epsilon=data.get("sync_epsilon", 1e-3),
        monitors=tuple(data.get("monitors", CHECKS)),
        outputs=dict(data.get("outputs", {})),
        description=data.get("description", ""),
    )


def bundled_scenarios() -> list[str]:
    root = resources.files("pcosync") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_path(path: Union[str, Path]) -> tuple[str, str]:
    """Read a scenario from disk, falling back to the bundled ones by name.

    Returns ``(text, stem)``.
    """
    p = Path(path)
    if p.is_file():
        return p.read_text(), p.name.split(".")[0]
    name = p.name.split(".")[0]
    if str(path) == p.name and name in bundled_scenarios():
        res = resources.files("pcosync") / "scenarios" / f"{name}.json"
        return res.read_text(), name
    raise ConfigError(f"no such scenario file: {path}")


def load_scenario(path: Union[str, Path]) -> Scenario:
    text, stem = resolve_path(path)
    return parse_scenario(text, stem)


def load_topology(path: Union[str, Path]) -> tuple[str, Topology]:
    """Load just the graph, from a full scenario or a bare ``{n, edges}`` file."""
    text, stem = resolve_path(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    if isinstance(raw, dict) and set(raw) <= {"name", "n", "edges"}:
        data = _decode(text, TOPOLOGY_SCHEMA)
    else:
        data = _decode(text, SCENARIO_SCHEMA)
    try:
        return data.get("name", stem), _topology(data)
    except (ValueError, PCOError) as exc:
        raise ConfigError(str(exc), _line_of(text, ["edges"])) from None
