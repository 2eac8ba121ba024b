"""JSON machine and policy files.

Machine::

    {"processes": [{"name", "states", "initial", "inputs", "outputs",
                    "transitions": [{"from", "action": {"send": m} | {"recv": m}, "to"}],
                    "valuations"?: {state: {var: value}}}]}

Policy::

    {"edges": [{"from", "to", "filter"?: monitor-name}],
     "monitors": [{"name", "states", "initial",
                   "registers": [{"name", "min", "max", "init"}],
                   "transitions": [{"from", "on": pattern, "guard"?, "updates"?: {reg: expr}, "to"}],
                   "emit": [{"state", "on": pattern, "guard"?}]}]}

Patterns are ``{"send": m}``, ``{"recv": m, "by": p}``, ``{"any_send": [m, ...]}``,
``{"any_recv": true}`` or ``{"any": true}``.
"""
from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any

import jsonschema

from .core import (Action, ComposabilityError, DistributedMachine, ModelError,
                   ProcessSpec, Recv, Send, compose)
from .expr import Expr, ExprError
from .monitor import (AnyReceive, AnySendOf, EmitRule, Exact, FilterMonitor,
                      MonitorError, MonitorTransition, Register, Wildcard)
from .policy import TOP, Filter, PolicyError, SecurityPolicy, Top

__all__ = [
    "FormatError", "SyntaxError_", "SchemaError", "machine_to_dict", "machine_from_dict",
    "policy_to_dict", "policy_from_dict", "parse_machine", "parse_policy",
    "load_machine", "load_policy", "dumps", "write_json",
]

log = logging.getLogger(__name__)


class FormatError(ValueError):
    """Base class for file-level errors."""


class SyntaxError_(FormatError):
    pass


class SchemaError(FormatError):
    pass


_NAME = {"type": "string", "minLength": 1}
_NAMES = {"type": "array", "items": _NAME}
_PATTERN = {
    "oneOf": [
        {"type": "object", "properties": {"send": _NAME}, "required": ["send"], "additionalProperties": False},
        {"type": "object", "properties": {"recv": _NAME, "by": _NAME}, "required": ["recv", "by"],
         "additionalProperties": False},
        {"type": "object", "properties": {"any_send": _NAMES}, "required": ["any_send"], "additionalProperties": False},
        {"type": "object", "properties": {"any_recv": {"const": True}}, "required": ["any_recv"],
         "additionalProperties": False},
        {"type": "object", "properties": {"any": {"const": True}}, "required": ["any"], "additionalProperties": False},
    ]
}

MACHINE_SCHEMA = {
    "type": "object",
    "properties": {
        "processes": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "name": _NAME, "states": _NAMES, "initial": _NAME,
                    "inputs": _NAMES, "outputs": _NAMES,
                    "transitions": {"type": "array", "items": {
                        "type": "object",
                        "properties": {
                            "from": _NAME, "to": _NAME,
                            "action": {"oneOf": [
                                {"type": "object", "properties": {"send": _NAME}, "required": ["send"],
                                 "additionalProperties": False},
                                {"type": "object", "properties": {"recv": _NAME}, "required": ["recv"],
                                 "additionalProperties": False},
                            ]},
                        },
                        "required": ["from", "action", "to"], "additionalProperties": False,
                    }},
                    "valuations": {"type": "object", "additionalProperties": {
                        "type": "object", "additionalProperties": {"type": ["integer", "string"]}}},
                },
                "required": ["name", "states", "initial", "inputs", "outputs", "transitions"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["processes"],
    "additionalProperties": False,
}

POLICY_SCHEMA = {
    "type": "object",
    "properties": {
        "edges": {"type": "array", "items": {
            "type": "object",
            "properties": {"from": _NAME, "to": _NAME, "filter": _NAME},
            "required": ["from", "to"], "additionalProperties": False,
        }},
        "monitors": {"type": "array", "items": {
            "type": "object",
            "properties": {
                "name": _NAME, "states": _NAMES, "initial": _NAME,
                "registers": {"type": "array", "items": {
                    "type": "object",
                    "properties": {"name": _NAME, "min": {"type": "integer"}, "max": {"type": "integer"},
                                   "init": {"type": "integer"}},
                    "required": ["name", "min", "max", "init"], "additionalProperties": False,
                }},
                "transitions": {"type": "array", "items": {
                    "type": "object",
                    "properties": {"from": _NAME, "to": _NAME, "on": _PATTERN, "guard": {"type": "string"},
                                   "updates": {"type": "object", "additionalProperties": {"type": "string"}}},
                    "required": ["from", "on", "to"], "additionalProperties": False,
                }},
                "emit": {"type": "array", "items": {
                    "type": "object",
                    "properties": {"state": _NAME, "on": _PATTERN, "guard": {"type": "string"}},
                    "required": ["state", "on"], "additionalProperties": False,
                }},
            },
            "required": ["name", "states", "initial"], "additionalProperties": False,
        }},
    },
    "required": ["edges"],
    "additionalProperties": False,
}


def _validate(data: Any, schema: dict, what: str) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        # oneOf failures are vague; report the deepest specific cause
        while err.context:
            err = min(err.context, key=lambda e: (-len(e.absolute_path), e.message))
        where = "/".join(str(p) for p in err.absolute_path) or "<top level>"
        raise SchemaError(f"{what}: {where}: {err.message}")


def _loads(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SyntaxError_(f"{what}: line {e.lineno} column {e.colno}: {e.msg}") from None


# ---------------------------------------------------------------- machines

def _action_to_dict(a: Action) -> dict:
    return {"send": a.msg} if isinstance(a, Send) else {"recv": a.msg}


def machine_to_dict(machine: DistributedMachine) -> dict:
    procs = []
    for p in machine.processes:
        order = {s: i for i, s in enumerate(sorted(p.states))}
        trans = sorted(p.step.items(), key=lambda kv: (order[kv[0][0]], isinstance(kv[0][1], Recv), kv[0][1].msg))
        entry = {
            "name": p.id,
            "states": sorted(p.states),
            "initial": p.initial,
            "inputs": sorted(p.inputs),
            "outputs": sorted(p.outputs),
            "transitions": [{"from": s, "action": _action_to_dict(a), "to": t} for (s, a), t in trans],
        }
        if p.valuations:
            entry["valuations"] = {s: dict(p.valuations[s]) for s in sorted(p.valuations)}
        procs.append(entry)
    return {"processes": procs}


def machine_from_dict(data: Any, what: str = "machine") -> DistributedMachine:
    _validate(data, MACHINE_SCHEMA, what)
    procs = []
    for i, pd in enumerate(data["processes"]):
        step = {}
        for j, t in enumerate(pd["transitions"]):
            act = t["action"]
            a = Send(act["send"]) if "send" in act else Recv(pd["name"], act["recv"])
            key = (t["from"], a)
            if key in step and step[key] != t["to"]:
                raise SchemaError(f"{what}: processes/{i}/transitions/{j}: second target for {t['from']} --{a}-->")
            step[key] = t["to"]
        try:
            procs.append(ProcessSpec(pd["name"], frozenset(pd["states"]), pd["initial"],
                                     frozenset(pd["inputs"]), frozenset(pd["outputs"]), step,
                                     pd.get("valuations", {})))
        except ModelError as e:
            raise SchemaError(f"{what}: processes/{i}: {e}") from None
    return compose(procs)


# ---------------------------------------------------------------- policies

def _pattern_to_dict(p) -> dict:
    if isinstance(p, Exact):
        a = p.action
        return {"send": a.msg} if isinstance(a, Send) else {"recv": a.msg, "by": a.receiver}
    if isinstance(p, AnySendOf):
        return {"any_send": sorted(p.msgs)}
    if isinstance(p, AnyReceive):
        return {"any_recv": True}
    return {"any": True}


def _pattern_from_dict(d: dict):
    if "send" in d:
        return Exact(Send(d["send"]))
    if "recv" in d:
        return Exact(Recv(d["by"], d["recv"]))
    if "any_send" in d:
        return AnySendOf(frozenset(d["any_send"]))
    if "any_recv" in d:
        return AnyReceive()
    return Wildcard()


def monitor_to_dict(m: FilterMonitor) -> dict:
    out: dict[str, Any] = {
        "name": m.name, "states": sorted(m.states), "initial": m.initial,
        "registers": [{"name": r.name, "min": r.min, "max": r.max, "init": r.init} for r in m.registers],
    }
    trans = []
    for t in m.transitions:
        e: dict[str, Any] = {"from": t.src, "on": _pattern_to_dict(t.pattern)}
        if t.guard is not None:
            e["guard"] = t.guard.source
        if t.updates:
            e["updates"] = {r: x.source for r, x in t.updates}
        e["to"] = t.dst
        trans.append(e)
    out["transitions"] = trans
    emit = []
    for r in m.emit:
        e = {"state": r.state, "on": _pattern_to_dict(r.pattern)}
        if r.guard is not None:
            e["guard"] = r.guard.source
        emit.append(e)
    out["emit"] = emit
    return out


def monitor_from_dict(d: dict, where: str) -> FilterMonitor:
    try:
        regs = tuple(Register(r["name"], r["min"], r["max"], r["init"]) for r in d.get("registers", []))
        trans = tuple(
            MonitorTransition(t["from"], _pattern_from_dict(t["on"]), t["to"],
                              Expr(t["guard"]) if "guard" in t else None,
                              tuple((k, Expr(v)) for k, v in t.get("updates", {}).items()))
            for t in d.get("transitions", []))
        emit = tuple(EmitRule(e["state"], _pattern_from_dict(e["on"]), Expr(e["guard"]) if "guard" in e else None)
                     for e in d.get("emit", []))
        return FilterMonitor(d["name"], frozenset(d["states"]), d["initial"], regs, trans, emit)
    except (MonitorError, ExprError) as e:
        raise PolicyError(f"{where}: {e}") from None


def policy_to_dict(policy: SecurityPolicy) -> dict:
    order = {d: i for i, d in enumerate(policy.domains)}
    edges = []
    monitors: dict[str, FilterMonitor] = {}
    for (s, d), lab in sorted(policy.edges.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]])):
        e = {"from": s, "to": d}
        if isinstance(lab, Filter):
            name = lab.monitor.name
            if name in monitors and monitors[name] != lab.monitor:
                raise PolicyError(f"two different monitors are both named {name!r}")
            monitors[name] = lab.monitor
            e["filter"] = name
        edges.append(e)
    return {"edges": edges, "monitors": [monitor_to_dict(monitors[n]) for n in sorted(monitors)]}


def policy_from_dict(data: Any, machine: DistributedMachine, what: str = "policy") -> SecurityPolicy:
    _validate(data, POLICY_SCHEMA, what)
    monitors = {}
    for i, md in enumerate(data.get("monitors", [])):
        if md["name"] in monitors:
            raise PolicyError(f"{what}: monitors/{i}: duplicate monitor name {md['name']!r}")
        monitors[md["name"]] = monitor_from_dict(md, f"{what}: monitors/{i}")
    edges: dict = {}
    for i, ed in enumerate(data["edges"]):
        key = (ed["from"], ed["to"])
        for end in key:
            if end not in machine.index:
                raise PolicyError(f"{what}: edges/{i}: unknown domain {end!r}")
        if key in edges:
            raise PolicyError(f"{what}: edges/{i}: second edge {key[0]} -> {key[1]}")
        if "filter" in ed:
            if ed["filter"] not in monitors:
                raise PolicyError(f"{what}: edges/{i}: unknown monitor {ed['filter']!r}")
            edges[key] = Filter(monitors[ed["filter"]])
        else:
            edges[key] = TOP
    for d in machine.proc_ids:
        if not isinstance(edges.get((d, d), TOP), Top):
            raise PolicyError(f"{what}: self-edge of {d} must not carry a filter")
        if (d, d) not in edges:
            log.warning("note: inserted mandatory self-edge %s -> %s", d, d)
            edges[(d, d)] = TOP
    return SecurityPolicy(machine.proc_ids, edges)


# ---------------------------------------------------------------- files

def _resolve(path: str | os.PathLike) -> Path:
    p = Path(path)
    if not p.exists() and p.suffix != ".json" and p.with_name(p.name + ".json").exists():
        return p.with_name(p.name + ".json")
    return p


def parse_machine(text: str, what: str = "machine") -> DistributedMachine:
    return machine_from_dict(_loads(text, what), what)


def parse_policy(text: str, machine: DistributedMachine, what: str = "policy") -> SecurityPolicy:
    return policy_from_dict(_loads(text, what), machine, what)


def load_machine(path: str | os.PathLike) -> DistributedMachine:
    p = _resolve(path)
    return parse_machine(p.read_text(encoding="utf-8"), str(path))


def load_policy(path: str | os.PathLike, machine: DistributedMachine) -> SecurityPolicy:
    p = _resolve(path)
    return parse_policy(p.read_text(encoding="utf-8"), machine, str(path))


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def write_json(path: str | os.PathLike, data: Any) -> None:
    Path(path).write_text(dumps(data), encoding="utf-8")


ComposabilityError = ComposabilityError  # re-exported for callers catching parse errors
