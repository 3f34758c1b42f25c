"""Canonical JSON encoding of frames, focal sets and mass functions.

Mass JSON::

    {"variables": [{"name": "X", "values": ["x1", "x2"]}, ...],
     "focals": [{"set": {"box": {"X": ["x1"]}}, "mass": "1/10", "decimal": "0.100000"},
                {"set": {"tuples": [["x1", "z1"], ["x2", "z2"]]}, "mass": "3/5", ...}]}

Masses are reduced rational strings; ``decimal`` is informational and ignored
on load. Focals are written in canonical order.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .errors import EvidenceError, FormatError, MassError
from .frames import FocalSet, JointFrame, Variable, box, build_frame
from .mass import MassFunction
from .network import EvidentialPolytree, build_network


def rational(value: Fraction) -> str:
    return str(Fraction(value))


def decimal(value: Fraction) -> str:
    return f"{float(value):.6f}"


def parse_rational(text: Any, where: str = "value") -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise FormatError(f"{where}: expected a rational string like \"3/10\", got {text!r}")
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"{where}: not a rational number: {text!r}") from exc
    return value


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, line=exc.lineno, column=exc.colno) from exc


def dumps(document: Any) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def frame_to_json(frame: JointFrame) -> list[dict]:
    return [{"name": v.name, "values": list(v.domain)} for v in frame.variables]


def frame_from_json(document: Any) -> JointFrame:
    entries = document.get("variables") if isinstance(document, dict) else None
    if not isinstance(entries, list):
        raise FormatError("expected a \"variables\" list")
    variables = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or not isinstance(entry.get("values"), list):
            raise FormatError(f"variables[{i}]: expected {{\"name\": ..., \"values\": [...]}}")
        try:
            variables.append(Variable(str(entry.get("name", "")), tuple(str(x) for x in entry["values"])))
        except EvidenceError as exc:
            raise FormatError(f"variables[{i}]: {exc}") from exc
    try:
        return build_frame(variables)
    except EvidenceError as exc:
        raise FormatError(str(exc)) from exc


def focal_to_json(focal: FocalSet) -> dict:
    comps = focal.box_components()
    if comps is not None:
        return {"box": {v.name: [x for x in v.domain if x in c] for v, c in zip(focal.frame.variables, comps)}}
    return {"tuples": [list(config) for config in focal.members]}


def focal_from_json(document: Any, frame: JointFrame, where: str = "set") -> FocalSet:
    if not isinstance(document, dict) or len(document) != 1:
        raise FormatError(f"{where}: expected {{\"box\": ...}} or {{\"tuples\": ...}}")
    try:
        if "box" in document:
            comps = document["box"]
            if not isinstance(comps, dict):
                raise FormatError(f"{where}: box must map variables to value lists")
            return box({k: [str(x) for x in vals] for k, vals in comps.items()}, frame)
        if "tuples" in document:
            tuples = document["tuples"]
            if not isinstance(tuples, list) or not tuples:
                raise FormatError(f"{where}: tuples must be a nonempty list")
            return FocalSet.from_members(frame, [tuple(str(x) for x in t) for t in tuples])
    except FormatError:
        raise
    except EvidenceError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    raise FormatError(f"{where}: expected {{\"box\": ...}} or {{\"tuples\": ...}}")


def mass_to_json(m: MassFunction) -> dict:
    return {
        "variables": frame_to_json(m.frame),
        "focals": [
            {"set": focal_to_json(f), "mass": rational(v), "decimal": decimal(v)} for f, v in m.items()
        ],
    }


def mass_from_json(document: Any) -> MassFunction:
    frame = frame_from_json(document)
    focals = document.get("focals")
    if not isinstance(focals, list) or not focals:
        raise FormatError("expected a nonempty \"focals\" list")
    pairs = []
    for i, entry in enumerate(focals):
        if not isinstance(entry, dict) or "set" not in entry or "mass" not in entry:
            raise FormatError(f"focals[{i}]: expected {{\"set\": ..., \"mass\": ...}}")
        pairs.append(
            (focal_from_json(entry["set"], frame, f"focals[{i}].set"), parse_rational(entry["mass"], f"focals[{i}].mass"))
        )
    try:
        return MassFunction(frame, pairs)
    except MassError as exc:
        raise FormatError(str(exc)) from exc


def load_mass(text: str) -> MassFunction:
    return mass_from_json(loads(text))


def dump_mass(m: MassFunction) -> str:
    return dumps(mass_to_json(m))


def network_to_json(net: EvidentialPolytree) -> dict:
    return {
        "variables": frame_to_json(net.frame),
        "edges": [list(e) for e in net.edges],
        "valuations": {n: mass_to_json(net.valuations[n]) for n in net.frame.names if n in net.valuations},
    }


def network_from_json(document: Any) -> EvidentialPolytree:
    frame = frame_from_json(document)
    edges = document.get("edges", [])
    if not isinstance(edges, list) or any(not isinstance(e, list) or len(e) != 2 for e in edges):
        raise FormatError("\"edges\" must be a list of [parent, child] pairs")
    raw = document.get("valuations")
    if not isinstance(raw, dict):
        raise FormatError("expected a \"valuations\" object")
    valuations = {}
    for node, doc in raw.items():
        try:
            valuation = mass_from_json(doc)
        except FormatError as exc:
            raise FormatError(f"valuations.{node}: {exc}") from exc
        if not frame.contains_frame(valuation.frame):
            raise FormatError(f"valuations.{node}: variables disagree with the network's")
        valuations[str(node)] = valuation
    return build_network(frame, edges, valuations)


def load_network(text: str) -> EvidentialPolytree:
    return network_from_json(loads(text))


def iteration_to_json(iteration) -> dict:
    p_frame = next(iter(iteration.selection)).frame
    return {
        "selection": [
            {"given": focal_to_json(a_p), "set": focal_to_json(r)} for a_p, r in iteration.selection.items()
        ],
        "cover": [
            {"given": list(config), "values": [list(c) for c in a.members]}
            for config, a in zip(p_frame.configurations, iteration.cover)
        ],
        "gMin": rational(iteration.g_min),
        "focal": focal_to_json(iteration.focal),
        "qContribution": rational(iteration.contribution),
    }


def approximation_to_json(result) -> dict:
    return {
        "strategy": result.strategy.value,
        "cover": result.cover.value,
        "quality": rational(result.quality),
        "decimal": decimal(result.quality),
        "conditional": mass_to_json(result.conditional),
        "trace": [iteration_to_json(it) for it in result.trace.iterations],
    }


def certificate_to_json(cert) -> dict:
    return {
        "verdict": cert.verdict.value,
        "method": cert.method.value,
        "candidates": cert.candidates,
        "witness": mass_to_json(cert.witness) if cert.witness is not None else None,
    }


def oriented_to_json(net) -> dict:
    document = network_to_json(net)
    document.update(
        {
            "target": net.target,
            "addedEdges": [list(e) for e in net.added_edges],
            "reversedEdges": [list(e) for e in net.reversed_edges],
            "qualities": {n: rational(q) for n, q in net.qualities.items()},
        }
    )
    return document


def verification_to_json(report) -> dict:
    return {
        "target": report.target,
        "status": report.status,
        "equal": report.equal,
        "marginallyCorrect": report.correct,
        "witness": focal_to_json(report.witness) if report.witness is not None else None,
        "propagated": mass_to_json(report.propagated),
        "oracle": mass_to_json(report.oracle),
        "qualities": {n: rational(q) for n, q in report.qualities.items()},
        "addedEdges": [list(e) for e in report.added_edges],
    }
