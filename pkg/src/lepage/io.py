"""JSON problem, section and g-tensor files.

Complex numbers are stored as ``["p/q", "r/s"]`` so that exact values survive
a round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from . import expr as E
from .chart import Chart
from .errors import SchemaError
from .gaussian import Gauss
from .gtensor import GTensor, canonical_from_quadratic, random_constant
from .lagrangian import GeneralLagrangian
from .legendre import LepageanSystem
from .parser import parse

_COMPLEX = {
    "type": "array",
    "items": {"type": ["string", "number"]},
    "minItems": 2,
    "maxItems": 2,
}
_TEXT = {"type": "string"}

PROBLEM_SCHEMA: dict = {
    "type": "object",
    "required": ["n", "m", "lagrangian"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 9},
        "m": {"type": "integer", "minimum": 1, "maximum": 9},
        "parameters": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "additionalProperties": False,
                "properties": {"name": {"type": "string", "pattern": "^[A-Za-z][A-Za-z0-9_]*$"},
                               "default": _COMPLEX},
            },
        },
        "lagrangian": {
            "oneOf": [
                {"type": "object", "required": ["expr"], "additionalProperties": False,
                 "properties": {"expr": _TEXT}},
                {"type": "object", "required": ["a", "b", "c"], "additionalProperties": False,
                 "properties": {
                     "a": _TEXT,
                     "b": {"type": "array", "items": {"type": "array", "items": _TEXT}},
                     "c": {"type": "array", "items": {"type": "array", "items": {
                         "type": "array", "items": {"type": "array", "items": _TEXT}}}},
                 }},
            ]
        },
        "g": {
            "type": "object",
            "required": ["mode"],
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["explicit", "canonical", "random"]},
                "components": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["sigma", "nu", "i", "j", "expr"],
                        "additionalProperties": False,
                        "properties": {
                            "sigma": {"type": "integer"},
                            "nu": {"type": "integer"},
                            "i": {"type": "integer"},
                            "j": {"type": "integer"},
                            "expr": _TEXT,
                        },
                    },
                },
                "seed": {"type": "integer"},
            },
        },
    },
}

SECTION_SCHEMA: dict = {
    "type": "object",
    "required": ["fields"],
    "additionalProperties": False,
    "properties": {
        "fields": {"type": "array", "items": _TEXT},
        "momenta": {"type": "array", "items": _TEXT},
        "bindings": {"type": "object", "additionalProperties": _COMPLEX},
    },
}

GTENSOR_SCHEMA: dict = {
    "type": "object",
    "required": ["n", "m", "components"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "components": PROBLEM_SCHEMA["properties"]["g"]["properties"]["components"],
    },
}


def _validate(doc: Any, schema: dict) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(path, exc.message) from None


def _read_json(source) -> Any:
    if isinstance(source, Mapping):
        return source
    try:
        return json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("<root>", f"invalid JSON: {exc}") from None


def complex_to_json(value) -> list[str]:
    return list(Gauss.coerce(value).to_pair())


def complex_from_json(pair, path: str = "") -> Gauss:
    try:
        return Gauss.from_pair(pair)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(path, f"bad complex value {pair!r}: {exc}") from None


# -- problems -------------------------------------------------------------------


@dataclass
class Problem:
    system: LepageanSystem
    g_mode: str = "explicit"
    seed: int | None = None
    doc: dict = field(default_factory=dict, repr=False)


def _components(doc_components, chart: Chart, params, path: str) -> dict:
    comps = {}
    for k, c in enumerate(doc_components or []):
        s, nu, i, j = c["sigma"], c["nu"], c["i"], c["j"]
        where = f"{path}/{k}"
        if not (1 <= s < nu <= chart.m):
            raise SchemaError(where, f"explicit components need 1 <= sigma < nu <= m, got sigma={s}, nu={nu}")
        if not (1 <= i < j <= chart.n):
            raise SchemaError(where, f"explicit components need 1 <= i < j <= n, got i={i}, j={j}")
        if (s, nu, i, j) in comps:
            raise SchemaError(where, "duplicate component")
        comps[(s, nu, i, j)] = parse(c["expr"], chart, params)
    return comps


def problem_from_dict(doc: Mapping) -> Problem:
    _validate(doc, PROBLEM_SCHEMA)
    chart = Chart(doc["n"], doc["m"])
    params, defaults = [], {}
    for k, p in enumerate(doc.get("parameters", [])):
        if chart.normalize(p["name"]) is not None or p["name"] == "im":
            raise SchemaError(f"parameters/{k}/name", f"{p['name']!r} collides with a coordinate name")
        if p["name"] in params:
            raise SchemaError(f"parameters/{k}/name", f"duplicate parameter {p['name']!r}")
        params.append(p["name"])
        if "default" in p:
            defaults[p["name"]] = complex_from_json(p["default"], f"parameters/{k}/default")

    lag = doc["lagrangian"]
    if "expr" in lag:
        L = parse(lag["expr"], chart, params)
    else:
        a = parse(lag["a"], chart, params)
        b, c = lag["b"], lag["c"]
        if len(b) != chart.m or any(len(row) != chart.n for row in b):
            raise SchemaError("lagrangian/b", f"b must be an {chart.m}x{chart.n} array indexed [sigma][j]")
        terms = [a]
        for s in range(chart.m):
            for j in range(chart.n):
                terms.append(E.mul(parse(b[s][j], chart, params), E.Var(chart.jet(s + 1, j + 1))))
        shape_ok = len(c) == chart.m and all(
            len(c[s]) == chart.m and all(len(c[s][v]) == chart.n and all(len(r) == chart.n for r in c[s][v])
                                         for v in range(chart.m)) for s in range(chart.m))
        if not shape_ok:
            raise SchemaError("lagrangian/c", "c must be an m x m x n x n array indexed [sigma][nu][j][k]")
        for s in range(chart.m):
            for v in range(chart.m):
                for j in range(chart.n):
                    for k in range(chart.n):
                        coef = parse(c[s][v][j][k], chart, params)
                        if not E.is_zero(coef):
                            terms.append(E.mul(coef, E.Var(chart.jet(s + 1, j + 1)), E.Var(chart.jet(v + 1, k + 1))))
        L = E.add(*terms)
    lagrangian = GeneralLagrangian(chart, L, tuple(params), defaults)

    gdoc = doc.get("g", {"mode": "explicit", "components": []})
    mode, seed = gdoc["mode"], gdoc.get("seed")
    if mode == "explicit":
        g = GTensor(chart, _components(gdoc.get("components"), chart, params, "g/components"),
                    tuple(params), defaults)
    elif mode == "canonical":
        g = canonical_from_quadratic(lagrangian)
    else:
        g = random_constant(chart, 42 if seed is None else seed)
    return Problem(LepageanSystem(lagrangian, g), mode, seed, dict(doc))


def load_problem(path) -> LepageanSystem:
    return load_problem_file(path).system


def load_problem_file(path) -> Problem:
    return problem_from_dict(_read_json(path))


def gtensor_to_json(g: GTensor) -> list[dict]:
    return [
        {"sigma": s, "nu": nu, "i": i, "j": j, "expr": E.to_text(val)}
        for (s, nu, i, j), val in sorted(g.components.items())
    ]


def gtensor_document(g: GTensor) -> dict:
    return {"n": g.chart.n, "m": g.chart.m, "components": gtensor_to_json(g)}


def gtensor_from_json(doc: Mapping, params=(), defaults=None) -> GTensor:
    _validate(doc, GTENSOR_SCHEMA)
    chart = Chart(doc["n"], doc["m"])
    return GTensor(chart, _components(doc["components"], chart, params, "components"), tuple(params), defaults or {})


def problem_to_dict(sys: LepageanSystem) -> dict:
    ch = sys.chart
    doc: dict = {"n": ch.n, "m": ch.m}
    defaults = sys.defaults
    if sys.params:
        doc["parameters"] = [
            {"name": p, **({"default": complex_to_json(defaults[p])} if p in defaults else {})}
            for p in sys.params
        ]
    doc["lagrangian"] = {"expr": E.to_text(sys.lagrangian.expr)}
    doc["g"] = {"mode": "explicit", "components": gtensor_to_json(sys.g)}
    return doc


def write_problem(sys: LepageanSystem, path=None) -> str:
    text = json.dumps(problem_to_dict(sys), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# -- sections -------------------------------------------------------------------


@dataclass
class SectionData:
    fields: tuple
    momenta: tuple | None
    bindings: dict


def load_section(source, chart: Chart, params=()) -> SectionData:
    doc = _read_json(source)
    _validate(doc, SECTION_SCHEMA)
    if len(doc["fields"]) != chart.m:
        raise SchemaError("fields", f"expected {chart.m} field expressions, got {len(doc['fields'])}")
    allowed = set(chart.x_names) | set(params)

    def parse_x(text, where):
        e = parse(text, chart, params)
        stray = e.names - allowed
        if stray:
            raise SchemaError(where, f"section expressions may use only x and parameters, got {sorted(stray)}")
        return e

    fields = tuple(parse_x(t, f"fields/{k}") for k, t in enumerate(doc["fields"]))
    momenta = None
    if "momenta" in doc:
        if len(doc["momenta"]) != chart.size:
            raise SchemaError("momenta", f"expected {chart.size} momentum expressions")
        momenta = tuple(parse_x(t, f"momenta/{k}") for k, t in enumerate(doc["momenta"]))
    bindings = {k: complex_from_json(v, f"bindings/{k}") for k, v in doc.get("bindings", {}).items()}
    unknown = set(bindings) - set(params)
    if unknown:
        raise SchemaError("bindings", f"unknown parameters {sorted(unknown)}")
    return SectionData(fields, momenta, bindings)
