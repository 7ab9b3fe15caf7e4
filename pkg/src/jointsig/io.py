"""Model files and table serialisation.

Model file (JSON)::

    {
      "types": [{"name": "T", "distribution": {"kind": "exponential", "rate": 1.0}}],
      "components": [{"id": "A", "type": "T"}, ...],
      "systems": [{"name": "S1", "structure": {"or": [{"atom": "B"}, ...]}}, ...]
    }

Table CSV columns, in order: ``order`` (joint tables only), one column per
level coordinate (named as in :attr:`SignatureTable.names`),
``favourable``, ``total``, ``value`` (``p/q``), ``decimal`` (12 significant
digits).
"""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import jsonschema

from . import lifetimes, structure
from .errors import ModelError
from .model import SharedModel, build_model
from .signature import Event, Order, SignatureTable

MODEL_SCHEMA = {
    "type": "object",
    "required": ["types", "components", "systems"],
    "additionalProperties": False,
    "properties": {
        "types": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "distribution": {"type": "object", "required": ["kind"]},
                },
            },
        },
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "type"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "pattern": "^[A-Za-z0-9_]+$"},
                    "type": {"type": "string"},
                },
            },
        },
        "systems": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "structure"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "structure": {"type": "object"},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class ModelFile:
    types: tuple[str, ...]
    distributions: dict
    components: dict  # id -> type
    systems: tuple[tuple[str, structure.Structure], ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.systems)

    def model(self, systems: Sequence[str] | None = None) -> SharedModel:
        """Shared model on the named systems (default: all, in file order)."""
        chosen = list(self.names) if systems is None else list(systems)
        lookup = dict(self.systems)
        missing = [s for s in chosen if s not in lookup]
        if missing:
            raise ModelError(f"unknown system(s): {', '.join(missing)}")
        return build_model([(s, lookup[s]) for s in chosen], self.components, self.types)


def _locate(text: str, path) -> str:
    """Best-effort 'line L, column C' of a JSON path inside ``text``."""
    decoder = json.JSONDecoder()
    pos = 0
    try:
        for key in path:
            if isinstance(key, int):
                pos = text.index("[", pos) + 1
                for _ in range(key):
                    _, end = decoder.raw_decode(text, _skip_ws(text, pos))
                    pos = text.index(",", end) + 1
                pos = _skip_ws(text, pos)
            else:
                pos = text.index(json.dumps(key), pos)
                pos = text.index(":", pos) + 1
                pos = _skip_ws(text, pos)
    except ValueError:
        return ""
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return f"line {line}, column {col}"


def _skip_ws(text, pos):
    while pos < len(text) and text[pos] in " \t\r\n":
        pos += 1
    return pos


def parse_model(text: str, source: str = "<model>") -> ModelFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        jsonschema.validate(doc, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = _locate(text, list(exc.absolute_path))
        path = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise ModelError(f"{source}: {where + ': ' if where else ''}at {path}: {exc.message}") from None

    types = []
    dists = {}
    for i, t in enumerate(doc["types"]):
        if t["name"] in dists or t["name"] in types:
            raise ModelError(f"{source}: duplicate type {t['name']!r}")
        types.append(t["name"])
        if "distribution" in t:
            try:
                dists[t["name"]] = lifetimes.from_dict(t["distribution"])
            except ModelError as exc:
                where = _locate(text, ["types", i, "distribution"])
                raise type(exc)(f"{source}: {where}: {exc}") from None
    comps = {}
    for c in doc["components"]:
        if c["id"] in comps:
            raise ModelError(f"{source}: duplicate component {c['id']!r}")
        comps[c["id"]] = c["type"]
    systems = []
    for i, s in enumerate(doc["systems"]):
        try:
            systems.append((s["name"], structure.from_dict(s["structure"])))
        except ModelError as exc:
            where = _locate(text, ["systems", i, "structure"])
            raise ModelError(f"{source}: {where}: system {s['name']!r}: {exc}") from None
    names = [n for n, _ in systems]
    if len(set(names)) != len(names):
        raise ModelError(f"{source}: duplicate system names")
    return ModelFile(tuple(types), dists, comps, tuple(systems))


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), str(path))


def model_to_dict(mf: ModelFile) -> dict:
    return {
        "types": [
            {"name": t, **({"distribution": lifetimes.to_dict(mf.distributions[t])} if t in mf.distributions else {})}
            for t in mf.types
        ],
        "components": [{"id": c, "type": t} for c, t in mf.components.items()],
        "systems": [{"name": n, "structure": structure.to_dict(s)} for n, s in mf.systems],
    }


def fmt(p: float) -> str:
    return format(float(p), ".12g")


def fmt_fraction(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def table_to_dict(table: SignatureTable) -> dict:
    return {
        "event": table.event.value,
        "order": table.order.label if table.order is not None else None,
        "levels": list(table.names),
        "maxima": list(table.maxima),
        "rows": [
            {
                "levels": list(lv),
                "favourable": f,
                "total": t,
                "value": fmt_fraction(Fraction(f, t)),
                "decimal": fmt(f / t),
            }
            for lv, f, t in zip(table.levels.tolist(), table.favourable, table.total)
        ],
    }


def table_from_dict(doc: dict, layout=None) -> SignatureTable:
    rows = doc["rows"]
    order = Order.parse(doc["order"]) if doc.get("order") else None
    return SignatureTable(
        Event(doc["event"]),
        order,
        doc["levels"],
        [r["levels"] for r in rows],
        [int(r["favourable"]) for r in rows],
        [int(r["total"]) for r in rows],
        layout,
        doc.get("maxima"),
    )


def tables_to_csv(tables: Iterable[SignatureTable], with_order: bool = True) -> str:
    tables = list(tables)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = (["order"] if with_order else []) + list(tables[0].names) + ["favourable", "total", "value", "decimal"]
    w.writerow(head)
    for tab in tables:
        tag = tab.order.label if tab.order is not None else ""
        for lv, f, t in zip(tab.levels.tolist(), tab.favourable, tab.total):
            w.writerow(([tag] if with_order else []) + lv + [f, t, fmt_fraction(Fraction(f, t)), fmt(f / t)])
    return buf.getvalue()


def grid_to_csv(columns: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns))
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()
