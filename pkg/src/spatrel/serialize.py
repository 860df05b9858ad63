"""Fact documents: JSON persistence for objects, relations, and settings.

A fact document is one JSON object::

    {
      "settings": {"max_gap": 0.02, "north": [0.0, 1.0], ...},
      "objects": [
        {"id": "table", "position": [0, 0, 0], "size": [1.2, 0.75, 0.8],
         "angle": 0.0, "label": "table", "type": "furniture", ...}
      ],
      "relations": [
        {"subject": "lamp", "predicate": "ontop", "object": "table",
         "delta": 0.0, "angle": 0.0}
      ],
      "variables": {},
      "deduced": ["adjacency"]
    }

Every block except "objects" is optional on load.  Objects may spell
coordinates either as "position"/"size" triples or as flat x/y/z/w/h/d
keys.  Dumping is deterministic: fixed key order, objects in insertion
order, so identical fact bases serialize to identical bytes.  Errors
name the offending record, e.g. ``objects[3]: missing "id"``.
"""

from __future__ import annotations

import json
from typing import Dict, List, Optional, Tuple

from .model import (
    AdjustmentSettings, FactBase, SpatialObject, SpatialRelation,
    validate_object,
)


class FactDocumentError(ValueError):
    """A fact document failed validation; the message names the record."""


_SETTINGS_KEYS = (
    "max_gap", "max_angle", "sector_schema", "sector_factor",
    "nearby_schema", "nearby_factor", "long_ratio", "thin_ratio", "north",
)
_OBJECT_KEYS = frozenset(
    "id position size x y z w h d angle label type confidence velocity "
    "virtual moving observer custom".split()
)
_RELATION_KEYS = frozenset(("subject", "predicate", "object", "delta", "angle"))


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FactDocumentError("%s: expected a number, got %r" % (where, value))
    return float(value)


def _triple(value, where: str) -> Tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise FactDocumentError("%s: expected three numbers" % where)
    return tuple(_number(v, where) for v in value)


def _load_settings(payload) -> AdjustmentSettings:
    if not isinstance(payload, dict):
        raise FactDocumentError("settings: expected an object")
    unknown = sorted(set(payload) - set(_SETTINGS_KEYS))
    if unknown:
        raise FactDocumentError(
            "settings: unknown keys %s" % ", ".join(map(repr, unknown))
        )
    changes: Dict[str, object] = {}
    for key in ("max_gap", "max_angle", "sector_factor", "nearby_factor",
                "long_ratio", "thin_ratio"):
        if key in payload:
            changes[key] = _number(payload[key], "settings.%s" % key)
    for key in ("sector_schema", "nearby_schema"):
        if key in payload:
            if not isinstance(payload[key], str):
                raise FactDocumentError("settings.%s: expected a string" % key)
            changes[key] = payload[key]
    if "north" in payload:
        if (not isinstance(payload["north"], (list, tuple))
                or len(payload["north"]) != 2):
            raise FactDocumentError("settings.north: expected two numbers")
        changes["north_direction"] = tuple(
            _number(v, "settings.north") for v in payload["north"]
        )
    try:
        return AdjustmentSettings().evolve(**changes).validate()
    except ValueError as exc:
        raise FactDocumentError("settings: %s" % exc) from exc


def _load_object(payload, where: str) -> SpatialObject:
    if not isinstance(payload, dict):
        raise FactDocumentError("%s: expected an object record" % where)
    unknown = sorted(set(payload) - _OBJECT_KEYS)
    if unknown:
        raise FactDocumentError(
            "%s: unknown keys %s" % (where, ", ".join(map(repr, unknown)))
        )
    if "id" not in payload or not isinstance(payload["id"], str):
        raise FactDocumentError('%s: missing "id"' % where)
    fields: Dict[str, object] = {"id": payload["id"]}
    if "position" in payload:
        fields["x"], fields["y"], fields["z"] = _triple(
            payload["position"], where + ".position"
        )
    if "size" in payload:
        fields["w"], fields["h"], fields["d"] = _triple(
            payload["size"], where + ".size"
        )
    for key in "xyzwhd":
        if key in payload:
            fields[key] = _number(payload[key], "%s.%s" % (where, key))
    for key in ("angle", "velocity"):
        if key in payload:
            fields[key] = _number(payload[key], "%s.%s" % (where, key))
    for key in ("label", "type"):
        if key in payload:
            if not isinstance(payload[key], str):
                raise FactDocumentError("%s.%s: expected a string" % (where, key))
            fields[key] = payload[key]
    for key in ("virtual", "moving", "observer"):
        if key in payload:
            if not isinstance(payload[key], bool):
                raise FactDocumentError("%s.%s: expected a boolean" % (where, key))
            fields[key] = payload[key]
    if "confidence" in payload:
        if not isinstance(payload["confidence"], dict):
            raise FactDocumentError("%s.confidence: expected an object" % where)
        fields["confidence"] = {
            k: _number(v, "%s.confidence.%s" % (where, k))
            for k, v in payload["confidence"].items()
        }
    if "custom" in payload:
        if not isinstance(payload["custom"], dict):
            raise FactDocumentError("%s.custom: expected an object" % where)
        fields["custom"] = dict(payload["custom"])
    obj = SpatialObject(**fields)
    try:
        validate_object(obj)
    except ValueError as exc:
        raise FactDocumentError("%s: %s" % (where, exc)) from exc
    return obj


def _load_relation(payload, where: str) -> SpatialRelation:
    if not isinstance(payload, dict):
        raise FactDocumentError("%s: expected a relation record" % where)
    unknown = sorted(set(payload) - _RELATION_KEYS)
    if unknown:
        raise FactDocumentError(
            "%s: unknown keys %s" % (where, ", ".join(map(repr, unknown)))
        )
    for key in ("subject", "predicate", "object"):
        if key not in payload or not isinstance(payload[key], str):
            raise FactDocumentError('%s: missing "%s"' % (where, key))
    return SpatialRelation(
        subject=payload["subject"],
        predicate=payload["predicate"],
        object=payload["object"],
        delta=_number(payload.get("delta", 0.0), where + ".delta"),
        angle=_number(payload.get("angle", 0.0), where + ".angle"),
    )


def loads_facts(text: str) -> Tuple[FactBase, AdjustmentSettings]:
    """Parse a fact document; raises FactDocumentError on bad records."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FactDocumentError("not valid JSON: %s" % exc) from exc
    if not isinstance(payload, dict):
        raise FactDocumentError("top level: expected a JSON object")
    unknown = sorted(
        set(payload) - {"settings", "objects", "relations", "variables", "deduced"}
    )
    if unknown:
        raise FactDocumentError(
            "top level: unknown keys %s" % ", ".join(map(repr, unknown))
        )
    settings = _load_settings(payload.get("settings", {}))
    fb = FactBase()
    records = payload.get("objects", [])
    if not isinstance(records, list):
        raise FactDocumentError("objects: expected a list")
    for i, record in enumerate(records):
        obj = _load_object(record, "objects[%d]" % i)
        if obj.id in fb:
            raise FactDocumentError(
                "objects[%d]: duplicate id %r" % (i, obj.id)
            )
        fb.upsert(obj)
    records = payload.get("relations", [])
    if not isinstance(records, list):
        raise FactDocumentError("relations: expected a list")
    for i, record in enumerate(records):
        relation = _load_relation(record, "relations[%d]" % i)
        try:
            fb.add_relation(relation)
        except ValueError as exc:
            raise FactDocumentError("relations[%d]: %s" % (i, exc)) from exc
    variables = payload.get("variables", {})
    if not isinstance(variables, dict):
        raise FactDocumentError("variables: expected an object")
    fb.variables.update(variables)
    deduced = payload.get("deduced", [])
    if not isinstance(deduced, list) or not all(
        isinstance(c, str) for c in deduced
    ):
        raise FactDocumentError("deduced: expected a list of category names")
    fb.deduced_categories.update(deduced)
    return fb, settings


def _settings_payload(settings: AdjustmentSettings) -> Dict[str, object]:
    return {
        "max_gap": settings.max_gap,
        "max_angle": settings.max_angle,
        "sector_schema": settings.sector_schema,
        "sector_factor": settings.sector_factor,
        "nearby_schema": settings.nearby_schema,
        "nearby_factor": settings.nearby_factor,
        "long_ratio": settings.long_ratio,
        "thin_ratio": settings.thin_ratio,
        "north": list(settings.north_direction),
    }


def _object_payload(obj: SpatialObject) -> Dict[str, object]:
    return {
        "id": obj.id,
        "position": [obj.x, obj.y, obj.z],
        "size": [obj.w, obj.h, obj.d],
        "angle": obj.angle,
        "label": obj.label,
        "type": obj.type,
        "confidence": dict(obj.confidence),
        "velocity": obj.velocity,
        "virtual": obj.virtual,
        "moving": obj.moving,
        "observer": obj.observer,
        "custom": dict(obj.custom),
    }


def _relation_payload(rel: SpatialRelation) -> Dict[str, object]:
    return {
        "subject": rel.subject,
        "predicate": rel.predicate,
        "object": rel.object,
        "delta": rel.delta,
        "angle": rel.angle,
    }


def _variable_payload(value):
    # calc() may store whole objects; keep the dump JSON-clean regardless
    if isinstance(value, SpatialObject):
        return _object_payload(value)
    if isinstance(value, (list, tuple)):
        return [_variable_payload(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _variable_payload(v) for k, v in value.items()}
    if value is None or isinstance(value, (str, int, float, bool)):
        return value
    return repr(value)


def dumps_facts(
    fb: FactBase, settings: Optional[AdjustmentSettings] = None
) -> str:
    """Serialize deterministically: same fact base, same bytes."""
    payload = {
        "settings": _settings_payload(settings or AdjustmentSettings()),
        "objects": [_object_payload(o) for o in fb.object_list()],
        "relations": [_relation_payload(r) for r in fb.relations_list()],
        "variables": {
            k: _variable_payload(v) for k, v in sorted(fb.variables.items())
        },
        "deduced": sorted(fb.deduced_categories),
    }
    return json.dumps(payload, indent=2) + "\n"


def load_facts(path: str) -> Tuple[FactBase, AdjustmentSettings]:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_facts(handle.read())


def dump_facts(
    fb: FactBase, path: str, settings: Optional[AdjustmentSettings] = None
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_facts(fb, settings))
