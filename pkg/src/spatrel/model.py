"""Object model: yaw-oriented boxes, derived metrics, and the fact base.

Conventions, fixed package-wide:

* Right-handed, Y-up world coordinates, lengths in meters, angles in
  radians.  An object's position (x, y, z) is the center of its base
  rectangle; the box spans [y, y + h] vertically.
* In an object's local frame +X points to its right side and +Z points
  ahead.  ``angle`` is the yaw, rotating counterclockwise about +Y when
  viewed from above; ``yaw`` exposes the same rotation in degrees.

Objects are immutable.  Updates go through :meth:`FactBase.upsert` with a
modified copy (see :meth:`SpatialObject.evolve`).  A fact base is owned by
a single writer; snapshots (:meth:`FactBase.copy`) may be read from any
number of threads because the contained objects never change in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple


class _Absent:
    """Value of an undefined attribute; every comparison against it fails."""

    _instance: Optional["_Absent"] = None

    def __new__(cls) -> "_Absent":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ABSENT"

    def __bool__(self) -> bool:
        return False


ABSENT = _Absent()

SECTOR_SCHEMAS = ("fixed", "dimension", "nearby")
NEARBY_SCHEMAS = ("fixed", "dimension", "limit")

# Size-proportional multiplier used by the `limit` nearby schema before the
# cap in meters (the schema's factor) is applied.
LIMIT_DIMENSION_FACTOR = 2.0


@dataclass(frozen=True)
class AdjustmentSettings:
    """Tunable thresholds that parameterize deduction.

    max_gap          surfaces closer than this are in contact and lengths
                     differing by less are equal (meters)
    max_angle        orientation tolerance (radians)
    sector_schema    how far a sector reaches beyond a box face:
                     fixed     -> sector_factor meters
                     dimension -> sector_factor x that axis's extent
                     nearby    -> the reference object's nearby reach
    nearby_schema    radius inside which two objects count as near:
                     fixed     -> nearby_factor meters
                     dimension -> nearby_factor x (sum of both box radii)
                     limit     -> size-proportional radius capped at
                                  nearby_factor meters
    long_ratio       length >= ratio x smaller footprint side => long
    thin_ratio       min dimension <= max dimension / ratio => thin
    north_direction  unit (x, z) world vector pointing north
    """

    max_gap: float = 0.02
    max_angle: float = 0.087
    sector_schema: str = "fixed"
    sector_factor: float = 1.0
    nearby_schema: str = "dimension"
    nearby_factor: float = 2.0
    long_ratio: float = 4.0
    thin_ratio: float = 10.0
    north_direction: Tuple[float, float] = (0.0, 1.0)

    def validate(self) -> "AdjustmentSettings":
        if self.max_gap <= 0.0:
            raise ValueError("max_gap must be positive")
        if not 0.0 < self.max_angle < math.pi / 2:
            raise ValueError("max_angle must lie in (0, pi/2)")
        if self.sector_schema not in SECTOR_SCHEMAS:
            raise ValueError("unknown sector schema %r" % (self.sector_schema,))
        if self.nearby_schema not in NEARBY_SCHEMAS:
            raise ValueError("unknown nearby schema %r" % (self.nearby_schema,))
        if self.sector_factor <= 0.0 or self.nearby_factor <= 0.0:
            raise ValueError("schema factors must be positive")
        if self.long_ratio <= 1.0 or self.thin_ratio <= 1.0:
            raise ValueError("long_ratio and thin_ratio must exceed 1")
        nx, nz = self.north_direction
        if abs(math.hypot(nx, nz) - 1.0) > 1e-6:
            raise ValueError("north_direction must be a unit (x, z) vector")
        return self

    def evolve(self, **changes) -> "AdjustmentSettings":
        return replace(self, **changes).validate()


def _default_confidence() -> Dict[str, float]:
    return {"overall": 1.0, "label": 1.0}


@dataclass(frozen=True)
class SpatialObject:
    """A detected or conceptual box in the scene.

    ``confidence`` maps aspect names to values in [0, 1] and always carries
    at least the keys ``overall`` and ``label``.  ``custom`` holds
    user-assigned attributes such as ``shape`` or ``weight``.
    """

    id: str
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    w: float = 0.0
    h: float = 0.0
    d: float = 0.0
    angle: float = 0.0
    label: str = ""
    type: str = ""
    confidence: Mapping[str, float] = field(default_factory=_default_confidence)
    velocity: float = 0.0
    virtual: bool = False
    moving: bool = False
    observer: bool = False
    custom: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        conf = dict(self.confidence)
        conf.setdefault("overall", 1.0)
        conf.setdefault("label", conf["overall"])
        object.__setattr__(self, "confidence", conf)
        object.__setattr__(self, "custom", dict(self.custom))

    # -- geometry-free metrics ------------------------------------------

    @property
    def top(self) -> float:
        return self.y + self.h

    @property
    def center(self) -> Tuple[float, float, float]:
        """Volumetric center (the position marks the base center)."""
        return (self.x, self.y + self.h / 2.0, self.z)

    @property
    def position(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @property
    def yaw(self) -> float:
        return math.degrees(self.angle)

    @property
    def footprint(self) -> float:
        return self.w * self.d

    @property
    def volume(self) -> float:
        return self.w * self.h * self.d

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.w + self.d)

    @property
    def length(self) -> float:
        return max(self.w, self.d)

    @property
    def radius(self) -> float:
        """Half the space diagonal; the tightest sphere around the box."""
        return 0.5 * math.sqrt(self.w * self.w + self.h * self.h + self.d * self.d)

    @property
    def front_area(self) -> float:
        return self.w * self.h

    @property
    def side_area(self) -> float:
        return self.d * self.h

    @property
    def surface(self) -> float:
        return 2.0 * (self.w * self.h + self.w * self.d + self.h * self.d)

    @property
    def is_moving(self) -> bool:
        return self.moving or self.velocity > 0.0

    @property
    def shape(self) -> str:
        return str(self.custom.get("shape", ""))

    # -- settings-dependent classifications -----------------------------

    def is_equilateral(self, settings: AdjustmentSettings) -> bool:
        gap = settings.max_gap
        return abs(self.w - self.d) <= gap and abs(self.w - self.h) <= gap

    def is_long(self, settings: AdjustmentSettings) -> bool:
        base = min(self.w, self.d)
        return base > 0.0 and self.length >= settings.long_ratio * base

    def is_thin(self, settings: AdjustmentSettings) -> bool:
        hi = max(self.w, self.h, self.d)
        return hi > 0.0 and min(self.w, self.h, self.d) <= hi / settings.thin_ratio

    def evolve(self, **changes) -> "SpatialObject":
        if "confidence" not in changes:
            changes["confidence"] = dict(self.confidence)
        if "custom" not in changes:
            changes["custom"] = dict(self.custom)
        return replace(self, **changes)


@dataclass(frozen=True)
class DerivedAttributes:
    """Snapshot of the metrics deduction reads most often."""

    footprint: float
    volume: float
    perimeter: float
    length: float
    radius: float
    center: Tuple[float, float, float]
    equilateral: bool
    long: bool
    thin: bool
    moving: bool


def derive_attributes(obj: SpatialObject, settings: AdjustmentSettings) -> DerivedAttributes:
    """Pure computation; identical inputs yield identical outputs."""
    return DerivedAttributes(
        footprint=obj.footprint,
        volume=obj.volume,
        perimeter=obj.perimeter,
        length=obj.length,
        radius=obj.radius,
        center=obj.center,
        equilateral=obj.is_equilateral(settings),
        long=obj.is_long(settings),
        thin=obj.is_thin(settings),
        moving=obj.is_moving,
    )


def validate_object(obj: SpatialObject) -> SpatialObject:
    if not obj.id:
        raise ValueError("object id must be a non-empty string")
    for name in ("w", "h", "d"):
        if getattr(obj, name) < 0.0:
            raise ValueError("object %r has negative extent %s" % (obj.id, name))
    for aspect, value in obj.confidence.items():
        if not 0.0 <= float(value) <= 1.0:
            raise ValueError(
                "object %r confidence %r outside [0, 1]" % (obj.id, aspect)
            )
    if obj.velocity < 0.0:
        raise ValueError("object %r has negative velocity" % (obj.id,))
    return obj


@dataclass(frozen=True)
class SpatialRelation:
    """Directed predicate instance subject -> object.

    ``delta`` is the predicate's metric in meters (signed for size
    comparisons, a distance otherwise); ``angle`` is the yaw difference
    subject minus object, normalized to (-pi, pi].
    """

    subject: str
    predicate: str
    object: str
    delta: float = 0.0
    angle: float = 0.0

    @property
    def key(self) -> Tuple[str, str, str]:
        return (self.subject, self.predicate, self.object)


class FactBase:
    """Ordered collection of objects plus deduced relations and variables."""

    def __init__(self, objects: Sequence[SpatialObject] = ()) -> None:
        self._objects: Dict[str, SpatialObject] = {}
        self._relations: Dict[Tuple[str, str, str], SpatialRelation] = {}
        self.variables: Dict[str, float] = {}
        self.deduced_categories: set = set()
        for obj in objects:
            self.upsert(obj)

    # -- objects ---------------------------------------------------------

    def upsert(self, obj: SpatialObject) -> SpatialObject:
        """Insert or replace by id; stale relations of that id are dropped."""
        validate_object(obj)
        if obj.id in self._objects and self._objects[obj.id] == obj:
            return obj  # no change, no invalidation
        self._objects[obj.id] = obj
        self.invalidate(obj.id)
        return obj

    def invalidate(self, object_id: str) -> None:
        for key in [k for k in self._relations if object_id in (k[0], k[2])]:
            del self._relations[key]
        self.deduced_categories.clear()

    def get(self, object_id: str) -> Optional[SpatialObject]:
        return self._objects.get(object_id)

    def ids(self) -> List[str]:
        return list(self._objects)

    def object_list(self) -> List[SpatialObject]:
        return list(self._objects.values())

    def __contains__(self, object_id: str) -> bool:
        return object_id in self._objects

    def __iter__(self) -> Iterator[SpatialObject]:
        return iter(self._objects.values())

    def __len__(self) -> int:
        return len(self._objects)

    # -- relations ---------------------------------------------------------

    def add_relation(self, rel: SpatialRelation) -> None:
        if rel.subject not in self._objects or rel.object not in self._objects:
            raise ValueError(
                "relation %s references an unknown object id" % (rel.key,)
            )
        self._relations[rel.key] = rel

    def has_relation(self, subject: str, predicate: str, object_: str) -> bool:
        return (subject, predicate, object_) in self._relations

    def relation(self, subject: str, predicate: str, object_: str) -> Optional[SpatialRelation]:
        return self._relations.get((subject, predicate, object_))

    def relations_list(self) -> List[SpatialRelation]:
        return list(self._relations.values())

    def drop_predicates(self, predicates) -> None:
        preds = set(predicates)
        for key in [k for k in self._relations if k[1] in preds]:
            del self._relations[key]

    def clear_relations(self) -> None:
        self._relations.clear()
        self.deduced_categories.clear()

    def copy(self) -> "FactBase":
        other = FactBase()
        other._objects = dict(self._objects)
        other._relations = dict(self._relations)
        other.variables = dict(self.variables)
        other.deduced_categories = set(self.deduced_categories)
        return other
