"""Predicate registry and relation deduction.

Eleven predicate categories cover proximity, directionality, adjacency,
orientation, connectivity, sectoriality, assembly, visibility,
comparability, similarity, and geography.  ``topology`` is an umbrella
name expanding to the six geometric categories most queries need.

Frames: directionality, adjacency and sectoriality read the subject's
center inside the object's local frame; visibility reads both centers in
the observer's frame; geography projects world-plane offsets onto the
configured north.  Deduction closes the relation set under the inverse
laws (left(s,o) emits right(o,s), ontop emits beneath, ...), so a
predicate holds whenever its defining test passes in either orientation
of the pair.

Threshold comparisons are inclusive: a distance exactly at max_gap still
counts as contact, a yaw difference exactly at max_angle still counts as
aligned.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from . import geometry
from .model import AdjustmentSettings, FactBase, SpatialObject, SpatialRelation

SECTOR_CODES = (
    "i",
    "a", "b", "l", "r", "o", "u",
    "al", "ar", "bl", "br",
    "ao", "au", "bo", "bu",
    "lo", "lu", "ro", "ru",
    "alo", "alu", "aro", "aru",
    "blo", "blu", "bro", "bru",
)

CATEGORIES: Dict[str, Tuple[str, ...]] = {
    "proximity": ("near", "far"),
    "directionality": ("left", "right", "ahead", "behind", "above", "below"),
    "adjacency": (
        "leftside", "rightside", "frontside", "backside", "beside",
        "upperside", "lowerside", "ontop", "beneath",
    ),
    "orientation": ("aligned", "orthogonal", "opposite"),
    "connectivity": ("on", "at", "by", "in"),
    "sectoriality": SECTOR_CODES,
    "assembly": (
        "disjoint", "inside", "containing", "overlapping", "crossing",
        "touching", "meeting",
    ),
    "visibility": ("infront", "atrear", "seenleft", "seenright"),
    "comparability": (
        "shorter", "longer", "taller", "thinner", "wider", "smaller",
        "bigger", "fitting", "exceeding",
    ),
    "similarity": (
        "sameheight", "samewidth", "samedepth", "samelength",
        "sameperimeter", "samefront", "sameside", "samefootprint",
        "samesurface", "samevolume", "samecuboid", "congruent",
        "sameposition", "samecenter", "sameshape",
    ),
    "geography": (
        "north", "south", "east", "west",
        "northeast", "northwest", "southeast", "southwest",
    ),
}

TOPOLOGY = (
    "proximity", "directionality", "adjacency",
    "sectoriality", "assembly", "orientation",
)

PREDICATE_ALIASES = {"over": "above", "under": "below"}

PREDICATE_CATEGORY: Dict[str, str] = {}
for _cat, _preds in CATEGORIES.items():
    for _p in _preds:
        PREDICATE_CATEGORY[_p] = _cat

INVERSES = {
    "left": "right", "right": "left",
    "ahead": "behind", "behind": "ahead",
    "above": "below", "below": "above",
    "ontop": "beneath", "beneath": "ontop",
    "inside": "containing", "containing": "inside",
    "smaller": "bigger", "bigger": "smaller",
    "shorter": "longer", "longer": "shorter",
    "infront": "atrear", "atrear": "infront",
    "seenleft": "seenright", "seenright": "seenleft",
    "north": "south", "south": "north",
    "east": "west", "west": "east",
    "northeast": "southwest", "southwest": "northeast",
    "northwest": "southeast", "southeast": "northwest",
}

SYMMETRIC = frozenset(
    ("near", "far", "disjoint", "touching", "meeting", "beside", "at", "by",
     "aligned", "orthogonal", "opposite") + CATEGORIES["similarity"]
)


def canonical_predicate(name: str) -> str:
    return PREDICATE_ALIASES.get(name, name)


def predicate_category(name: str) -> Optional[str]:
    return PREDICATE_CATEGORY.get(canonical_predicate(name))


def expand_categories(names: Iterable[str]) -> List[str]:
    """Validate and expand category names; unknown names are rejected."""
    out: List[str] = []
    for name in names:
        if name == "topology":
            for cat in TOPOLOGY:
                if cat not in out:
                    out.append(cat)
        elif name in CATEGORIES:
            if name not in out:
                out.append(name)
        else:
            raise ValueError("unknown relation category %r" % (name,))
    return out


def resolve_observer(fb: FactBase, observer_id: Optional[str] = None) -> SpatialObject:
    """Explicit id wins; otherwise there must be exactly one flagged observer."""
    if observer_id is not None:
        obj = fb.get(observer_id)
        if obj is None:
            raise ValueError("observer %r is not in the fact base" % (observer_id,))
        return obj
    flagged = [obj for obj in fb if obj.observer]
    if len(flagged) != 1:
        raise ValueError(
            "visibility needs an observer: pass an id or flag exactly one "
            "object (found %d)" % len(flagged)
        )
    return flagged[0]


# ---------------------------------------------------------------------------
# shared pair measurements

class _Pair:
    """Measurements shared by several predicates of one ordered pair."""

    def __init__(self, s: SpatialObject, o: SpatialObject, settings: AdjustmentSettings):
        self.s, self.o, self.settings = s, o, settings
        self.gap = settings.max_gap
        self.cdist = geometry.center_distance(s, o)
        self.radius = geometry.nearby_radius(s, o, settings)
        self.yaw_diff = geometry.normalize_angle(s.angle - o.angle)
        self._mdist: Optional[float] = None
        self._intersects: Optional[bool] = None
        self._sector: Optional[Tuple[bool, Optional[str]]] = None

    @property
    def mdist(self) -> float:
        if self._mdist is None:
            self._mdist = geometry.min_distance(self.s, self.o)
        return self._mdist

    @property
    def intersects(self) -> bool:
        if self._intersects is None:
            self._intersects = geometry.intersects(self.s, self.o)
        return self._intersects

    @property
    def sector(self) -> Optional[str]:
        """Sector of the subject's center around the object."""
        if self._sector is None:
            self._sector = (
                True,
                geometry.classify_sector(self.o, self.s.center, self.settings),
            )
        return self._sector[1]

    @property
    def near(self) -> bool:
        """Near is symmetric: within radius and neither center swallowed."""
        if self.cdist > self.radius + geometry.TOL:
            return False
        return not geometry.point_in_box(self.o, self.s.center) and not (
            geometry.point_in_box(self.s, self.o.center)
        )

    @property
    def touching(self) -> bool:
        return not self.intersects and self.mdist <= self.gap + geometry.TOL

    @property
    def beside(self) -> bool:
        """Near with overlapping vertical spans, not intersecting."""
        return (
            self.near
            and not self.intersects
            and geometry.vertical_overlap(self.s, self.o) > geometry.TOL
        )

    @property
    def meeting(self) -> bool:
        return self.touching and geometry.meeting_faces(self.s, self.o, self.settings)

    def rel(self, predicate: str, delta: float) -> SpatialRelation:
        return SpatialRelation(self.s.id, predicate, self.o.id, delta, self.yaw_diff)


# ---------------------------------------------------------------------------
# per-category evaluation (ordered pair, before inverse closure)

def _proximity(p: _Pair) -> List[SpatialRelation]:
    if p.near:
        return [p.rel("near", p.cdist)]
    if p.cdist > p.radius + geometry.TOL:
        return [p.rel("far", p.cdist)]
    return []


def _directionality(p: _Pair) -> List[SpatialRelation]:
    # the subject center's signed offsets in the object's frame; the base
    # center shares x and z with the volumetric center, so no shift needed
    out = []
    lx, _, lz = geometry.local_from_world(p.o, p.s.center)
    dy = p.s.center[1] - p.o.center[1]
    if lx < -geometry.TOL:
        out.append(p.rel("left", -lx))
    elif lx > geometry.TOL:
        out.append(p.rel("right", lx))
    if lz > geometry.TOL:
        out.append(p.rel("ahead", lz))
    elif lz < -geometry.TOL:
        out.append(p.rel("behind", -lz))
    if dy > geometry.TOL:
        out.append(p.rel("above", dy))
    elif dy < -geometry.TOL:
        out.append(p.rel("below", -dy))
    return out


_SIDE_SECTORS = {"l": "leftside", "r": "rightside", "a": "frontside", "b": "backside"}


def _adjacency(p: _Pair) -> List[SpatialRelation]:
    out = []
    if p.intersects or not p.near:
        return out
    sector = p.sector
    if sector in _SIDE_SECTORS:
        out.append(p.rel(_SIDE_SECTORS[sector], p.mdist))
    if sector == "o":
        out.append(p.rel("upperside", p.mdist))
        if p.mdist <= p.gap + geometry.TOL:
            out.append(p.rel("ontop", p.mdist))
    if sector == "u":
        out.append(p.rel("lowerside", p.mdist))
        if p.mdist <= p.gap + geometry.TOL:
            out.append(p.rel("beneath", p.mdist))
    if p.beside:
        out.append(p.rel("beside", p.mdist))
    return out


def _orientation(p: _Pair) -> List[SpatialRelation]:
    out = []
    dev = abs(p.yaw_diff)
    tol = p.settings.max_angle + geometry.TOL
    if dev <= tol:
        out.append(p.rel("aligned", p.cdist))
    if abs(dev - math.pi) <= tol:
        out.append(p.rel("opposite", p.cdist))
    if abs(dev - math.pi / 2.0) <= tol:
        out.append(p.rel("orthogonal", p.cdist))
    return out


def _connectivity(p: _Pair) -> List[SpatialRelation]:
    out = []
    if not p.intersects:
        if p.near and p.sector == "o" and p.mdist <= p.gap + geometry.TOL:
            out.append(p.rel("on", p.mdist))
        if p.beside and p.meeting:
            out.append(p.rel("at", p.mdist))
        if p.touching:
            out.append(p.rel("by", p.mdist))
    if geometry.contains(p.o, p.s):
        out.append(p.rel("in", abs(p.o.volume - p.s.volume)))
    return out


def _sectoriality(p: _Pair) -> List[SpatialRelation]:
    sector = p.sector
    if sector is None:
        return []
    return [p.rel(sector, p.cdist)]


def _assembly(p: _Pair) -> List[SpatialRelation]:
    out = []
    if not p.intersects:
        out.append(p.rel("disjoint", p.cdist))
        if p.touching:
            out.append(p.rel("touching", p.mdist))
            if p.meeting:
                out.append(p.rel("meeting", p.mdist))
        return out
    vol_diff = abs(p.s.volume - p.o.volume)
    inside = geometry.contains(p.o, p.s)
    containing = geometry.contains(p.s, p.o)
    if inside:
        out.append(p.rel("inside", vol_diff))
    if containing:
        out.append(p.rel("containing", vol_diff))
    crossing = not inside and not containing and geometry.crossing_axes(p.s, p.o)
    if crossing:
        out.append(p.rel("crossing", p.cdist))
    if not inside and not containing and not crossing:
        out.append(p.rel("overlapping", p.cdist))
    return out


def _visibility(p: _Pair, observer: SpatialObject) -> List[SpatialRelation]:
    if observer.id in (p.s.id, p.o.id):
        return []
    half = math.pi / 2.0
    bearings = []
    for obj in (p.s, p.o):
        lx, _, lz = geometry.local_from_world(observer, obj.center)
        bearings.append((math.atan2(lx, lz), math.hypot(lx, lz)))
    (bs, ds), (bo, do) = bearings
    if abs(bs) >= half or abs(bo) >= half:
        return []
    out = []
    depth = abs(ds - do)
    if bs < bo - geometry.TOL:
        out.append(p.rel("seenleft", p.cdist))
    elif bs > bo + geometry.TOL:
        out.append(p.rel("seenright", p.cdist))
    if abs(bs - bo) <= p.settings.max_angle + geometry.TOL:
        if ds < do - geometry.TOL:
            out.append(p.rel("infront", depth))
        elif ds > do + geometry.TOL:
            out.append(p.rel("atrear", depth))
    return out


def _fits_sorted(s: SpatialObject, o: SpatialObject) -> bool:
    return all(
        a <= b + geometry.TOL
        for a, b in zip(sorted((s.w, s.h, s.d)), sorted((o.w, o.h, o.d)))
    )


def _comparability(p: _Pair) -> List[SpatialRelation]:
    s, o = p.s, p.o
    out = []
    if s.length < o.length - geometry.TOL:
        out.append(p.rel("shorter", o.length - s.length))
    elif s.length > o.length + geometry.TOL:
        out.append(p.rel("longer", s.length - o.length))
    if s.h > o.h + geometry.TOL:
        out.append(p.rel("taller", s.h - o.h))
    if s.footprint < o.footprint - geometry.TOL:
        out.append(p.rel("thinner", o.footprint - s.footprint))
    elif s.footprint > o.footprint + geometry.TOL:
        out.append(p.rel("wider", s.footprint - o.footprint))
    if s.volume < o.volume - geometry.TOL:
        out.append(p.rel("smaller", o.volume - s.volume))
    elif s.volume > o.volume + geometry.TOL:
        out.append(p.rel("bigger", s.volume - o.volume))
    if _fits_sorted(s, o):
        out.append(p.rel("fitting", o.volume - s.volume))
    else:
        out.append(p.rel("exceeding", s.volume - o.volume))
    return out


def _similarity(p: _Pair) -> List[SpatialRelation]:
    s, o, gap = p.s, p.o, p.gap + geometry.TOL
    out = []
    linear = (
        ("sameheight", abs(s.h - o.h)),
        ("samewidth", abs(s.w - o.w)),
        ("samedepth", abs(s.d - o.d)),
        ("samelength", abs(s.length - o.length)),
    )
    for name, diff in linear:
        if diff <= gap:
            out.append(p.rel(name, diff))
    if abs(s.perimeter - o.perimeter) <= 4.0 * p.gap + geometry.TOL:
        out.append(p.rel("sameperimeter", abs(s.perimeter - o.perimeter)))
    gap2 = p.gap * p.gap + geometry.TOL
    areas = (
        ("samefront", abs(s.front_area - o.front_area), gap2),
        ("sameside", abs(s.side_area - o.side_area), gap2),
        ("samefootprint", abs(s.footprint - o.footprint), gap2),
        ("samesurface", abs(s.surface - o.surface), 3.0 * p.gap * p.gap + geometry.TOL),
    )
    for name, diff, limit in areas:
        if diff <= limit:
            out.append(p.rel(name, diff))
    if abs(s.volume - o.volume) <= p.gap ** 3 + geometry.TOL:
        out.append(p.rel("samevolume", abs(s.volume - o.volume)))
    dims = max(abs(s.w - o.w), abs(s.h - o.h), abs(s.d - o.d))
    if dims <= gap:
        out.append(p.rel("samecuboid", dims))
        if abs(p.yaw_diff) <= p.settings.max_angle + geometry.TOL:
            out.append(p.rel("congruent", dims))
    pos = math.dist(s.position, o.position)
    if pos <= gap:
        out.append(p.rel("sameposition", pos))
    cen = math.dist(s.center, o.center)
    if cen <= gap:
        out.append(p.rel("samecenter", cen))
    if s.shape and s.shape == o.shape:
        out.append(p.rel("sameshape", 0.0))
    return out


def _geography(p: _Pair) -> List[SpatialRelation]:
    nx, nz = p.settings.north_direction
    ex, ez = -nz, nx  # east: north turned clockwise seen from above
    dx = p.s.center[0] - p.o.center[0]
    dz = p.s.center[2] - p.o.center[2]
    n = dx * nx + dz * nz
    e = dx * ex + dz * ez
    gap = p.gap
    ns = "north" if n > gap else "south" if n < -gap else ""
    ew = "east" if e > gap else "west" if e < -gap else ""
    if not ns and not ew:
        return []
    return [p.rel(ns + ew, math.hypot(n, e))]


_EVALUATORS = {
    "proximity": _proximity,
    "directionality": _directionality,
    "adjacency": _adjacency,
    "orientation": _orientation,
    "connectivity": _connectivity,
    "sectoriality": _sectoriality,
    "assembly": _assembly,
    "comparability": _comparability,
    "similarity": _similarity,
    "geography": _geography,
}


def relations_between(
    s: SpatialObject,
    o: SpatialObject,
    category: str,
    settings: AdjustmentSettings,
    observer: Optional[SpatialObject] = None,
) -> List[SpatialRelation]:
    """Relations of one category for the ordered pair (before closure)."""
    if s.id == o.id:
        return []
    pair = _Pair(s, o, settings)
    if category == "visibility":
        if observer is None:
            raise ValueError("visibility deduction needs an observer")
        return _visibility(pair, observer)
    try:
        evaluator = _EVALUATORS[category]
    except KeyError:
        raise ValueError("unknown relation category %r" % (category,)) from None
    return evaluator(pair)


def deduce(
    fb: FactBase,
    categories: Iterable[str],
    settings: AdjustmentSettings,
    observer_id: Optional[str] = None,
) -> FactBase:
    """Deduce the named categories over all ordered pairs, idempotently.

    Each requested category is recomputed from scratch and the result is
    closed under the inverse laws; merge order is fixed (subject, object,
    predicate), so repeated runs yield identical relation sets.
    """
    cats = expand_categories(categories)
    observer = None
    if "visibility" in cats:
        observer = resolve_observer(fb, observer_id)
    objs = fb.object_list()
    for cat in cats:
        fb.drop_predicates(CATEGORIES[cat])
        batch: Dict[Tuple[str, str, str], SpatialRelation] = {}
        for s in objs:
            for o in objs:
                if s.id == o.id:
                    continue
                for rel in relations_between(s, o, cat, settings, observer):
                    batch[rel.key] = rel
        for rel in list(batch.values()):
            inverse = INVERSES.get(rel.predicate)
            if inverse is None:
                continue
            key = (rel.object, inverse, rel.subject)
            if key not in batch:
                batch[key] = SpatialRelation(
                    rel.object, inverse, rel.subject,
                    rel.delta, geometry.normalize_angle(-rel.angle),
                )
        for key in sorted(batch, key=lambda k: (k[0], k[2], k[1])):
            fb.add_relation(batch[key])
        fb.deduced_categories.add(cat)
    return fb


def ensure_categories(
    fb: FactBase,
    categories: Iterable[str],
    settings: AdjustmentSettings,
    observer_id: Optional[str] = None,
) -> None:
    """Deduce any of the given categories that are not marked current."""
    missing = [c for c in expand_categories(categories) if c not in fb.deduced_categories]
    if missing:
        deduce(fb, missing, settings, observer_id)


def categories_for_predicates(predicates: Iterable[str]) -> List[str]:
    cats: List[str] = []
    for name in predicates:
        cat = predicate_category(name)
        if cat is None:
            raise ValueError("unknown predicate %r" % (name,))
        if cat not in cats:
            cats.append(cat)
    return cats
