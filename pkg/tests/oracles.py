"""Independent slow reimplementations used to cross-check the package.

Everything here is written from the documented definitions using numpy,
shapely, and scipy rather than the package's own geometry, so agreement
is meaningful.  Decisions near a threshold raise :class:`Ambiguous`;
scene generators resample until every decision in a scene is stable, so
oracle quantization (Monte-Carlo membership, boundary sampling) cannot
flip a verdict.
"""

from __future__ import annotations

import math
import random
from typing import List, Optional, Set, Tuple

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import LineString, Polygon

from spatrel.model import AdjustmentSettings, SpatialObject

TOL = 1e-9
DIST_MARGIN = 2.5e-3     # stay this far from every length threshold
ANGLE_MARGIN = 0.01      # radians around angular thresholds
AREA_MARGIN = 1e-3       # m^2 of contact area below which a verdict is shaky
VOLUME_FRACTION = 5e-4   # overlap volume must be this share of both boxes
MC_SAMPLES = 100_000
SAMPLE_SPACING = 1e-3    # boundary sampling step for min distance


class Ambiguous(Exception):
    """The scene sits within a margin of a decision threshold."""


# ---------------------------------------------------------------------------
# coordinate transforms (independent of spatrel.geometry)

def to_local(obj: SpatialObject, pts: np.ndarray) -> np.ndarray:
    """World points (N, 3) into the box frame (origin at base center)."""
    c, s = math.cos(obj.angle), math.sin(obj.angle)
    dx = pts[:, 0] - obj.x
    dy = pts[:, 1] - obj.y
    dz = pts[:, 2] - obj.z
    return np.stack([dx * c - dz * s, dy, dx * s + dz * c], axis=1)


def to_world(obj: SpatialObject, pts: np.ndarray) -> np.ndarray:
    c, s = math.cos(obj.angle), math.sin(obj.angle)
    lx, ly, lz = pts[:, 0], pts[:, 1], pts[:, 2]
    return np.stack(
        [lx * c + lz * s + obj.x, ly + obj.y, -lx * s + lz * c + obj.z],
        axis=1,
    )


def footprint_polygon(obj: SpatialObject) -> Polygon:
    hw, hd = obj.w / 2.0, obj.d / 2.0
    local = np.array(
        [[-hw, 0.0, -hd], [hw, 0.0, -hd], [hw, 0.0, hd], [-hw, 0.0, hd]]
    )
    world = to_world(obj, local)
    return Polygon([(x, z) for x, _, z in world])


def corner_points(obj: SpatialObject) -> np.ndarray:
    hw, hd = obj.w / 2.0, obj.d / 2.0
    local = np.array([
        [sx * hw, y, sz * hd]
        for y in (0.0, obj.h)
        for sx, sz in ((-1, -1), (1, -1), (1, 1), (-1, 1))
    ])
    return to_world(obj, local)


def volumetric_center(obj: SpatialObject) -> Tuple[float, float, float]:
    return (obj.x, obj.y + obj.h / 2.0, obj.z)


# ---------------------------------------------------------------------------
# exact primitives (shapely + analytic)

def vertical_overlap(a: SpatialObject, b: SpatialObject) -> float:
    return min(a.y + a.h, b.y + b.h) - max(a.y, b.y)


def overlap_volume(a: SpatialObject, b: SpatialObject) -> float:
    v = vertical_overlap(a, b)
    if v <= 0.0:
        return 0.0
    return footprint_polygon(a).intersection(footprint_polygon(b)).area * v


def min_distance_exact(a: SpatialObject, b: SpatialObject) -> float:
    """Footprint distance from shapely plus the analytic height gap."""
    dxz = footprint_polygon(a).distance(footprint_polygon(b))
    dy = max(0.0, -vertical_overlap(a, b))
    return math.hypot(dxz, dy)


def center_distance(a: SpatialObject, b: SpatialObject) -> float:
    return math.dist(volumetric_center(a), volumetric_center(b))


def point_slack(box: SpatialObject, point: Tuple[float, float, float]) -> float:
    """Signed distance of a point to the box boundary: positive inside."""
    lx, ly, lz = to_local(box, np.array([point]))[0]
    return min(
        box.w / 2.0 - abs(lx),
        box.d / 2.0 - abs(lz),
        ly,
        box.h - ly,
    )


def corner_slacks(inner: SpatialObject, outer: SpatialObject) -> np.ndarray:
    pts = to_local(outer, corner_points(inner))
    return np.min(
        np.stack([
            outer.w / 2.0 - np.abs(pts[:, 0]),
            outer.d / 2.0 - np.abs(pts[:, 2]),
            pts[:, 1],
            outer.h - pts[:, 1],
        ], axis=1),
        axis=1,
    )


# ---------------------------------------------------------------------------
# Monte-Carlo membership (the mandated overlap/containment oracle)

def mc_points(obj: SpatialObject, n: int, rng: np.random.Generator) -> np.ndarray:
    local = rng.random((n, 3))
    local[:, 0] = (local[:, 0] - 0.5) * obj.w
    local[:, 1] = local[:, 1] * obj.h
    local[:, 2] = (local[:, 2] - 0.5) * obj.d
    return to_world(obj, local)


def membership(box: SpatialObject, pts: np.ndarray) -> np.ndarray:
    local = to_local(box, pts)
    return (
        (np.abs(local[:, 0]) <= box.w / 2.0)
        & (np.abs(local[:, 2]) <= box.d / 2.0)
        & (local[:, 1] >= 0.0)
        & (local[:, 1] <= box.h)
    )


# ---------------------------------------------------------------------------
# sampled min distance (dense boundary sampling + KD-tree)

def boundary_samples(obj: SpatialObject, spacing: float) -> np.ndarray:
    """2D world points along the footprint boundary, at most spacing apart."""
    hw, hd = obj.w / 2.0, obj.d / 2.0
    ring = [(-hw, -hd), (hw, -hd), (hw, hd), (-hw, hd)]
    pts: List[Tuple[float, float, float]] = []
    for i in range(4):
        (x0, z0), (x1, z1) = ring[i], ring[(i + 1) % 4]
        steps = max(1, math.ceil(math.hypot(x1 - x0, z1 - z0) / spacing))
        for t in range(steps):
            f = t / steps
            pts.append((x0 + (x1 - x0) * f, 0.0, z0 + (z1 - z0) * f))
    world = to_world(obj, np.array(pts))
    return world[:, [0, 2]]


def min_distance_sampled(a: SpatialObject, b: SpatialObject,
                         spacing: float = SAMPLE_SPACING) -> float:
    """Min distance from boundary sampling; exact when footprints overlap."""
    if footprint_polygon(a).intersects(footprint_polygon(b)):
        dxz = 0.0
    else:
        tree = cKDTree(boundary_samples(b, spacing))
        dxz = float(tree.query(boundary_samples(a, spacing))[0].min())
    dy = max(0.0, -vertical_overlap(a, b))
    return math.hypot(dxz, dy)


# ---------------------------------------------------------------------------
# documented threshold formulas

def box_radius(obj: SpatialObject) -> float:
    return 0.5 * math.sqrt(obj.w ** 2 + obj.h ** 2 + obj.d ** 2)


def nearby_radius(a: SpatialObject, b: SpatialObject,
                  settings: AdjustmentSettings) -> float:
    if settings.nearby_schema == "fixed":
        return settings.nearby_factor
    combined = box_radius(a) + box_radius(b)
    if settings.nearby_schema == "dimension":
        return settings.nearby_factor * combined
    return min(2.0 * combined, settings.nearby_factor)


def sector_reaches(ref: SpatialObject,
                   settings: AdjustmentSettings) -> Tuple[float, float, float]:
    if settings.sector_schema == "fixed":
        r = settings.sector_factor
        return (r, r, r)
    if settings.sector_schema == "dimension":
        f = settings.sector_factor
        return (f * ref.w, f * ref.h, f * ref.d)
    # nearby schema: the reach is the reference's own nearby radius
    if settings.nearby_schema == "fixed":
        reach = settings.nearby_factor
    elif settings.nearby_schema == "dimension":
        reach = settings.nearby_factor * box_radius(ref)
    else:
        reach = min(2.0 * box_radius(ref), settings.nearby_factor)
    return (reach, reach, reach)


def classify_sector(ref: SpatialObject, point: Tuple[float, float, float],
                    settings: AdjustmentSettings,
                    margin: float = 0.0) -> Optional[str]:
    """Independent 27-sector classification with optional stability check."""
    lx, ly, lz = to_local(ref, np.array([point]))[0]
    rx, ry, rz = sector_reaches(ref, settings)
    axes = (
        (lz, -ref.d / 2.0, ref.d / 2.0, rz, "b", "a"),
        (lx, -ref.w / 2.0, ref.w / 2.0, rx, "l", "r"),
        (ly, 0.0, ref.h, ry, "u", "o"),
    )
    code = ""
    for value, lo, hi, reach, lo_letter, hi_letter in axes:
        planes = (lo - reach, lo, hi, hi + reach)
        if margin > 0.0 and min(abs(value - p) for p in planes) < margin:
            raise Ambiguous("sector boundary")
        if value < lo - reach or value > hi + reach:
            return None
        if value < lo:
            code += lo_letter
        elif value > hi:
            code += hi_letter
    return code or "i"


# ---------------------------------------------------------------------------
# face contact

def _edge_segments(
    obj: SpatialObject,
) -> List[Tuple[Tuple[float, float], Tuple[float, float]]]:
    ring = [tuple(p) for p in np.asarray(footprint_polygon(obj).exterior.coords)[:4]]
    return [(ring[i], ring[(i + 1) % 4]) for i in range(4)]


def _parallel_face_contact(a: SpatialObject, b: SpatialObject,
                           max_angle: float) -> bool:
    """Side contact: a near-parallel edge pair at min distance whose
    projected extents overlap.  The overlap is measured along a's edge,
    so the verdict is frame-dependent; callers compare both frames."""
    edges_a, edges_b = _edge_segments(a), _edge_segments(b)
    dists = {}
    best = math.inf
    for i, ea in enumerate(edges_a):
        for j, eb in enumerate(edges_b):
            d = LineString(ea).distance(LineString(eb))
            dists[i, j] = d
            best = min(best, d)
    found = False
    for (i, j), d in dists.items():
        (p1, p2), (q1, q2) = edges_a[i], edges_b[j]
        ux, uz = p2[0] - p1[0], p2[1] - p1[1]
        vx, vz = q2[0] - q1[0], q2[1] - q1[1]
        ulen, vlen = math.hypot(ux, uz), math.hypot(vx, vz)
        cross = abs(ux * vz - uz * vx) / (ulen * vlen)
        angle = math.asin(min(1.0, cross))
        if abs(angle - max_angle) < ANGLE_MARGIN:
            raise Ambiguous("edge pair at the parallelism threshold")
        if angle > max_angle:
            continue
        t1 = ((q1[0] - p1[0]) * ux + (q1[1] - p1[1]) * uz) / ulen
        t2 = ((q2[0] - p1[0]) * ux + (q2[1] - p1[1]) * uz) / ulen
        lo, hi = max(0.0, min(t1, t2)), min(ulen, max(t1, t2))
        overlap = hi - lo
        if d <= best + 1e-9:
            if abs(overlap) < DIST_MARGIN:
                raise Ambiguous("edge overlap near zero")
            if overlap > 0.0:
                found = True
        elif d < best + DIST_MARGIN and overlap > DIST_MARGIN:
            raise Ambiguous("parallel pair nearly ties the closest feature")
    return found


def _crossing(s: SpatialObject, o: SpatialObject) -> bool:
    """s pokes out beyond both opposite faces of o on some axis."""
    pts = to_local(o, corner_points(s))
    result = False
    for values, lo, hi in (
        (pts[:, 0], -o.w / 2.0, o.w / 2.0),
        (pts[:, 2], -o.d / 2.0, o.d / 2.0),
        (pts[:, 1], 0.0, o.h),
    ):
        below = lo - values.min()   # how far past the low face
        above = values.max() - hi   # how far past the high face
        if abs(below) < DIST_MARGIN or abs(above) < DIST_MARGIN:
            raise Ambiguous("protrusion at a face plane")
        if below > 0 and above > 0:
            result = True
    return result


# ---------------------------------------------------------------------------
# stable scene facts

class ScenePair:
    """All primitives for an unordered pair, raising Ambiguous near limits.

    Symmetric quantities are computed once; directional ones twice.  The
    Monte-Carlo membership decisions are asserted against the exact
    primitives they estimate, so a stable scene also certifies them.
    """

    def __init__(self, a: SpatialObject, b: SpatialObject,
                 settings: AdjustmentSettings, rng: np.random.Generator):
        self.a, self.b, self.settings = a, b, settings
        gap = settings.max_gap

        self.cdist = center_distance(a, b)
        self.radius = nearby_radius(a, b, settings)
        if abs(self.cdist - self.radius) < DIST_MARGIN:
            raise Ambiguous("center distance at the nearby radius")

        volume = overlap_volume(a, b)
        if 0.0 < volume < VOLUME_FRACTION * max(a.volume, b.volume):
            raise Ambiguous("sliver intersection")
        self.intersects = volume > 0.0
        if not self.intersects:
            fp = footprint_polygon(a).distance(footprint_polygon(b))
            if abs(vertical_overlap(a, b)) < DIST_MARGIN and fp < DIST_MARGIN:
                raise Ambiguous("grazing contact plane")

        self.v_overlap = vertical_overlap(a, b)
        if abs(self.v_overlap) < DIST_MARGIN:
            raise Ambiguous("vertical spans graze")

        for inner, outer in ((a, b), (b, a)):
            if abs(point_slack(outer, volumetric_center(inner))) < DIST_MARGIN:
                raise Ambiguous("center on a box boundary")
        self.near = (
            self.cdist <= self.radius
            and point_slack(b, volumetric_center(a)) < 0
            and point_slack(a, volumetric_center(b)) < 0
        )

        self.sector_ab = classify_sector(
            b, volumetric_center(a), settings, margin=DIST_MARGIN
        )
        self.sector_ba = classify_sector(
            a, volumetric_center(b), settings, margin=DIST_MARGIN
        )

        self.contained_ab = self._containment(a, b, volume)
        self.contained_ba = self._containment(b, a, volume)
        if self.intersects and not self.contained_ab and not self.contained_ba:
            self.crossing_ab = _crossing(a, b)
            self.crossing_ba = _crossing(b, a)
        else:
            self.crossing_ab = self.crossing_ba = False

        self.mdist = 0.0 if self.intersects else min_distance_sampled(a, b)
        if abs(self.mdist - gap) < DIST_MARGIN:
            raise Ambiguous("min distance at max gap")
        self.touching = not self.intersects and self.mdist <= gap

        self.meeting = self.touching and self._meeting()

        pts_a = mc_points(a, MC_SAMPLES, rng)
        pts_b = mc_points(b, MC_SAMPLES, rng)
        in_b, in_a = membership(b, pts_a), membership(a, pts_b)
        assert bool(in_b.any()) == self.intersects
        assert bool(in_a.any()) == self.intersects
        assert bool(in_b.all()) == self.contained_ab
        assert bool(in_a.all()) == self.contained_ba

    def _containment(self, inner: SpatialObject, outer: SpatialObject,
                     volume: float) -> bool:
        if corner_slacks(inner, outer).min() >= DIST_MARGIN:
            return True
        if inner.volume - volume >= VOLUME_FRACTION * inner.volume:
            return False
        raise Ambiguous("containment undecided")

    def _meeting(self) -> bool:
        a, b = self.a, self.b
        pa, pb = footprint_polygon(a), footprint_polygon(b)
        area = pa.intersection(pb).area
        if area > AREA_MARGIN:
            return True
        if area > 0.0 or pa.intersects(pb):
            raise Ambiguous("stacked contact area near zero")
        if self.v_overlap <= 0.0:
            return False
        forward = _parallel_face_contact(a, b, self.settings.max_angle)
        backward = _parallel_face_contact(b, a, self.settings.max_angle)
        if forward != backward:
            raise Ambiguous("face contact depends on the measuring frame")
        return forward

    def directed(self, forward: bool) -> "PairView":
        return PairView(self, forward)


class PairView:
    """The facts of one ordered direction of a ScenePair."""

    def __init__(self, pair: ScenePair, forward: bool):
        self.cdist = pair.cdist
        self.radius = pair.radius
        self.intersects = pair.intersects
        self.near = pair.near
        self.v_overlap = pair.v_overlap
        self.mdist = pair.mdist
        self.touching = pair.touching
        self.meeting = pair.meeting
        self.gap = pair.settings.max_gap
        if forward:
            self.sector = pair.sector_ab
            self.contained = pair.contained_ab
            self.contains_other = pair.contained_ba
            self.crossing = pair.crossing_ab
        else:
            self.sector = pair.sector_ba
            self.contained = pair.contained_ba
            self.contains_other = pair.contained_ab
            self.crossing = pair.crossing_ba
        self.beside = self.near and not self.intersects and self.v_overlap > 0


# ---------------------------------------------------------------------------
# the documented predicate table plus inverse closure

INVERSES = {
    "ontop": "beneath", "beneath": "ontop",
    "inside": "containing", "containing": "inside",
}

_SIDES = {"l": "leftside", "r": "rightside", "a": "frontside", "b": "backside"}


def _table(v: PairView) -> Set[str]:
    preds: Set[str] = set()

    if v.near:
        preds.add("near")
    elif v.cdist > v.radius:
        preds.add("far")

    if not v.intersects and v.near:
        if v.sector in _SIDES:
            preds.add(_SIDES[v.sector])
        if v.sector == "o":
            preds.add("upperside")
            if v.mdist <= v.gap:
                preds.add("ontop")
        if v.sector == "u":
            preds.add("lowerside")
            if v.mdist <= v.gap:
                preds.add("beneath")
        if v.beside:
            preds.add("beside")

    if not v.intersects:
        preds.add("disjoint")
        if v.touching:
            preds.add("touching")
            preds.add("by")
            if v.meeting:
                preds.add("meeting")
        if v.near and v.sector == "o" and v.mdist <= v.gap:
            preds.add("on")
        if v.beside and v.meeting:
            preds.add("at")
    else:
        if v.contained:
            preds.add("inside")
        if v.contains_other:
            preds.add("containing")
        if not v.contained and not v.contains_other:
            preds.add("crossing" if v.crossing else "overlapping")
    if v.contained:
        preds.add("in")
    return preds


def oracle_predicates(pair: ScenePair) -> Tuple[Set[str], Set[str]]:
    """Predicate sets for (a, b) and (b, a), closed under inverses."""
    fwd = _table(pair.directed(True))
    bwd = _table(pair.directed(False))
    closed_fwd = fwd | {INVERSES[p] for p in bwd if p in INVERSES}
    closed_bwd = bwd | {INVERSES[p] for p in fwd if p in INVERSES}
    return closed_fwd, closed_bwd


# ---------------------------------------------------------------------------
# scene generation

def random_object(rng: random.Random, ident: str,
                  position_scale: float = 2.0) -> SpatialObject:
    return SpatialObject(
        id=ident,
        x=rng.uniform(-position_scale, position_scale),
        y=rng.uniform(-1.0, 1.0),
        z=rng.uniform(-position_scale, position_scale),
        w=rng.uniform(0.1, 3.0),
        h=rng.uniform(0.1, 3.0),
        d=rng.uniform(0.1, 3.0),
        angle=rng.uniform(-math.pi, math.pi),
    )


def random_pair(rng: random.Random, index: int) -> Tuple[SpatialObject, SpatialObject]:
    """Mix placement regimes so every predicate family gets exercised."""
    a = random_object(rng, "a")
    regime = index % 4
    if regime == 0:      # wide scatter: far pairs
        b = random_object(rng, "b", position_scale=6.0)
    elif regime == 1:    # tight scatter: overlap-prone
        b = random_object(rng, "b", position_scale=1.0)
        b = b.evolve(y=a.y + rng.uniform(-0.5, 0.5))
    elif regime == 2:    # stacked-ish: b floated near a's top plane
        b = random_object(rng, "b", position_scale=1.0)
        b = b.evolve(
            x=a.x + rng.uniform(-1.0, 1.0),
            z=a.z + rng.uniform(-1.0, 1.0),
            y=a.y + a.h + rng.choice([0.0, 0.005, 0.05, rng.uniform(0, 0.4)]),
        )
    else:                # side contact: b pushed out along a bearing
        b = random_object(rng, "b", position_scale=1.0)
        bearing = rng.uniform(-math.pi, math.pi)
        span = (a.w + b.w + a.d + b.d) / 4.0
        offset = span + rng.choice([0.0, 0.005, 0.05, rng.uniform(0, 1.0)])
        b = b.evolve(
            x=a.x + offset * math.cos(bearing),
            z=a.z + offset * math.sin(bearing),
            y=a.y + rng.uniform(-0.3, 0.3),
            angle=rng.choice([a.angle, a.angle + math.pi / 2.0,
                              rng.uniform(-math.pi, math.pi)]),
        )
    return a, b


def stable_scenes(
    count: int, settings: AdjustmentSettings, seed: int = 20240817,
) -> List[Tuple[SpatialObject, SpatialObject, ScenePair]]:
    """Two-object scenes whose oracle decisions are all margin-stable."""
    rng = random.Random(seed)
    mc_rng = np.random.default_rng(seed)
    scenes = []
    attempts = 0
    while len(scenes) < count:
        a, b = random_pair(rng, attempts)
        attempts += 1
        try:
            pair = ScenePair(a, b, settings, mc_rng)
        except Ambiguous:
            continue
        scenes.append((a, b, pair))
    return scenes
