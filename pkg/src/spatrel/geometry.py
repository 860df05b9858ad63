"""Geometry kernel for yaw-oriented boxes.

A box is a rectangle (w, d) extruded upward by h, positioned by its base
center and rotated about +Y by ``angle``.  Because rotation never leaves
the horizontal plane, every query decomposes into a 2D footprint problem
in the XZ plane plus a 1D interval problem on Y.

Marginal cases within TOL of a threshold resolve toward the "related"
outcome: surface contact counts as containment/within, exact reach counts
as in-sector.
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple

from .model import AdjustmentSettings, LIMIT_DIMENSION_FACTOR, SpatialObject

TOL = 1e-9

Vec2 = Tuple[float, float]
Vec3 = Tuple[float, float, float]

# Sector letters per local axis, in canonical code order: ahead/behind,
# then left/right, then over/under.  `i` marks the box interior.
SECTOR_LETTERS = (("b", "a"), ("l", "r"), ("u", "o"))


def normalize_angle(a: float) -> float:
    """Wrap into (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


# ---------------------------------------------------------------------------
# frames

def local_from_world(ref: SpatialObject, p: Vec3) -> Vec3:
    """World point -> ref's local frame (origin at base center, yaw removed)."""
    dx, dy, dz = p[0] - ref.x, p[1] - ref.y, p[2] - ref.z
    c, s = math.cos(ref.angle), math.sin(ref.angle)
    return (dx * c - dz * s, dy, dx * s + dz * c)


def world_from_local(ref: SpatialObject, p: Vec3) -> Vec3:
    lx, ly, lz = p
    c, s = math.cos(ref.angle), math.sin(ref.angle)
    return (lx * c + lz * s + ref.x, ly + ref.y, -lx * s + lz * c + ref.z)


def footprint_corners(obj: SpatialObject) -> List[Vec2]:
    """Base rectangle corners in the world XZ plane, counterclockwise."""
    hw, hd = obj.w / 2.0, obj.d / 2.0
    c, s = math.cos(obj.angle), math.sin(obj.angle)
    out = []
    for lx, lz in ((-hw, -hd), (hw, -hd), (hw, hd), (-hw, hd)):
        out.append((lx * c + lz * s + obj.x, -lx * s + lz * c + obj.z))
    return out

def corners(obj: SpatialObject) -> List[Vec3]:
    """All 8 box corners: the footprint at base height and at the top."""
    base = footprint_corners(obj)
    return [(x, obj.y, z) for x, z in base] + [(x, obj.top, z) for x, z in base]


def point_in_box(obj: SpatialObject, p: Vec3, tol: float = TOL) -> bool:
    lx, ly, lz = local_from_world(obj, p)
    return (
        abs(lx) <= obj.w / 2.0 + tol
        and -tol <= ly <= obj.h + tol
        and abs(lz) <= obj.d / 2.0 + tol
    )


# ---------------------------------------------------------------------------
# footprint (XZ) primitives

def _axes(obj: SpatialObject) -> List[Vec2]:
    c, s = math.cos(obj.angle), math.sin(obj.angle)
    return [(c, -s), (s, c)]  # world directions of local +X and +Z


def _project(points: Sequence[Vec2], axis: Vec2) -> Tuple[float, float]:
    dots = [p[0] * axis[0] + p[1] * axis[1] for p in points]
    return min(dots), max(dots)


def footprint_overlap_depth(a: SpatialObject, b: SpatialObject) -> float:
    """Smallest projected overlap across the four separating axes.

    Positive means the footprints overlap with area, zero means boundary
    contact, negative is an upper bound of -separation along some axis.
    """
    ca, cb = footprint_corners(a), footprint_corners(b)
    depth = math.inf
    for axis in _axes(a) + _axes(b):
        lo_a, hi_a = _project(ca, axis)
        lo_b, hi_b = _project(cb, axis)
        depth = min(depth, min(hi_a, hi_b) - max(lo_a, lo_b))
    return depth


def vertical_overlap(a: SpatialObject, b: SpatialObject) -> float:
    """Signed overlap of the two vertical spans (negative = gap)."""
    return min(a.top, b.top) - max(a.y, b.y)


def overlap_depth(a: SpatialObject, b: SpatialObject) -> float:
    """min(footprint depth, vertical overlap); > 0 iff the boxes intersect."""
    return min(footprint_overlap_depth(a, b), vertical_overlap(a, b))


def intersects(a: SpatialObject, b: SpatialObject) -> bool:
    """True iff the boxes share positive volume (touching does not count)."""
    if vertical_overlap(a, b) <= TOL:
        return False
    return footprint_overlap_depth(a, b) > TOL


def contains(a: SpatialObject, b: SpatialObject, tol: float = TOL) -> bool:
    """True iff every corner of b lies inside a (surface inclusive)."""
    return all(point_in_box(a, p, tol) for p in corners(b))


def _seg_point_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    ax, az = b[0] - a[0], b[1] - a[1]
    px, pz = p[0] - a[0], p[1] - a[1]
    denom = ax * ax + az * az
    t = 0.0 if denom <= TOL * TOL else max(0.0, min(1.0, (px * ax + pz * az) / denom))
    dx, dz = px - t * ax, pz - t * az
    return math.hypot(dx, dz)


def _closest_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2:
    ax, az = b[0] - a[0], b[1] - a[1]
    denom = ax * ax + az * az
    if denom <= TOL * TOL:
        return a
    t = max(0.0, min(1.0, ((p[0] - a[0]) * ax + (p[1] - a[1]) * az) / denom))
    return (a[0] + t * ax, a[1] + t * az)


def _segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool:
    def orient(o: Vec2, a: Vec2, b: Vec2) -> float:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def on_span(a: Vec2, b: Vec2, p: Vec2) -> bool:
        return (
            min(a[0], b[0]) - TOL <= p[0] <= max(a[0], b[0]) + TOL
            and min(a[1], b[1]) - TOL <= p[1] <= max(a[1], b[1]) + TOL
        )

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if abs(d1) <= TOL and on_span(q1, q2, p1):
        return True
    if abs(d2) <= TOL and on_span(q1, q2, p2):
        return True
    if abs(d3) <= TOL and on_span(p1, p2, q1):
        return True
    return abs(d4) <= TOL and on_span(p1, p2, q2)


def _segment_pair_distance(
    p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2
) -> Tuple[float, Vec2, Vec2]:
    """Distance between two 2D segments with one closest point per segment."""
    if _segments_intersect(p1, p2, q1, q2):
        # approximate crossing point is fine: distance is zero
        return 0.0, p1, p1
    best = (math.inf, p1, q1)
    for p in (p1, p2):
        q = _closest_on_segment(p, q1, q2)
        dist = math.hypot(p[0] - q[0], p[1] - q[1])
        if dist < best[0]:
            best = (dist, p, q)
    for q in (q1, q2):
        p = _closest_on_segment(q, p1, p2)
        dist = math.hypot(p[0] - q[0], p[1] - q[1])
        if dist < best[0]:
            best = (dist, p, q)
    return best


def _edges(poly: Sequence[Vec2]) -> List[Tuple[Vec2, Vec2]]:
    return [(poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly))]


def footprint_distance(a: SpatialObject, b: SpatialObject) -> float:
    """Distance between the two base rectangles in the XZ plane."""
    if footprint_overlap_depth(a, b) >= -TOL:
        return 0.0
    ca, cb = footprint_corners(a), footprint_corners(b)
    return min(
        _segment_pair_distance(p1, p2, q1, q2)[0]
        for p1, p2 in _edges(ca)
        for q1, q2 in _edges(cb)
    )


def vertical_gap(a: SpatialObject, b: SpatialObject) -> float:
    return max(0.0, -vertical_overlap(a, b))


def min_distance(a: SpatialObject, b: SpatialObject) -> float:
    """Smallest distance between the two boxes (0 when they intersect).

    Footprint and height are independent coordinates of these upright
    prisms, so the horizontal and vertical gaps minimize separately.
    """
    dxz = footprint_distance(a, b)
    dy = vertical_gap(a, b)
    return math.hypot(dxz, dy)


def center_distance(a: SpatialObject, b: SpatialObject) -> float:
    (ax, ay, az), (bx, by, bz) = a.center, b.center
    return math.sqrt((ax - bx) ** 2 + (ay - by) ** 2 + (az - bz) ** 2)


# ---------------------------------------------------------------------------
# nearby radius

def nearby_reach(ref: SpatialObject, settings: AdjustmentSettings) -> float:
    """Nearby radius of a single reference (the partner radius taken as 0)."""
    if settings.nearby_schema == "fixed":
        return settings.nearby_factor
    if settings.nearby_schema == "dimension":
        return settings.nearby_factor * ref.radius
    return min(LIMIT_DIMENSION_FACTOR * ref.radius, settings.nearby_factor)


def nearby_radius(a: SpatialObject, b: SpatialObject, settings: AdjustmentSettings) -> float:
    """Center distance inside which the pair counts as near."""
    if settings.nearby_schema == "fixed":
        return settings.nearby_factor
    proportional = a.radius + b.radius
    if settings.nearby_schema == "dimension":
        return settings.nearby_factor * proportional
    return min(LIMIT_DIMENSION_FACTOR * proportional, settings.nearby_factor)


# ---------------------------------------------------------------------------
# sectors

def _sector_reaches(ref: SpatialObject, settings: AdjustmentSettings) -> Vec3:
    if settings.sector_schema == "fixed":
        f = settings.sector_factor
        return (f, f, f)
    if settings.sector_schema == "dimension":
        f = settings.sector_factor
        return (f * ref.w, f * ref.h, f * ref.d)
    r = nearby_reach(ref, settings)
    return (r, r, r)


def classify_sector(
    ref: SpatialObject, p: Vec3, settings: AdjustmentSettings
) -> Optional[str]:
    """Sector code of a world point around ref, or None when out of reach.

    The 3x3x3 partition has 27 cells: the box interior `i` and 26 codes
    naming the off-axis directions, letters ordered ahead/behind before
    left/right before over/under (`a`, `ar`, `bru`, ...).
    """
    lx, ly, lz = local_from_world(ref, p)
    rx, ry, rz = _sector_reaches(ref, settings)
    spans = (
        (lz, -ref.d / 2.0, ref.d / 2.0, rz),  # ahead/behind
        (lx, -ref.w / 2.0, ref.w / 2.0, rx),  # left/right
        (ly, 0.0, ref.h, ry),  # over/under
    )
    code = ""
    for (value, lo, hi, reach), (neg, pos) in zip(spans, SECTOR_LETTERS):
        if value < lo - TOL:
            if value < lo - reach - TOL:
                return None
            code += neg
        elif value > hi + TOL:
            if value > hi + reach + TOL:
                return None
            code += pos
    return code or "i"


def sector_region(
    ref: SpatialObject, code: str, settings: AdjustmentSettings
) -> Tuple[float, float, float, float, float, float, float]:
    """Box (x, y, z, w, h, d, angle) covering the named sector around ref."""
    rx, ry, rz = _sector_reaches(ref, settings)
    bounds = {
        "z": [-ref.d / 2.0, ref.d / 2.0],
        "x": [-ref.w / 2.0, ref.w / 2.0],
        "y": [0.0, ref.h],
    }
    for letter in code:
        if letter == "a":
            bounds["z"] = [ref.d / 2.0, ref.d / 2.0 + rz]
        elif letter == "b":
            bounds["z"] = [-ref.d / 2.0 - rz, -ref.d / 2.0]
        elif letter == "r":
            bounds["x"] = [ref.w / 2.0, ref.w / 2.0 + rx]
        elif letter == "l":
            bounds["x"] = [-ref.w / 2.0 - rx, -ref.w / 2.0]
        elif letter == "o":
            bounds["y"] = [ref.h, ref.h + ry]
        elif letter == "u":
            bounds["y"] = [-ry, 0.0]
        elif letter != "i":
            raise ValueError("unknown sector code %r" % (code,))
    (x0, x1), (y0, y1), (z0, z1) = bounds["x"], bounds["y"], bounds["z"]
    base_local = ((x0 + x1) / 2.0, y0, (z0 + z1) / 2.0)
    wx, wy, wz = world_from_local(ref, base_local)
    return (wx, wy, wz, x1 - x0, y1 - y0, z1 - z0, ref.angle)


# ---------------------------------------------------------------------------
# aggregate shapes

def enclosing_box(
    objects: Sequence[SpatialObject],
) -> Tuple[float, float, float, float, float, float]:
    """World-aligned box (x, y, z, w, h, d) around all corners, yaw 0."""
    if not objects:
        raise ValueError("enclosing_box needs at least one object")
    pts = [p for obj in objects for p in corners(obj)]
    xs, ys, zs = zip(*pts)
    return (
        (min(xs) + max(xs)) / 2.0,
        min(ys),
        (min(zs) + max(zs)) / 2.0,
        max(xs) - min(xs),
        max(ys) - min(ys),
        max(zs) - min(zs),
    )


def _clip_convex(subject: List[Vec2], clip: Sequence[Vec2]) -> List[Vec2]:
    """Sutherland-Hodgman clip of one convex polygon by another (CCW)."""
    out = list(subject)
    for i in range(len(clip)):
        if not out:
            break
        a, b = clip[i], clip[(i + 1) % len(clip)]
        ex, ez = b[0] - a[0], b[1] - a[1]
        # interior lies left of each directed edge of the CCW clip ring
        inside = lambda p: ex * (p[1] - a[1]) - ez * (p[0] - a[0]) >= -TOL
        prev, result = out[-1], []
        for cur in out:
            if inside(cur):
                if not inside(prev):
                    result.append(_line_hit(prev, cur, a, b))
                result.append(cur)
            elif inside(prev):
                result.append(_line_hit(prev, cur, a, b))
            prev = cur
        out = result
    return out


def _line_hit(p: Vec2, q: Vec2, a: Vec2, b: Vec2) -> Vec2:
    ex, ez = b[0] - a[0], b[1] - a[1]
    dx, dz = q[0] - p[0], q[1] - p[1]
    denom = ex * dz - ez * dx
    if abs(denom) < TOL:
        return q
    t = (ex * (a[1] - p[1]) - ez * (a[0] - p[0])) / denom
    return (p[0] + t * dx, p[1] + t * dz)


def polygon_area_centroid(poly: Sequence[Vec2]) -> Tuple[float, Vec2]:
    """Signed shoelace area and centroid (centroid falls back to the mean)."""
    if len(poly) < 3:
        if not poly:
            return 0.0, (0.0, 0.0)
        mx = sum(p[0] for p in poly) / len(poly)
        mz = sum(p[1] for p in poly) / len(poly)
        return 0.0, (mx, mz)
    area2 = cx = cz = 0.0
    for i in range(len(poly)):
        (x0, z0), (x1, z1) = poly[i], poly[(i + 1) % len(poly)]
        cross = x0 * z1 - x1 * z0
        area2 += cross
        cx += (x0 + x1) * cross
        cz += (z0 + z1) * cross
    if abs(area2) < TOL:
        mx = sum(p[0] for p in poly) / len(poly)
        mz = sum(p[1] for p in poly) / len(poly)
        return 0.0, (mx, mz)
    return area2 / 2.0, (cx / (3.0 * area2), cz / (3.0 * area2))


def footprint_intersection(a: SpatialObject, b: SpatialObject) -> List[Vec2]:
    clipped = _clip_convex(footprint_corners(a), footprint_corners(b))
    return clipped


# ---------------------------------------------------------------------------
# contact analysis

def _closest_footprint_features(
    a: SpatialObject, b: SpatialObject, max_angle: float
) -> Tuple[float, Vec2, Vec2, Optional[Tuple[Vec2, float]]]:
    """Closest approach of the two footprints.

    Returns (distance, point on a, point on b, parallel) where parallel,
    when present, is the midpoint and length of the overlapping stretch of
    a near-parallel edge pair realizing the minimum: the signature of face
    (rather than corner) contact.
    """
    ca, cb = footprint_corners(a), footprint_corners(b)
    best = (math.inf, ca[0], cb[0])
    for p1, p2 in _edges(ca):
        for q1, q2 in _edges(cb):
            dist, pa, pb = _segment_pair_distance(p1, p2, q1, q2)
            if dist < best[0]:
                best = (dist, pa, pb)
    parallel: Optional[Tuple[Vec2, float]] = None
    for p1, p2 in _edges(ca):
        ux, uz = p2[0] - p1[0], p2[1] - p1[1]
        ulen = math.hypot(ux, uz)
        if ulen < TOL:
            continue
        for q1, q2 in _edges(cb):
            vx, vz = q2[0] - q1[0], q2[1] - q1[1]
            vlen = math.hypot(vx, vz)
            if vlen < TOL:
                continue
            cross = abs(ux * vz - uz * vx) / (ulen * vlen)
            if math.asin(min(1.0, cross)) > max_angle:
                continue
            dist, _, _ = _segment_pair_distance(p1, p2, q1, q2)
            if dist > best[0] + TOL:
                continue
            # overlap of q's projection onto p's direction
            t1 = ((q1[0] - p1[0]) * ux + (q1[1] - p1[1]) * uz) / ulen
            t2 = ((q2[0] - p1[0]) * ux + (q2[1] - p1[1]) * uz) / ulen
            lo, hi = max(0.0, min(t1, t2)), min(ulen, max(t1, t2))
            if hi - lo <= TOL:
                continue
            mid_t = (lo + hi) / 2.0
            mid_a = (p1[0] + ux / ulen * mid_t, p1[1] + uz / ulen * mid_t)
            mid_b = _closest_on_segment(mid_a, q1, q2)
            mid = ((mid_a[0] + mid_b[0]) / 2.0, (mid_a[1] + mid_b[1]) / 2.0)
            if parallel is None or hi - lo > parallel[1]:
                parallel = (mid, hi - lo)
    return best[0], best[1], best[2], parallel


def meeting_faces(a: SpatialObject, b: SpatialObject, settings: AdjustmentSettings) -> bool:
    """True when the closest features are parallel faces, not mere corners.

    Stacked contact means overlapping footprints with only a height gap;
    side contact means a near-parallel edge pair with overlapping extent.
    """
    if intersects(a, b) or min_distance(a, b) > settings.max_gap + TOL:
        return False
    if footprint_overlap_depth(a, b) > TOL:
        area, _ = polygon_area_centroid(footprint_intersection(a, b))
        if abs(area) > TOL:
            return True
    if vertical_overlap(a, b) > TOL:
        _, _, _, parallel = _closest_footprint_features(a, b, settings.max_angle)
        return parallel is not None
    return False


def contact_region(
    a: SpatialObject, b: SpatialObject, settings: AdjustmentSettings
) -> Optional[Tuple[float, float, float, float, float, float]]:
    """Placement (x, y, z, w, h, d) marking where the two boxes touch.

    None when they are farther apart than max_gap.  Stacked contact sits
    at the centroid of the footprint overlap at the contact height; side
    and corner contact sits at the closest approach, dropped to the lower
    base (a wall corner marker belongs on the floor).  Extents default to
    2 x max_gap each way.
    """
    if min_distance(a, b) > settings.max_gap + TOL:
        return None
    size = 2.0 * settings.max_gap
    fp_depth = footprint_overlap_depth(a, b)
    v_overlap = vertical_overlap(a, b)
    if fp_depth > TOL and v_overlap <= settings.max_gap + TOL:
        area, (cx, cz) = polygon_area_centroid(footprint_intersection(a, b))
        if abs(area) > TOL:
            lower, upper = (a, b) if a.y <= b.y else (b, a)
            plane = (lower.top + upper.y) / 2.0 if v_overlap <= 0 else lower.top
            return (cx, plane - size / 2.0, cz, size, size, size)
    dist, pa, pb, parallel = _closest_footprint_features(a, b, settings.max_angle)
    if parallel is not None:
        (cx, cz) = parallel[0]
    else:
        cx, cz = (pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0
    return (cx, min(a.y, b.y), cz, size, size, size)


def crossing_axes(s: SpatialObject, o: SpatialObject) -> bool:
    """True iff s pokes out beyond both opposite faces of o on some axis."""
    lxs, lys, lzs = zip(*(local_from_world(o, p) for p in corners(s)))
    if min(lxs) < -o.w / 2.0 - TOL and max(lxs) > o.w / 2.0 + TOL:
        return True
    if min(lzs) < -o.d / 2.0 - TOL and max(lzs) > o.d / 2.0 + TOL:
        return True
    return min(lys) < -TOL and max(lys) > o.h + TOL
