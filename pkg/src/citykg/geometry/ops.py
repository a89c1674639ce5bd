"""Metric and set operations on geometries.

Polygon booleans run on the Greiner-Hormann kernel; degenerate inputs
(shared edges, coincident vertices) are retried with a deterministic
micro-perturbation of one operand, which bounds the area error by roughly
perturbation x perimeter.  Exactly identical rings and containment without
boundary crossings short-circuit before clipping, so the common exact cases
stay exact.
"""

from __future__ import annotations

import math
from array import array

from citykg.geometry import _kernels
from citykg.geometry._kernels import DegenerateGeometry
from citykg.geometry.errors import CrsError, GeometryError
from citykg.geometry.types import (
    COORD_TOL,
    Geometry,
    LineString,
    MultiPolygon,
    Point,
    Polygon,
    PolyhedralSurface,
    Ring,
    drop_z,
)

KERNEL_BACKEND = "compiled" if _kernels.COMPILED else "python"

_MAX_PERTURB_RETRIES = 5
_PERTURB_BASE = 1e-9
# irrational angle step so retry directions never repeat an axis
_PERTURB_ANGLE = 2.399963229728653


def _require_projected(*geoms: Geometry) -> None:
    for g in geoms:
        if not g.crs.is_projected:
            raise CrsError(f"operation requires a projected CRS, got {g.crs}")


def _require_same_crs(a: Geometry, b: Geometry) -> None:
    if a.crs != b.crs:
        raise CrsError(f"CRS mismatch: {a.crs} vs {b.crs}")


def _as_parts(g: Geometry) -> tuple[Polygon, ...]:
    if isinstance(g, Polygon):
        return (g,)
    if isinstance(g, MultiPolygon):
        return g.parts
    raise GeometryError(f"expected polygonal geometry, got {type(g).__name__}")


def polygon_area(g: Polygon | MultiPolygon) -> float:
    """Area in CRS units squared; holes subtracted (shoelace per ring)."""
    _require_projected(g)
    total = 0.0
    for part in _as_parts(g):
        total += abs(_kernels.ring_area_signed(part.exterior.as_array_2d()))
        for hole in part.holes:
            total -= abs(_kernels.ring_area_signed(hole.as_array_2d()))
    return total


def _bbox_of_ring(ring: array) -> tuple[float, float, float, float]:
    return _kernels.ring_bbox(ring)


def _bboxes_disjoint(a, b) -> bool:
    return a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1]


def _rings_identical(a: array, b: array) -> bool:
    if len(a) != len(b):
        return False
    n = (len(a) - 2) // 2  # distinct vertices
    b_pts = [(b[2 * i], b[2 * i + 1]) for i in range(n)]
    first = (a[0], a[1])
    for off, pt in enumerate(b_pts):
        if pt == first:
            if all((a[2 * i], a[2 * i + 1]) == b_pts[(off + i) % n] for i in range(n)):
                return True
            if all((a[2 * i], a[2 * i + 1]) == b_pts[(off - i) % n] for i in range(n)):
                return True
    return False


def _translated(ring: array, dx: float, dy: float) -> array:
    out = array("d", ring)
    for i in range(0, len(out), 2):
        out[i] += dx
        out[i + 1] += dy
    return out


def _clip_retry(a: array, b: array, op: int):
    """Kernel clip with perturbation fallback; returns list of rings or None."""
    ba = _bbox_of_ring(a)
    bb = _bbox_of_ring(b)
    diag = math.hypot(max(ba[2], bb[2]) - min(ba[0], bb[0]),
                      max(ba[3], bb[3]) - min(ba[1], bb[1]))
    scale = max(1.0, diag)
    shifted = b
    for attempt in range(_MAX_PERTURB_RETRIES):
        try:
            return _kernels.clip_rings(a, shifted, op), shifted
        except DegenerateGeometry:
            eps = _PERTURB_BASE * scale * (8.0 ** attempt)
            ang = _PERTURB_ANGLE * (attempt + 1)
            shifted = _translated(b, eps * math.cos(ang), eps * math.sin(ang))
    raise GeometryError("polygon clipping failed after perturbation retries")


def _classify_rings(result: list) -> list[tuple[array, float, int]]:
    """(buffer, abs area, nesting depth) per traced ring.  Result regions of
    a non-degenerate clip are disjoint, so even-odd depth separates outer
    boundaries (even) from holes (odd) regardless of traced orientation."""
    arrs = [array("d", r) for r in result]
    out = []
    for i, arr in enumerate(arrs):
        depth = 0
        for j, other in enumerate(arrs):
            if i != j and _kernels.point_in_ring(arr[0], arr[1], other):
                depth += 1
        out.append((arr, abs(_kernels.ring_area_signed(arr)), depth))
    return out


def _ring_pair_intersection_area(a: array, b: array) -> float:
    if _bboxes_disjoint(_bbox_of_ring(a), _bbox_of_ring(b)):
        return 0.0
    if _rings_identical(a, b):
        return abs(_kernels.ring_area_signed(a))
    result, shifted = _clip_retry(a, b, _kernels.OP_INTERSECTION)
    if result is None:
        if _kernels.point_in_ring(a[0], a[1], shifted):
            return abs(_kernels.ring_area_signed(a))
        if _kernels.point_in_ring(shifted[0], shifted[1], a):
            return abs(_kernels.ring_area_signed(shifted))
        return 0.0
    total = 0.0
    for _, area, depth in _classify_rings(result):
        total += area if depth % 2 == 0 else -area
    return max(0.0, total)


def _signed_rings(g: Polygon | MultiPolygon) -> list[tuple[array, int]]:
    out = []
    for part in _as_parts(g):
        out.append((part.exterior.as_array_2d(), 1))
        for hole in part.holes:
            out.append((hole.as_array_2d(), -1))
    return out


def intersection_area(a: Polygon | MultiPolygon, b: Polygon | MultiPolygon) -> float:
    """Area of the set intersection.

    Holes and multipolygon parts reduce to simple-ring clips by
    inclusion-exclusion: area(A^B) sums sign_a*sign_b*area(ring_a^ring_b).
    """
    _require_same_crs(a, b)
    _require_projected(a, b)
    total = 0.0
    for ring_a, sign_a in _signed_rings(a):
        for ring_b, sign_b in _signed_rings(b):
            area = _ring_pair_intersection_area(ring_a, ring_b)
            if area:
                total += sign_a * sign_b * area
    return max(0.0, total)


def point_in_polygon(p: Point, g: Polygon | MultiPolygon) -> bool:
    """Even-odd containment; boundary points (within 1e-9) count as inside."""
    _require_same_crs(p, g)
    for part in _as_parts(g):
        ext = part.exterior.as_array_2d()
        if _kernels.point_on_ring(p.x, p.y, ext, COORD_TOL):
            return True
        if not _kernels.point_in_ring(p.x, p.y, ext):
            continue
        in_hole = False
        for hole in part.holes:
            harr = hole.as_array_2d()
            if _kernels.point_on_ring(p.x, p.y, harr, COORD_TOL):
                return True  # hole boundary is polygon boundary
            if _kernels.point_in_ring(p.x, p.y, harr):
                in_hole = True
                break
        if not in_hole:
            return True
    return False


def _polyline_array(coords) -> array:
    flat = array("d")
    for c in coords:
        flat.append(c[0])
        flat.append(c[1])
    return flat


def _all_rings(g: Polygon | MultiPolygon) -> list[array]:
    return [r.as_array_2d() for part in _as_parts(g) for r in part.rings()]


def _min_boundary_distance(lines_a: list[array], lines_b: list[array]) -> float:
    best = math.inf
    for la in lines_a:
        for lb in lines_b:
            d = _kernels.rings_min_distance(la, lb)
            if d < best:
                best = d
                if best == 0.0:
                    return 0.0
    return best


def sf_intersects(a: Geometry, b: Geometry) -> bool:
    """True when the two point sets share at least one point (boundary
    contact included).  3D geometries are compared by 2D footprint."""
    _require_same_crs(a, b)
    a = drop_z(a)
    b = drop_z(b)
    if isinstance(b, Point) and not isinstance(a, Point):
        a, b = b, a
    if isinstance(b, LineString) and isinstance(a, (Polygon, MultiPolygon)):
        a, b = b, a

    if isinstance(a, Point):
        if isinstance(b, Point):
            return math.hypot(a.x - b.x, a.y - b.y) <= COORD_TOL
        if isinstance(b, LineString):
            arr = _polyline_array(b.coords)
            return _kernels.point_on_ring(a.x, a.y, arr, COORD_TOL)
        return point_in_polygon(a, b)

    if isinstance(a, LineString):
        arr_a = _polyline_array(a.coords)
        if isinstance(b, LineString):
            return _kernels.rings_min_distance(arr_a, _polyline_array(b.coords)) <= COORD_TOL
        # polygon: touching boundary or a vertex inside
        if _min_boundary_distance([arr_a], _all_rings(b)) <= COORD_TOL:
            return True
        return point_in_polygon(Point(a.coords[0][0], a.coords[0][1], crs=a.crs), b)

    # polygon vs polygon
    if _bboxes_disjoint(_bbox_of_ring(_as_parts(a)[0].exterior.as_array_2d()),
                        _bbox_of_ring(_as_parts(b)[0].exterior.as_array_2d())) \
            and isinstance(a, Polygon) and isinstance(b, Polygon):
        return False
    if _min_boundary_distance(_all_rings(a), _all_rings(b)) <= COORD_TOL:
        return True
    pa = _as_parts(a)[0].exterior.coords[0]
    if point_in_polygon(Point(pa[0], pa[1], crs=a.crs), b):
        return True
    pb = _as_parts(b)[0].exterior.coords[0]
    return point_in_polygon(Point(pb[0], pb[1], crs=b.crs), a)


def polygon_distance(a: Polygon | MultiPolygon, b: Polygon | MultiPolygon) -> float:
    """Minimum distance between boundaries; 0 when the areas intersect."""
    _require_same_crs(a, b)
    _require_projected(a, b)
    if sf_intersects(a, b):
        return 0.0
    return _min_boundary_distance(_all_rings(a), _all_rings(b))


def _disc_ring(cx: float, cy: float, r: float, nseg: int) -> array:
    pts = array("d")
    for k in range(nseg):
        ang = 2.0 * math.pi * k / nseg
        pts.append(cx + r * math.cos(ang))
        pts.append(cy + r * math.sin(ang))
    pts.append(pts[0])
    pts.append(pts[1])
    return pts


def _capsule_ring(px, py, qx, qy, r: float, nseg: int) -> array:
    length = math.hypot(qx - px, qy - py)
    if length <= COORD_TOL:
        return _disc_ring(px, py, r, nseg)
    theta = math.atan2(qy - py, qx - px)
    half = max(4, nseg // 2)
    pts = array("d")
    for k in range(half + 1):  # cap around q, from -90 to +90 degrees
        ang = theta - math.pi / 2.0 + math.pi * k / half
        pts.append(qx + r * math.cos(ang))
        pts.append(qy + r * math.sin(ang))
    for k in range(half + 1):  # cap around p, from +90 to +270 degrees
        ang = theta + math.pi / 2.0 + math.pi * k / half
        pts.append(px + r * math.cos(ang))
        pts.append(py + r * math.sin(ang))
    pts.append(pts[0])
    pts.append(pts[1])
    return pts


def _ring_pair_union_outer(a: array, b: array) -> array | None:
    """Outer boundary of the union of two simple rings; None when disjoint.
    Hole rings that a union can produce are dropped (see module notes)."""
    if _rings_identical(a, b):
        return a
    result, shifted = _clip_retry(a, b, _kernels.OP_UNION)
    if result is None:
        if _kernels.point_in_ring(a[0], a[1], shifted):
            return shifted
        if _kernels.point_in_ring(shifted[0], shifted[1], a):
            return a
        return None
    best = None
    best_area = -1.0
    for arr, area, depth in _classify_rings(result):
        if depth == 0 and area > best_area:
            best_area = area
            best = arr
    return best


def _union_rings(rings: list[array]) -> list[array]:
    merged: list[array] = []
    for ring in rings:
        cur = ring
        i = 0
        while i < len(merged):
            if not _bboxes_disjoint(_bbox_of_ring(merged[i]), _bbox_of_ring(cur)):
                u = _ring_pair_union_outer(merged[i], cur)
                if u is not None:
                    cur = u
                    merged.pop(i)
                    i = 0
                    continue
            i += 1
        merged.append(cur)
    return merged


def _array_to_polygon(arr: array, crs) -> Polygon:
    coords = tuple((arr[2 * i], arr[2 * i + 1]) for i in range(len(arr) // 2))
    return Polygon(Ring(coords), (), crs)


def buffer(g: LineString | Polygon, radius: float, arc_segments: int = 32) -> Polygon | MultiPolygon:
    """Outward offset by ``radius`` meters.

    Arcs are inscribed regular-polygon approximations with ``arc_segments``
    chords per full circle, so the result lies within
    radius*(1-cos(pi/arc_segments)) of the exact offset and its area grows
    monotonically with both radius and arc_segments.
    """
    _require_projected(g)
    if radius <= 0.0:
        raise GeometryError(f"buffer radius must be positive, got {radius}")
    if arc_segments < 8:
        raise GeometryError(f"arc_segments must be >= 8, got {arc_segments}")

    rings: list[array] = []
    if isinstance(g, LineString):
        coords = [(c[0], c[1]) for c in g.coords]
        for (px, py), (qx, qy) in zip(coords, coords[1:]):
            rings.append(_capsule_ring(px, py, qx, qy, radius, arc_segments))
        if len(coords) == 2 and coords[0] == coords[1]:
            rings = [_disc_ring(coords[0][0], coords[0][1], radius, arc_segments)]
    elif isinstance(g, Polygon):
        rings.append(g.exterior.as_array_2d())
        for r in g.rings():
            cs = [(c[0], c[1]) for c in r.coords]
            for (px, py), (qx, qy) in zip(cs, cs[1:]):
                rings.append(_capsule_ring(px, py, qx, qy, radius, arc_segments))
    else:
        raise GeometryError(f"cannot buffer {type(g).__name__}")

    outers = _union_rings(rings)
    parts = tuple(_array_to_polygon(arr, g.crs) for arr in outers)
    if len(parts) == 1:
        return parts[0]
    return MultiPolygon(parts, g.crs)
