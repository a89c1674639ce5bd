"""Independent oracles shared by the unit and acceptance tests.

Everything here deliberately avoids the package's own computation paths:
Monte-Carlo sampling for areas, plain-Python segment scans for distances,
union-find for relation components, and Snyder's transverse-Mercator
series (a different formulation than the package's Krüger series).
"""

from __future__ import annotations

import math

import numpy as np

from citykg.geometry.types import MultiPolygon, Polygon

# ---------------------------------------------------------------------------
# Monte-Carlo area estimation


def _ring_edges(coords) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    xs = np.array([c[0] for c in coords])
    ys = np.array([c[1] for c in coords])
    return xs[:-1], ys[:-1], xs[1:], ys[1:]


def _points_in_ring(px: np.ndarray, py: np.ndarray, coords) -> np.ndarray:
    x1, y1, x2, y2 = _ring_edges(coords)
    crossing = (y1[None, :] > py[:, None]) != (y2[None, :] > py[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x1[None, :] + (py[:, None] - y1[None, :]) * (x2 - x1)[None, :] / (y2 - y1)[None, :]
    hits = crossing & (px[:, None] < xint)
    return hits.sum(axis=1) % 2 == 1


def points_in_polygon_np(px: np.ndarray, py: np.ndarray, g: Polygon | MultiPolygon) -> np.ndarray:
    parts = g.parts if isinstance(g, MultiPolygon) else (g,)
    inside = np.zeros(len(px), dtype=bool)
    for part in parts:
        part_in = _points_in_ring(px, py, part.exterior.coords)
        for hole in part.holes:
            part_in &= ~_points_in_ring(px, py, hole.coords)
        inside |= part_in
    return inside


def _bbox(g) -> tuple[float, float, float, float]:
    parts = g.parts if isinstance(g, MultiPolygon) else (g,)
    xs = [c[0] for p in parts for c in p.exterior.coords]
    ys = [c[1] for p in parts for c in p.exterior.coords]
    return min(xs), min(ys), max(xs), max(ys)


def mc_polygon_area(g: Polygon | MultiPolygon, samples: int = 100_000, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    x1, y1, x2, y2 = _bbox(g)
    px = rng.uniform(x1, x2, samples)
    py = rng.uniform(y1, y2, samples)
    frac = points_in_polygon_np(px, py, g).mean()
    return frac * (x2 - x1) * (y2 - y1)


def mc_intersection_area(a, b, samples: int = 100_000, seed: int = 0) -> float:
    ax1, ay1, ax2, ay2 = _bbox(a)
    bx1, by1, bx2, by2 = _bbox(b)
    x1, y1 = max(ax1, bx1), max(ay1, by1)
    x2, y2 = min(ax2, bx2), min(ay2, by2)
    if x1 >= x2 or y1 >= y2:
        return 0.0
    rng = np.random.default_rng(seed)
    px = rng.uniform(x1, x2, samples)
    py = rng.uniform(y1, y2, samples)
    both = points_in_polygon_np(px, py, a) & points_in_polygon_np(px, py, b)
    return both.mean() * (x2 - x1) * (y2 - y1)


# ---------------------------------------------------------------------------
# Brute-force boundary distance


def _pt_seg(px, py, ax, ay, bx, by) -> float:
    dx, dy = bx - ax, by - ay
    l2 = dx * dx + dy * dy
    if l2 == 0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / l2))
    return math.hypot(px - ax - t * dx, py - ay - t * dy)


def _segments(g) -> list[tuple[float, float, float, float]]:
    parts = g.parts if isinstance(g, MultiPolygon) else (g,)
    segs = []
    for part in parts:
        for ring in (part.exterior,) + part.holes:
            cs = ring.coords
            for i in range(len(cs) - 1):
                segs.append((cs[i][0], cs[i][1], cs[i + 1][0], cs[i + 1][1]))
    return segs


def brute_boundary_distance(a, b) -> float:
    best = math.inf
    for ax, ay, bx, by in _segments(a):
        for cx, cy, dx, dy in _segments(b):
            d1 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
            d2 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
            d3 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            d4 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
            if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != d2 and d3 != d4:
                return 0.0
            best = min(
                best,
                _pt_seg(ax, ay, cx, cy, dx, dy),
                _pt_seg(bx, by, cx, cy, dx, dy),
                _pt_seg(cx, cy, ax, ay, bx, by),
                _pt_seg(dx, dy, ax, ay, bx, by),
            )
    return best


# ---------------------------------------------------------------------------
# Union-find over bipartite match edges


class UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def classify_components_union_find(edges: list[tuple]) -> dict:
    """edges are (citygml_id, osm_key) pairs; returns edge -> class label."""
    uf = UnionFind()
    for gml, osm in edges:
        uf.union(("g", gml), ("o", osm))
    members: dict = {}
    for gml, osm in edges:
        root = uf.find(("g", gml))
        g_set, o_set = members.setdefault(root, (set(), set()))
        g_set.add(gml)
        o_set.add(osm)
    out = {}
    for edge in edges:
        root = uf.find(("g", edge[0]))
        g_set, o_set = members[root]
        if len(o_set) == 1 and len(g_set) == 1:
            label = "1:1"
        elif len(o_set) == 1:
            label = "1:n"
        elif len(g_set) == 1:
            label = "m:1"
        else:
            label = "m:n"
        out[edge] = label
    return out


# ---------------------------------------------------------------------------
# Snyder transverse Mercator (independent of the package's Krüger series)


def snyder_to_utm(lon: float, lat: float, zone: int) -> tuple[float, float]:
    a = 6378137.0
    f = 1 / 298.257223563
    e2 = f * (2 - f)
    ep2 = e2 / (1 - e2)
    k0 = 0.9996
    phi = math.radians(lat)
    lam0 = math.radians(zone * 6 - 183)
    lam = math.radians(lon)
    n = a / math.sqrt(1 - e2 * math.sin(phi) ** 2)
    t = math.tan(phi) ** 2
    c = ep2 * math.cos(phi) ** 2
    big_a = (lam - lam0) * math.cos(phi)
    m = a * (
        (1 - e2 / 4 - 3 * e2**2 / 64 - 5 * e2**3 / 256) * phi
        - (3 * e2 / 8 + 3 * e2**2 / 32 + 45 * e2**3 / 1024) * math.sin(2 * phi)
        + (15 * e2**2 / 256 + 45 * e2**3 / 1024) * math.sin(4 * phi)
        - (35 * e2**3 / 3072) * math.sin(6 * phi)
    )
    x = k0 * n * (
        big_a
        + (1 - t + c) * big_a**3 / 6
        + (5 - 18 * t + t**2 + 72 * c - 58 * ep2) * big_a**5 / 120
    ) + 500000.0
    y = k0 * (
        m
        + n * math.tan(phi) * (
            big_a**2 / 2
            + (5 - t + 9 * c + 4 * c**2) * big_a**4 / 24
            + (61 - 58 * t + t**2 + 600 * c - 330 * ep2) * big_a**6 / 720
        )
    )
    return x, y


# ---------------------------------------------------------------------------
# Random simple polygons for randomized scenes


def random_convex(rng, cx: float, cy: float, scale: float, crs) -> Polygon:
    from citykg.geometry.types import Ring

    pts = [(rng.uniform(-scale, scale), rng.uniform(-scale, scale)) for _ in range(8)]
    hull = _convex_hull(pts)
    coords = tuple((cx + x, cy + y) for x, y in hull)
    return Polygon(Ring(coords + (coords[0],)), (), crs)


def random_star(rng, cx: float, cy: float, scale: float, crs) -> Polygon:
    from citykg.geometry.types import Ring

    k = rng.randint(5, 11)
    # jittered uniform grid keeps every angular gap well below pi, so the
    # center stays in the kernel and the polygon is always simple
    offset = rng.uniform(0, 2 * math.pi)
    angles = [offset + (i + 0.8 * rng.random()) * 2 * math.pi / k for i in range(k)]
    coords = tuple(
        (cx + r * math.cos(a), cy + r * math.sin(a))
        for a, r in ((a, rng.uniform(0.3, 1.0) * scale) for a in angles)
    )
    return Polygon(Ring(coords + (coords[0],)), (), crs)


def _convex_hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        raise ValueError("degenerate hull")

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]
