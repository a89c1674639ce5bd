"""Immutable geometry values and coordinate reference systems.

Rings are stored closed (first coordinate repeated at the end) and, for 2D
polygon variants, normalized to counter-clockwise exteriors with clockwise
holes.  All values are frozen dataclasses, safe to share between threads.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field

from citykg.geometry.errors import GeometryError

# coordinates closer than this count as equal
COORD_TOL = 1e-9

Coord = tuple[float, ...]  # (x, y) or (x, y, z)


@dataclass(frozen=True)
class CRS:
    """Either geographic WGS84 (lon/lat degrees) or a projected UTM zone."""

    kind: str  # "wgs84" | "utm"
    zone: int | None = None
    south: bool = False

    def __post_init__(self):
        if self.kind not in ("wgs84", "utm"):
            raise GeometryError(f"unknown CRS kind: {self.kind!r}")
        if self.kind == "utm":
            if self.zone is None or not 1 <= self.zone <= 60:
                raise GeometryError(f"UTM zone out of range: {self.zone!r}")
        elif self.zone is not None:
            raise GeometryError("geographic CRS takes no zone")

    @property
    def is_projected(self) -> bool:
        return self.kind == "utm"

    def __str__(self) -> str:
        if self.kind == "wgs84":
            return "WGS84"
        return f"UTM{self.zone}{'S' if self.south else 'N'}"


WGS84 = CRS("wgs84")


def utm(zone: int, hemisphere: str = "N") -> CRS:
    return CRS("utm", zone, hemisphere.upper() == "S")


def crs_from_string(text: str) -> CRS:
    """Inverse of str(CRS); accepts "WGS84" and "UTM<zone><N|S>"."""
    t = text.strip().upper()
    if t == "WGS84":
        return WGS84
    if t.startswith("UTM") and t[-1] in "NS":
        return utm(int(t[3:-1]), t[-1])
    raise GeometryError(f"unrecognized CRS string: {text!r}")


def _check_coord(c: Coord) -> None:
    if len(c) not in (2, 3):
        raise GeometryError(f"coordinate must have 2 or 3 components, got {len(c)}")
    for v in c:
        if not math.isfinite(v):
            raise GeometryError(f"non-finite coordinate: {c}")


def _close_ring(coords: tuple[Coord, ...]) -> tuple[Coord, ...]:
    if len(coords) >= 2 and _coords_close(coords[0], coords[-1]):
        return coords[:-1] + (coords[0],)  # snap exact closure
    return coords + (coords[0],)


def _coords_close(a: Coord, b: Coord) -> bool:
    return all(abs(x - y) <= COORD_TOL for x, y in zip(a, b)) and len(a) == len(b)


def ring_signed_area_2d(coords: tuple[Coord, ...]) -> float:
    s = 0.0
    for i in range(len(coords) - 1):
        s += coords[i][0] * coords[i + 1][1] - coords[i + 1][0] * coords[i][1]
    return 0.5 * s


class Geometry:
    """Base marker; concrete variants below."""

    crs: CRS


@dataclass(frozen=True)
class Point(Geometry):
    x: float
    y: float
    z: float | None = None
    crs: CRS = WGS84

    def __post_init__(self):
        _check_coord(self.coord)

    @property
    def coord(self) -> Coord:
        if self.z is None:
            return (self.x, self.y)
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class LineString(Geometry):
    coords: tuple[Coord, ...]
    crs: CRS = WGS84

    def __post_init__(self):
        if len(self.coords) < 2:
            raise GeometryError("linestring needs at least 2 points")
        for c in self.coords:
            _check_coord(c)


@dataclass(frozen=True)
class Ring:
    """A closed ring of coordinates (first == last, at least 4 entries)."""

    coords: tuple[Coord, ...]

    def __post_init__(self):
        for c in self.coords:
            _check_coord(c)
        coords = _close_ring(self.coords)
        if len(coords) < 4:
            raise GeometryError("ring needs at least 3 distinct points")
        object.__setattr__(self, "coords", coords)

    def reversed(self) -> "Ring":
        return Ring(tuple(reversed(self.coords)))

    def signed_area_2d(self) -> float:
        return ring_signed_area_2d(self.coords)

    def as_array_2d(self) -> array:
        """Closed flat [x, y, ...] buffer for the kernels (z dropped)."""
        flat = array("d")
        for c in self.coords:
            flat.append(c[0])
            flat.append(c[1])
        return flat


@dataclass(frozen=True)
class Polygon(Geometry):
    exterior: Ring
    holes: tuple[Ring, ...] = ()
    crs: CRS = WGS84
    normalized: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.normalized:
            return
        ext = self.exterior
        if ext.signed_area_2d() < 0:
            ext = ext.reversed()
        holes = tuple(h.reversed() if h.signed_area_2d() > 0 else h
                      for h in self.holes)
        object.__setattr__(self, "exterior", ext)
        object.__setattr__(self, "holes", holes)

    def rings(self) -> tuple[Ring, ...]:
        return (self.exterior,) + self.holes


@dataclass(frozen=True)
class MultiPolygon(Geometry):
    parts: tuple[Polygon, ...]
    crs: CRS = WGS84

    def __post_init__(self):
        if not self.parts:
            raise GeometryError("multipolygon needs at least one part")


@dataclass(frozen=True)
class PolyhedralSurface(Geometry):
    """A 3D surface as a list of planar polygon faces (always with z)."""

    faces: tuple[Polygon, ...]
    crs: CRS = WGS84

    def __post_init__(self):
        if not self.faces:
            raise GeometryError("polyhedral surface needs at least one face")


def polygon(exterior: list[Coord] | tuple[Coord, ...],
            holes: tuple = (), crs: CRS = WGS84) -> Polygon:
    """Convenience constructor from raw coordinate lists."""
    return Polygon(Ring(tuple(exterior)),
                   tuple(Ring(tuple(h)) for h in holes), crs)


def rect(x1: float, y1: float, x2: float, y2: float, crs: CRS = WGS84) -> Polygon:
    return polygon([(x1, y1), (x2, y1), (x2, y2), (x1, y2), (x1, y1)], crs=crs)


def bbox_of(g: Geometry) -> tuple[float, float, float, float]:
    """2D bounding box (minx, miny, maxx, maxy)."""
    xs: list[float] = []
    ys: list[float] = []

    def take(coords):
        for c in coords:
            xs.append(c[0])
            ys.append(c[1])

    if isinstance(g, Point):
        take([g.coord])
    elif isinstance(g, LineString):
        take(g.coords)
    elif isinstance(g, Polygon):
        take(g.exterior.coords)
    elif isinstance(g, MultiPolygon):
        for p in g.parts:
            take(p.exterior.coords)
    elif isinstance(g, PolyhedralSurface):
        for p in g.faces:
            take(p.exterior.coords)
    else:
        raise GeometryError(f"no bbox for {type(g).__name__}")
    return (min(xs), min(ys), max(xs), max(ys))


def drop_z(g: Geometry) -> Geometry:
    """2D footprint: z coordinates removed; polyhedral faces become a
    multipolygon of their planar projections."""

    def flat_ring(r: Ring) -> Ring:
        return Ring(tuple((c[0], c[1]) for c in r.coords))

    if isinstance(g, Point):
        return Point(g.x, g.y, None, g.crs)
    if isinstance(g, LineString):
        return LineString(tuple((c[0], c[1]) for c in g.coords), g.crs)
    if isinstance(g, Polygon):
        return Polygon(flat_ring(g.exterior),
                       tuple(flat_ring(h) for h in g.holes), g.crs)
    if isinstance(g, MultiPolygon):
        return MultiPolygon(tuple(drop_z(p) for p in g.parts), g.crs)
    if isinstance(g, PolyhedralSurface):
        parts = []
        for f in g.faces:
            flat = Polygon(flat_ring(f.exterior),
                           tuple(flat_ring(h) for h in f.holes),
                           g.crs, normalized=False)
            parts.append(flat)
        return MultiPolygon(tuple(parts), g.crs)
    raise GeometryError(f"cannot flatten {type(g).__name__}")
