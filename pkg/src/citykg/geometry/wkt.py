"""WKT reading and writing.

Supported types: POINT, LINESTRING, POLYGON, MULTIPOLYGON and
POLYHEDRALSURFACE, each with an optional Z dimension marker.  Numbers are
written in the shortest form that round-trips a 64-bit float, keywords in
upper case, with a single space after commas.
"""

from __future__ import annotations

from citykg.geometry.errors import WktParseError
from citykg.geometry.types import (
    CRS,
    WGS84,
    Coord,
    Geometry,
    LineString,
    MultiPolygon,
    Point,
    Polygon,
    PolyhedralSurface,
    Ring,
)

_TYPES = ("POINT", "LINESTRING", "POLYGON", "MULTIPOLYGON", "POLYHEDRALSURFACE")


def format_number(v: float) -> str:
    if v == 0.0:
        return "0"
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> WktParseError:
        return WktParseError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def word(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        return self.text[start:self.pos].upper()

    def number(self) -> float:
        self.skip_ws()
        start = self.pos
        allowed = "+-0123456789.eE"
        while self.pos < len(self.text) and self.text[self.pos] in allowed:
            self.pos += 1
        token = self.text[start:self.pos]
        if not token:
            raise self.error("expected a number")
        try:
            return float(token)
        except ValueError:
            self.pos = start
            raise self.error(f"bad number {token!r}") from None

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _coord(cur: _Cursor, dims: int) -> Coord:
    vals = [cur.number()]
    for _ in range(dims - 1):
        vals.append(cur.number())
    return tuple(vals)


def _coord_seq(cur: _Cursor, dims: int) -> tuple[Coord, ...]:
    cur.expect("(")
    coords = [_coord(cur, dims)]
    while cur.peek() == ",":
        cur.expect(",")
        coords.append(_coord(cur, dims))
    cur.expect(")")
    return tuple(coords)


def _ring(cur: _Cursor, dims: int) -> Ring:
    at = cur.pos
    coords = _coord_seq(cur, dims)
    if len(coords) < 4:
        cur.pos = at
        raise cur.error("ring needs at least 4 coordinates")
    if coords[0] != coords[-1]:
        cur.pos = at
        raise cur.error("unclosed ring")
    return Ring(coords)


def _polygon_body(cur: _Cursor, dims: int, crs: CRS, normalize: bool) -> Polygon:
    cur.expect("(")
    exterior = _ring(cur, dims)
    holes = []
    while cur.peek() == ",":
        cur.expect(",")
        holes.append(_ring(cur, dims))
    cur.expect(")")
    return Polygon(exterior, tuple(holes), crs, normalized=normalize)


def parse_wkt(text: str, crs: CRS = WGS84) -> Geometry:
    """Parse a WKT string; raises WktParseError with the failing position."""
    cur = _Cursor(text)
    keyword = cur.word()
    if not keyword:
        raise cur.error("empty WKT")
    if keyword not in _TYPES:
        raise cur.error(f"unsupported WKT type {keyword!r}")

    dims = 2
    mark = cur.pos
    modifier = cur.word()
    if modifier == "Z":
        dims = 3
    elif modifier:
        raise cur.error(f"unsupported WKT modifier {modifier!r}")
    else:
        cur.pos = mark
    if keyword == "POLYHEDRALSURFACE" and dims != 3:
        raise cur.error("POLYHEDRALSURFACE requires the Z modifier")

    if keyword == "POINT":
        cur.expect("(")
        c = _coord(cur, dims)
        cur.expect(")")
        geom: Geometry = Point(c[0], c[1], c[2] if dims == 3 else None, crs)
    elif keyword == "LINESTRING":
        coords = _coord_seq(cur, dims)
        if len(coords) < 2:
            raise cur.error("linestring needs at least 2 points")
        geom = LineString(coords, crs)
    elif keyword == "POLYGON":
        geom = _polygon_body(cur, dims, crs, normalize=True)
    elif keyword == "MULTIPOLYGON":
        cur.expect("(")
        parts = [_polygon_body(cur, dims, crs, normalize=True)]
        while cur.peek() == ",":
            cur.expect(",")
            parts.append(_polygon_body(cur, dims, crs, normalize=True))
        cur.expect(")")
        geom = MultiPolygon(tuple(parts), crs)
    else:  # POLYHEDRALSURFACE
        cur.expect("(")
        faces = [_polygon_body(cur, 3, crs, normalize=False)]
        while cur.peek() == ",":
            cur.expect(",")
            faces.append(_polygon_body(cur, 3, crs, normalize=False))
        cur.expect(")")
        geom = PolyhedralSurface(tuple(faces), crs)

    if not cur.at_end():
        raise cur.error("trailing characters after WKT")
    return geom


def _fmt_coord(c: Coord) -> str:
    return " ".join(format_number(v) for v in c)


def _fmt_seq(coords: tuple[Coord, ...]) -> str:
    return "(" + ", ".join(_fmt_coord(c) for c in coords) + ")"


def _fmt_polygon_body(p: Polygon) -> str:
    return "(" + ", ".join(_fmt_seq(r.coords) for r in p.rings()) + ")"


def _is_3d(g: Geometry) -> bool:
    if isinstance(g, Point):
        return g.z is not None
    if isinstance(g, LineString):
        return len(g.coords[0]) == 3
    if isinstance(g, Polygon):
        return len(g.exterior.coords[0]) == 3
    if isinstance(g, MultiPolygon):
        return _is_3d(g.parts[0])
    return True  # polyhedral surfaces are always 3D


def to_wkt(g: Geometry) -> str:
    """Serialize a geometry; parse_wkt(to_wkt(g)) recovers g."""
    z = " Z" if _is_3d(g) else ""
    if isinstance(g, Point):
        return f"POINT{z} ({_fmt_coord(g.coord)})"
    if isinstance(g, LineString):
        return f"LINESTRING{z} {_fmt_seq(g.coords)}"
    if isinstance(g, Polygon):
        return f"POLYGON{z} {_fmt_polygon_body(g)}"
    if isinstance(g, MultiPolygon):
        body = ", ".join(_fmt_polygon_body(p) for p in g.parts)
        return f"MULTIPOLYGON{z} ({body})"
    if isinstance(g, PolyhedralSurface):
        body = ", ".join(_fmt_polygon_body(f) for f in g.faces)
        return f"POLYHEDRALSURFACE Z ({body})"
    raise TypeError(f"cannot serialize {type(g).__name__}")
