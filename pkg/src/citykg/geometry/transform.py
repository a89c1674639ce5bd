"""WGS84 <-> UTM coordinate transforms.

Transverse Mercator via the Krüger series in the third flattening n
(terms through n^4), good to well under a centimeter inside a zone.
The inverse recovers latitude from the conformal latitude with Newton
iteration, so forward/inverse round-trips are exact to machine noise.
"""

from __future__ import annotations

import math

from citykg.geometry.errors import CrsError, GeometryError
from citykg.geometry.types import (
    CRS,
    WGS84,
    Geometry,
    LineString,
    MultiPolygon,
    Point,
    Polygon,
    PolyhedralSurface,
    Ring,
)

# WGS84 ellipsoid
_A = 6378137.0
_F = 1.0 / 298.257223563

_N = _F / (2.0 - _F)
_E = 2.0 * math.sqrt(_N) / (1.0 + _N)  # first eccentricity
_RECT_A = _A / (1.0 + _N) * (1.0 + _N ** 2 / 4.0 + _N ** 4 / 64.0)

_K0 = 0.9996
_FALSE_EASTING = 500000.0
_FALSE_NORTHING_SOUTH = 10000000.0

_ALPHA = (
    _N / 2.0 - 2.0 * _N ** 2 / 3.0 + 5.0 * _N ** 3 / 16.0 + 41.0 * _N ** 4 / 180.0,
    13.0 * _N ** 2 / 48.0 - 3.0 * _N ** 3 / 5.0 + 557.0 * _N ** 4 / 1440.0,
    61.0 * _N ** 3 / 240.0 - 103.0 * _N ** 4 / 140.0,
    49561.0 * _N ** 4 / 161280.0,
)
_BETA = (
    _N / 2.0 - 2.0 * _N ** 2 / 3.0 + 37.0 * _N ** 3 / 96.0 - _N ** 4 / 360.0,
    _N ** 2 / 48.0 + _N ** 3 / 15.0 - 437.0 * _N ** 4 / 1440.0,
    17.0 * _N ** 3 / 480.0 - 37.0 * _N ** 4 / 840.0,
    4397.0 * _N ** 4 / 161280.0,
)

MAX_LATITUDE = 84.0


def utm_zone_for(lon: float, lat: float) -> CRS:
    """UTM CRS containing a WGS84 coordinate (no Norway/Svalbard quirks)."""
    zone = int((lon + 180.0) // 6.0) + 1
    zone = min(60, max(1, zone))
    return CRS("utm", zone, lat < 0.0)


def _central_meridian(zone: int) -> float:
    return math.radians(zone * 6.0 - 183.0)


def to_utm(lon: float, lat: float, zone: int, south: bool = False) -> tuple[float, float]:
    """Forward projection of a WGS84 degree pair to UTM meters."""
    if abs(lat) > MAX_LATITUDE:
        raise CrsError(f"latitude {lat} outside UTM range +-{MAX_LATITUDE}")
    phi = math.radians(lat)
    dlon = math.radians(lon) - _central_meridian(zone)

    s = math.sin(phi)
    t = math.sinh(math.atanh(s) - _E * math.atanh(_E * s))
    xi = math.atan2(t, math.cos(dlon))
    eta = math.asinh(math.sin(dlon) / math.hypot(t, math.cos(dlon)))

    x = xi
    y = eta
    for j, a in enumerate(_ALPHA, start=1):
        x += a * math.sin(2 * j * xi) * math.cosh(2 * j * eta)
        y += a * math.cos(2 * j * xi) * math.sinh(2 * j * eta)

    easting = _FALSE_EASTING + _K0 * _RECT_A * y
    northing = _K0 * _RECT_A * x
    if south:
        northing += _FALSE_NORTHING_SOUTH
    return easting, northing


def to_wgs84(easting: float, northing: float, zone: int, south: bool = False) -> tuple[float, float]:
    """Inverse projection of UTM meters back to WGS84 degrees (lon, lat)."""
    if south:
        northing -= _FALSE_NORTHING_SOUTH
    xi = northing / (_K0 * _RECT_A)
    eta = (easting - _FALSE_EASTING) / (_K0 * _RECT_A)

    xi_p = xi
    eta_p = eta
    for j, b in enumerate(_BETA, start=1):
        xi_p -= b * math.sin(2 * j * xi) * math.cosh(2 * j * eta)
        eta_p -= b * math.cos(2 * j * xi) * math.sinh(2 * j * eta)

    chi = math.asin(math.sin(xi_p) / math.cosh(eta_p))
    lam = math.atan2(math.sinh(eta_p), math.cos(xi_p))

    # invert the conformal latitude with Newton iteration
    psi = math.atanh(math.sin(chi))
    phi = chi
    for _ in range(8):
        s = math.sin(phi)
        g = math.atanh(s) - _E * math.atanh(_E * s) - psi
        dg = 1.0 / math.cos(phi) - _E * _E * math.cos(phi) / (1.0 - (_E * s) ** 2)
        step = g / dg
        phi -= step
        if abs(step) < 1e-15:
            break

    lon = math.degrees(lam + _central_meridian(zone))
    return lon, math.degrees(phi)


def _map_coords(g: Geometry, fn, crs: CRS) -> Geometry:
    def one(c):
        x, y = fn(c[0], c[1])
        return (x, y) + tuple(c[2:])

    def ring(r: Ring) -> Ring:
        return Ring(tuple(one(c) for c in r.coords))

    if isinstance(g, Point):
        x, y = fn(g.x, g.y)
        return Point(x, y, g.z, crs)
    if isinstance(g, LineString):
        return LineString(tuple(one(c) for c in g.coords), crs)
    if isinstance(g, Polygon):
        return Polygon(ring(g.exterior), tuple(ring(h) for h in g.holes), crs)
    if isinstance(g, MultiPolygon):
        return MultiPolygon(tuple(_map_coords(p, fn, crs) for p in g.parts), crs)
    if isinstance(g, PolyhedralSurface):
        faces = tuple(
            Polygon(ring(f.exterior), tuple(ring(h) for h in f.holes),
                    crs, normalized=False)
            for f in g.faces
        )
        return PolyhedralSurface(faces, crs)
    raise GeometryError(f"cannot transform {type(g).__name__}")


def transform(g: Geometry, target: CRS) -> Geometry:
    """Reproject a geometry; z values pass through untouched."""
    src = g.crs
    if src == target:
        return g
    if src.kind == "wgs84" and target.kind == "utm":
        return _map_coords(g, lambda x, y: to_utm(x, y, target.zone, target.south), target)
    if src.kind == "utm" and target.kind == "wgs84":
        return _map_coords(g, lambda x, y: to_wgs84(x, y, src.zone, src.south), target)
    if src.kind == "utm" and target.kind == "utm":
        return transform(transform(g, WGS84), target)
    raise CrsError(f"no transform from {src} to {target}")
