"""Numeric geometry kernel: WKT, areas, overlap, containment, buffering,
UTM transforms and a bulk-loaded spatial index."""

from citykg.geometry.errors import CrsError, GeometryError, WktParseError
from citykg.geometry.index import SpatialIndex, index_build
from citykg.geometry.ops import (
    KERNEL_BACKEND,
    buffer,
    intersection_area,
    point_in_polygon,
    polygon_area,
    polygon_distance,
    sf_intersects,
)
from citykg.geometry.transform import to_utm, to_wgs84, transform, utm_zone_for
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
    bbox_of,
    crs_from_string,
    drop_z,
    polygon,
    rect,
    utm,
)
from citykg.geometry.wkt import parse_wkt, to_wkt

__all__ = [
    "CRS",
    "WGS84",
    "Coord",
    "CrsError",
    "Geometry",
    "GeometryError",
    "KERNEL_BACKEND",
    "LineString",
    "MultiPolygon",
    "Point",
    "Polygon",
    "PolyhedralSurface",
    "Ring",
    "SpatialIndex",
    "WktParseError",
    "bbox_of",
    "buffer",
    "crs_from_string",
    "drop_z",
    "index_build",
    "intersection_area",
    "parse_wkt",
    "point_in_polygon",
    "polygon",
    "polygon_area",
    "polygon_distance",
    "rect",
    "sf_intersects",
    "to_utm",
    "to_wgs84",
    "to_wkt",
    "transform",
    "utm",
    "utm_zone_for",
]
