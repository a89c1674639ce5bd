"""WKT parsing and serialization."""

import pytest
import shapely

from citykg.geometry import (
    LineString,
    MultiPolygon,
    Point,
    Polygon,
    PolyhedralSurface,
    WktParseError,
    parse_wkt,
    polygon_area,
    to_wkt,
    utm,
)

UTM32 = utm(32)


def test_point_direct():
    g = parse_wkt("POINT (1 2)")
    assert isinstance(g, Point)
    assert (g.x, g.y, g.z) == (1.0, 2.0, None)
    assert to_wkt(g) == "POINT (1 2)"


def test_point_z():
    g = parse_wkt("POINT Z (1 2 3)")
    assert g.z == 3.0
    assert to_wkt(g) == "POINT Z (1 2 3)"


def test_square_polygon_area_downstream():
    g = parse_wkt("POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0))", UTM32)
    assert isinstance(g, Polygon)
    assert polygon_area(g) == 16.0


def test_unit_square_serialization():
    g = parse_wkt("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))")
    assert to_wkt(g) == "POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))"


def test_polyhedral_surface_single_face():
    g = parse_wkt("POLYHEDRALSURFACE Z (((0 0 0, 1 0 0, 1 1 0, 0 0 0)))")
    assert isinstance(g, PolyhedralSurface)
    assert len(g.faces) == 1
    assert g.faces[0].exterior.coords == ((0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 0, 0))


@pytest.mark.parametrize(
    "text",
    [
        "POINT (1 2)",
        "LINESTRING (0 0, 10 0, 10 5)",
        "POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0))",
        "POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0), (1 1, 1 2, 2 2, 2 1, 1 1))",
        "MULTIPOLYGON (((0 0, 1 0, 1 1, 0 1, 0 0)), ((5 5, 6 5, 6 6, 5 6, 5 5)))",
        "POINT (1.5 -2.25)",
        "POLYGON ((100.125 200.5, 104 200.5, 104 204, 100.125 204, 100.125 200.5))",
    ],
)
def test_agrees_with_independent_reader(text):
    """Cross-check against shapely's WKT reader on the types it supports."""
    ours = parse_wkt(text)
    theirs = shapely.from_wkt(text)
    if isinstance(ours, Point):
        assert (ours.x, ours.y) == (theirs.x, theirs.y)
    elif isinstance(ours, LineString):
        assert ours.coords == tuple(theirs.coords)
    elif isinstance(ours, Polygon):
        assert set(ours.exterior.coords) == set(theirs.exterior.coords)
        assert len(ours.holes) == len(theirs.interiors)
    elif isinstance(ours, MultiPolygon):
        assert len(ours.parts) == len(theirs.geoms)


@pytest.mark.parametrize(
    "text",
    [
        "POINT (1 2)",
        "POINT Z (1 2 3)",
        "LINESTRING (0 0, 10 0, 10 5)",
        "POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0), (1 1, 1 2, 2 2, 2 1, 1 1))",
        "MULTIPOLYGON (((0 0, 1 0, 1 1, 0 1, 0 0)), ((5 5, 6 5, 6 6, 5 6, 5 5)))",
        "POLYHEDRALSURFACE Z (((0 0 0, 1 0 0, 1 1 0, 0 0 0)), ((0 0 0, 0 1 0, 0 1 5, 0 0 5, 0 0 0)))",
        "POLYGON Z ((0 0 7, 4 0 7, 4 4 7, 0 4 7, 0 0 7))",
    ],
)
def test_round_trip_identity(text):
    g = parse_wkt(text)
    again = parse_wkt(to_wkt(g))
    assert again == g
    assert to_wkt(again) == to_wkt(g)


def test_number_formatting_drops_trailing_zeros():
    g = parse_wkt("POINT (1.50 2.0)")
    assert to_wkt(g) == "POINT (1.5 2)"


def test_syntax_error_reports_position():
    text = "POLYGON ((0 0, 1 x, 1 1, 0 0))"
    with pytest.raises(WktParseError) as exc:
        parse_wkt(text)
    assert exc.value.position == text.index("x")


def test_unclosed_ring_rejected():
    with pytest.raises(WktParseError, match="unclosed ring"):
        parse_wkt("POLYGON ((0 0, 1 0, 1 1, 0 1))")


def test_short_ring_rejected():
    with pytest.raises(WktParseError, match="at least 4"):
        parse_wkt("POLYGON ((0 0, 1 0, 0 0))")


def test_unsupported_type():
    with pytest.raises(WktParseError, match="unsupported WKT type"):
        parse_wkt("CIRCULARSTRING (0 0, 1 1, 2 0)")


def test_trailing_garbage():
    with pytest.raises(WktParseError, match="trailing"):
        parse_wkt("POINT (1 2) POINT (3 4)")


def test_polyhedral_requires_z():
    with pytest.raises(WktParseError, match="Z"):
        parse_wkt("POLYHEDRALSURFACE (((0 0, 1 0, 1 1, 0 0)))")
