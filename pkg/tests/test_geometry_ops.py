"""Areas, overlap, containment, distance and buffering."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import (
    brute_boundary_distance,
    mc_intersection_area,
    mc_polygon_area,
    random_convex,
    random_star,
)
from citykg.geometry import (
    CrsError,
    GeometryError,
    LineString,
    Point,
    buffer,
    intersection_area,
    parse_wkt,
    point_in_polygon,
    polygon,
    polygon_area,
    polygon_distance,
    rect,
    sf_intersects,
    utm,
)

UTM32 = utm(32)


def star(seed: int, cx=0.0, cy=0.0, scale=10.0):
    return random_star(random.Random(seed), cx, cy, scale, UTM32)


# ---------------------------------------------------------------------------
# polygon_area


def test_square_area():
    assert polygon_area(rect(0, 0, 4, 4, crs=UTM32)) == 16.0


def test_hole_subtracted():
    g = polygon(
        [(0, 0), (4, 0), (4, 4), (0, 4), (0, 0)],
        holes=[[(1.5, 1.5), (2.5, 1.5), (2.5, 2.5), (1.5, 2.5), (1.5, 1.5)]],
        crs=UTM32,
    )
    assert polygon_area(g) == 15.0


def test_geographic_area_rejected():
    with pytest.raises(CrsError):
        polygon_area(rect(0, 0, 1, 1))


@pytest.mark.parametrize("seed", range(8))
def test_area_matches_monte_carlo(seed):
    g = star(seed)
    est = mc_polygon_area(g, samples=100_000, seed=seed)
    assert polygon_area(g) == pytest.approx(est, rel=0.01)


# ---------------------------------------------------------------------------
# intersection_area


def test_identical_unit_squares():
    a = rect(0, 0, 1, 1, crs=UTM32)
    assert intersection_area(a, rect(0, 0, 1, 1, crs=UTM32)) == 1.0


def test_axis_aligned_overlap():
    a = rect(0, 0, 2, 2, crs=UTM32)
    b = rect(1, 1, 3, 3, crs=UTM32)
    assert intersection_area(a, b) == pytest.approx(1.0, abs=1e-12)


def test_containment_gives_smaller_area():
    a = rect(0, 0, 10, 10, crs=UTM32)
    b = rect(2, 2, 5, 5, crs=UTM32)
    assert intersection_area(a, b) == polygon_area(b)


def test_disjoint_zero():
    assert intersection_area(rect(0, 0, 1, 1, crs=UTM32), rect(5, 5, 6, 6, crs=UTM32)) == 0.0


def test_crs_mismatch_rejected():
    with pytest.raises(CrsError):
        intersection_area(rect(0, 0, 1, 1, crs=UTM32), rect(0, 0, 1, 1, crs=utm(33)))


@pytest.mark.parametrize("seed", range(12))
def test_intersection_matches_monte_carlo(seed):
    rng = random.Random(100 + seed)
    a = random_convex(rng, 0, 0, 8.0, UTM32) if seed % 2 else star(200 + seed)
    b = random_star(rng, rng.uniform(-4, 4), rng.uniform(-4, 4), 8.0, UTM32)
    got = intersection_area(a, b)
    est = mc_intersection_area(a, b, samples=100_000, seed=seed)
    if est > 1e-2:
        assert got == pytest.approx(est, rel=0.01)
    else:
        assert got == pytest.approx(est, abs=0.05)


def test_intersection_with_holes_matches_monte_carlo():
    a = polygon(
        [(0, 0), (10, 0), (10, 10), (0, 10), (0, 0)],
        holes=[[(2, 2), (5, 2), (5, 5), (2, 5), (2, 2)]],
        crs=UTM32,
    )
    b = rect(1, 1, 7, 7, crs=UTM32)
    got = intersection_area(a, b)
    assert got == pytest.approx(36.0 - 9.0, abs=1e-9)
    est = mc_intersection_area(a, b, samples=200_000, seed=42)
    assert got == pytest.approx(est, rel=0.01)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_intersection_invariants(seed):
    rng = random.Random(seed)
    a = random_star(rng, rng.uniform(-3, 3), rng.uniform(-3, 3), 8.0, UTM32)
    b = random_star(rng, rng.uniform(-3, 3), rng.uniform(-3, 3), 8.0, UTM32)
    ab = intersection_area(a, b)
    ba = intersection_area(b, a)
    assert ab == pytest.approx(ba, rel=1e-9, abs=1e-9)
    assert ab <= min(polygon_area(a), polygon_area(b)) + 1e-9


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_self_intersection_is_area(seed):
    g = star(seed)
    assert intersection_area(g, g) == pytest.approx(polygon_area(g), rel=1e-9)


# ---------------------------------------------------------------------------
# point_in_polygon


def test_point_inside_unit_square():
    assert point_in_polygon(Point(0.5, 0.5, crs=UTM32), rect(0, 0, 1, 1, crs=UTM32))


def test_point_outside_unit_square():
    assert not point_in_polygon(Point(2, 2, crs=UTM32), rect(0, 0, 1, 1, crs=UTM32))


def test_point_in_hole_is_outside():
    g = polygon(
        [(0, 0), (4, 0), (4, 4), (0, 4), (0, 0)],
        holes=[[(1, 1), (3, 1), (3, 3), (1, 3), (1, 1)]],
        crs=UTM32,
    )
    assert not point_in_polygon(Point(2, 2, crs=UTM32), g)
    assert point_in_polygon(Point(0.5, 0.5, crs=UTM32), g)


def test_boundary_point_counts_inside():
    g = rect(0, 0, 1, 1, crs=UTM32)
    assert point_in_polygon(Point(0, 0.5, crs=UTM32), g)
    assert point_in_polygon(Point(1, 1, crs=UTM32), g)
    # hole boundary is polygon boundary
    holed = polygon(
        [(0, 0), (4, 0), (4, 4), (0, 4), (0, 0)],
        holes=[[(1, 1), (3, 1), (3, 3), (1, 3), (1, 1)]],
        crs=UTM32,
    )
    assert point_in_polygon(Point(1, 2, crs=UTM32), holed)


# ---------------------------------------------------------------------------
# sf_intersects


def test_touching_squares_intersect():
    assert sf_intersects(rect(0, 0, 1, 1, crs=UTM32), rect(1, 0, 2, 1, crs=UTM32))


def test_nested_polygons_intersect():
    assert sf_intersects(rect(0, 0, 10, 10, crs=UTM32), rect(4, 4, 5, 5, crs=UTM32))


def test_separated_squares_do_not_intersect():
    assert not sf_intersects(rect(0, 0, 1, 1, crs=UTM32), rect(2, 0, 3, 1, crs=UTM32))


def test_linestring_polygon_intersections():
    g = rect(0, 0, 10, 10, crs=UTM32)
    crossing = LineString(((-5.0, 5.0), (15.0, 5.0)), crs=UTM32)
    inside = LineString(((2.0, 2.0), (3.0, 3.0)), crs=UTM32)
    outside = LineString(((20.0, 20.0), (30.0, 20.0)), crs=UTM32)
    assert sf_intersects(crossing, g)
    assert sf_intersects(g, inside)
    assert not sf_intersects(outside, g)


def test_polyhedral_uses_footprint():
    roof = parse_wkt(
        "POLYHEDRALSURFACE Z (((0 0 10, 4 0 10, 4 4 12, 0 4 12, 0 0 10)))", UTM32
    )
    assert sf_intersects(roof, rect(3, 3, 6, 6, crs=UTM32))
    assert not sf_intersects(roof, rect(5, 5, 8, 8, crs=UTM32))


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_sf_intersects_agrees_with_area_and_distance(seed):
    rng = random.Random(seed)
    a = random_star(rng, rng.uniform(-6, 6), rng.uniform(-6, 6), 6.0, UTM32)
    b = random_star(rng, rng.uniform(-6, 6), rng.uniform(-6, 6), 6.0, UTM32)
    touching = sf_intersects(a, b)
    area = intersection_area(a, b)
    dist = brute_boundary_distance(a, b)
    if area > 1e-6:
        assert touching
    if touching:
        # overlapping interiors or touching boundaries
        assert area > 0 or dist < 1e-6 or point_in_polygon(
            Point(a.exterior.coords[0][0], a.exterior.coords[0][1], crs=UTM32), b
        ) or point_in_polygon(
            Point(b.exterior.coords[0][0], b.exterior.coords[0][1], crs=UTM32), a
        )
    else:
        assert dist > 0


# ---------------------------------------------------------------------------
# polygon_distance


def test_overlapping_distance_zero():
    assert polygon_distance(rect(0, 0, 2, 2, crs=UTM32), rect(1, 1, 3, 3, crs=UTM32)) == 0.0


def test_gap_distance():
    a = rect(0, 0, 1, 1, crs=UTM32)
    b = rect(1.1, 0, 2.1, 1, crs=UTM32)
    assert polygon_distance(a, b) == pytest.approx(0.1, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_distance_matches_brute_force(seed):
    rng = random.Random(300 + seed)
    a = random_star(rng, -12, 0, 6.0, UTM32)
    b = random_star(rng, 12, 0, 6.0, UTM32)
    assert polygon_distance(a, b) == pytest.approx(brute_boundary_distance(a, b), abs=1e-9)


# ---------------------------------------------------------------------------
# buffer


def test_capsule_area_within_one_percent():
    line = LineString(((0.0, 0.0), (10.0, 0.0)), crs=UTM32)
    got = polygon_area(buffer(line, 20.0, 32))
    exact = 10 * 40 + math.pi * 400
    assert got == pytest.approx(exact, rel=0.01)


def test_zero_length_line_degenerates_to_disc():
    line = LineString(((5.0, 5.0), (5.0, 5.0)), crs=UTM32)
    got = polygon_area(buffer(line, 3.0, 64))
    assert got == pytest.approx(math.pi * 9, rel=0.01)


def test_polygon_buffer_contains_original():
    g = star(17, scale=20.0)
    buffered = buffer(g, 2.5, 32)
    for c in g.exterior.coords:
        assert point_in_polygon(Point(c[0], c[1], crs=UTM32), buffered)


def test_buffer_monotone_in_radius_and_segments():
    line = LineString(((0.0, 0.0), (30.0, 10.0), (60.0, 0.0)), crs=UTM32)
    areas_r = [polygon_area(buffer(line, r, 32)) for r in (1.0, 2.0, 5.0, 10.0)]
    assert areas_r == sorted(areas_r)
    areas_s = [polygon_area(buffer(line, 5.0, s)) for s in (8, 16, 32, 64)]
    assert areas_s == sorted(areas_s)


def test_buffer_not_below_any_single_capsule():
    line = LineString(((0.0, 0.0), (30.0, 10.0), (60.0, 0.0)), crs=UTM32)
    whole = polygon_area(buffer(line, 5.0, 32))
    for p, q in zip(line.coords, line.coords[1:]):
        single = polygon_area(buffer(LineString((p, q), crs=UTM32), 5.0, 32))
        assert whole >= single - 1e-9


def test_buffer_rejects_bad_arguments():
    line = LineString(((0.0, 0.0), (1.0, 0.0)), crs=UTM32)
    with pytest.raises(GeometryError):
        buffer(line, -1.0)
    with pytest.raises(GeometryError):
        buffer(line, 1.0, arc_segments=4)
    with pytest.raises(CrsError):
        buffer(LineString(((0.0, 0.0), (1.0, 0.0))), 1.0)
