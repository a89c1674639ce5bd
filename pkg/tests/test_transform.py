"""UTM forward/inverse transforms."""

import random

import pytest

from _oracles import snyder_to_utm
from citykg.geometry import (
    CRS,
    CrsError,
    WGS84,
    Point,
    parse_wkt,
    to_utm,
    to_wgs84,
    transform,
    utm,
    utm_zone_for,
)

# lon, lat, frozen easting/northing computed with the Snyder oracle before
# the build (independent series; agreement requirement is <= 1 cm)
MUNICH = (11.5755, 48.1374, 691603.032, 5334780.031)


def test_central_meridian_false_easting():
    e, n = to_utm(9.0, 0.0, 32)
    assert e == pytest.approx(500000.0, abs=1e-6)
    assert n == pytest.approx(0.0, abs=1e-6)


def test_munich_against_frozen_oracle_value():
    lon, lat, east, north = MUNICH
    e, n = to_utm(lon, lat, 32)
    assert e == pytest.approx(east, abs=0.01)
    assert n == pytest.approx(north, abs=0.01)


@pytest.mark.parametrize(
    "lon,lat",
    [(11.5755, 48.1374), (8.1, 47.0), (10.2, 60.5), (9.7, -33.2), (6.5, 52.0)],
)
def test_agrees_with_snyder_series(lon, lat):
    e1, n1 = to_utm(lon, lat, 32)
    e2, n2 = snyder_to_utm(lon, lat, 32)
    assert abs(e1 - e2) <= 0.01
    assert abs(n1 - n2) <= 0.01


def test_round_trip_error_below_microdegree():
    rng = random.Random(5)
    for _ in range(500):
        lon = rng.uniform(5.0, 13.0)
        lat = rng.uniform(-80.0, 80.0)
        e, n = to_utm(lon, lat, 32)
        lon2, lat2 = to_wgs84(e, n, 32)
        assert abs(lon - lon2) <= 1e-6
        assert abs(lat - lat2) <= 1e-6


def test_southern_hemisphere_false_northing():
    e, n = to_utm(27.0, -25.7, 35, south=True)
    assert n > 0
    lon, lat = to_wgs84(e, n, 35, south=True)
    assert lat == pytest.approx(-25.7, abs=1e-9)
    assert lon == pytest.approx(27.0, abs=1e-9)


def test_latitude_guard():
    with pytest.raises(CrsError):
        to_utm(10.0, 86.0, 32)


def test_zone_selection():
    assert utm_zone_for(11.5, 48.0) == CRS("utm", 32, False)
    assert utm_zone_for(5.9, 48.0).zone == 31
    assert utm_zone_for(11.5, -10.0).south is True


def test_geometry_transform_round_trip():
    g = parse_wkt("POLYGON Z ((691000 5334000 520, 691030 5334000 520, 691030 5334030 520, 691000 5334030 520, 691000 5334000 520))", utm(32))
    back = transform(transform(g, WGS84), utm(32))
    for c1, c2 in zip(g.exterior.coords, back.exterior.coords):
        assert c1[0] == pytest.approx(c2[0], abs=1e-6)
        assert c1[1] == pytest.approx(c2[1], abs=1e-6)
        assert c1[2] == c2[2]  # z passes through untouched


def test_point_transform_keeps_crs_fields():
    p = Point(11.5755, 48.1374, 12.0, WGS84)
    q = transform(p, utm(32))
    assert q.crs == utm(32)
    assert q.z == 12.0
    assert q.x == pytest.approx(MUNICH[2], abs=0.01)
