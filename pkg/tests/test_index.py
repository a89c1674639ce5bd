"""Spatial index: no false negatives against a linear-scan oracle."""

import random

import pytest

from citykg.geometry import index_build
from citykg.geometry.index import bbox_intersects


def random_box(rng, span=1000.0, max_side=50.0):
    x = rng.uniform(0, span)
    y = rng.uniform(0, span)
    return (x, y, x + rng.uniform(0.1, max_side), y + rng.uniform(0.1, max_side))


def test_empty_index():
    idx = index_build([])
    assert idx.query((0, 0, 100, 100)) == []
    assert len(idx) == 0


def test_single_item_probe_its_own_bbox():
    idx = index_build([("a", (10, 10, 20, 20))])
    assert idx.query((10, 10, 20, 20)) == ["a"]
    assert idx.query((21, 21, 30, 30)) == []


def test_touching_boxes_count_as_intersecting():
    idx = index_build([(1, (0, 0, 10, 10))])
    assert idx.query((10, 10, 20, 20)) == [1]


@pytest.mark.parametrize("seed", range(5))
def test_thousand_random_boxes_match_linear_scan(seed):
    rng = random.Random(seed)
    items = [(i, random_box(rng)) for i in range(1000)]
    idx = index_build(items)
    assert len(idx) == 1000
    for _ in range(50):
        probe = random_box(rng, max_side=200.0)
        expected = sorted(i for i, b in items if bbox_intersects(b, probe))
        assert sorted(idx.query(probe)) == expected


def test_non_finite_bbox_rejected():
    with pytest.raises(ValueError):
        index_build([(1, (0.0, 0.0, float("inf"), 1.0))])
