"""Bulk-loaded R-tree over 2D bounding boxes.

Sort-Tile-Recursive packing; the tree is immutable once built, so
concurrent queries need no locking.  Queries return every stored id whose
box intersects the probe box (supersets are fine, false negatives are not).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

BBox = tuple[float, float, float, float]  # minx, miny, maxx, maxy

_NODE_CAPACITY = 16


def bbox_intersects(a: BBox, b: BBox) -> bool:
    return not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1])


def _merge(boxes: list[BBox]) -> BBox:
    return (
        min(b[0] for b in boxes),
        min(b[1] for b in boxes),
        max(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


@dataclass(frozen=True)
class _Node:
    bbox: BBox
    children: tuple  # of _Node, or of (id, bbox) entries at leaves
    leaf: bool


class SpatialIndex:
    """Query-only R-tree; build once with index_build."""

    def __init__(self, root: _Node | None):
        self._root = root

    def query(self, bbox: BBox) -> list:
        """ids of all entries whose stored bbox intersects ``bbox``."""
        if self._root is None:
            return []
        out: list = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            if not bbox_intersects(node.bbox, bbox):
                continue
            if node.leaf:
                for item_id, item_box in node.children:
                    if bbox_intersects(item_box, bbox):
                        out.append(item_id)
            else:
                stack.extend(node.children)
        return out

    def __len__(self) -> int:
        if self._root is None:
            return 0
        total = 0
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.leaf:
                total += len(node.children)
            else:
                stack.extend(node.children)
        return total


def _pack_level(entries: list[tuple], key_boxes: list[BBox]) -> list[list]:
    """STR tiling: sort by x-center, slice, sort slices by y-center, chunk."""
    n = len(entries)
    leaf_count = math.ceil(n / _NODE_CAPACITY)
    slice_count = math.ceil(math.sqrt(leaf_count))
    per_slice = slice_count * _NODE_CAPACITY

    order = sorted(range(n), key=lambda i: key_boxes[i][0] + key_boxes[i][2])
    groups: list[list] = []
    for s in range(0, n, per_slice):
        chunk = order[s:s + per_slice]
        chunk.sort(key=lambda i: key_boxes[i][1] + key_boxes[i][3])
        for t in range(0, len(chunk), _NODE_CAPACITY):
            groups.append([entries[i] for i in chunk[t:t + _NODE_CAPACITY]])
    return groups


def index_build(items: list[tuple[object, BBox]]) -> SpatialIndex:
    """Build an index from (id, bbox) pairs."""
    for _, box in items:
        if not all(math.isfinite(v) for v in box):
            raise ValueError(f"non-finite bbox: {box}")
    if not items:
        return SpatialIndex(None)

    groups = _pack_level(list(items), [box for _, box in items])
    nodes = [_Node(_merge([b for _, b in g]), tuple(g), leaf=True) for g in groups]
    while len(nodes) > 1:
        groups = _pack_level(nodes, [nd.bbox for nd in nodes])
        nodes = [_Node(_merge([nd.bbox for nd in g]), tuple(g), leaf=False) for g in groups]
    return SpatialIndex(nodes[0])
