# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Hot numeric kernels for the 2D geometry engine.

Written in Cython "pure Python" mode: the file runs unmodified on CPython
and compiles to a C extension when built via setup.py.  ``COMPILED`` tells
which variant is active; callers never need to care.

Coordinate convention: a *ring* is a closed flat coordinate buffer
``[x0, y0, x1, y1, ..., x0, y0]`` (first point repeated at the end),
passed as ``array('d')`` so the compiled variant gets a typed memoryview.
"""

try:
    import cython
except ImportError:  # Cython absent at runtime: run as plain Python
    from citykg.geometry import _nocython as cython

COMPILED = bool(cython.compiled)

OP_INTERSECTION = 0
OP_UNION = 1

# parameter-space window around segment endpoints treated as degenerate
_EPS_T = 1e-10
# relative tolerance under which two edge directions count as parallel
_EPS_PAR = 1e-12


class DegenerateGeometry(Exception):
    """Clipping hit a non-generic configuration (vertex on edge, coincident
    vertices, collinear overlap).  Callers retry with perturbed input."""


def ring_area_signed(ring: cython.double[:]) -> float:
    """Shoelace signed area; positive for counter-clockwise rings."""
    n: cython.Py_ssize_t = len(ring) // 2
    s: cython.double = 0.0
    i: cython.Py_ssize_t
    for i in range(n - 1):
        s += ring[2 * i] * ring[2 * i + 3] - ring[2 * i + 2] * ring[2 * i + 1]
    return 0.5 * s


def ring_bbox(ring: cython.double[:]):
    """(minx, miny, maxx, maxy) of a ring."""
    n: cython.Py_ssize_t = len(ring) // 2
    minx: cython.double = ring[0]
    maxx: cython.double = ring[0]
    miny: cython.double = ring[1]
    maxy: cython.double = ring[1]
    i: cython.Py_ssize_t
    for i in range(1, n):
        x: cython.double = ring[2 * i]
        y: cython.double = ring[2 * i + 1]
        if x < minx:
            minx = x
        elif x > maxx:
            maxx = x
        if y < miny:
            miny = y
        elif y > maxy:
            maxy = y
    return (minx, miny, maxx, maxy)


def point_in_ring(px: cython.double, py: cython.double, ring: cython.double[:]) -> bool:
    """Even-odd ray cast.  Points on the boundary are not reliably
    classified; combine with point_on_ring where that matters."""
    n: cython.Py_ssize_t = len(ring) // 2
    inside: cython.bint = False
    i: cython.Py_ssize_t
    for i in range(n - 1):
        y1: cython.double = ring[2 * i + 1]
        y2: cython.double = ring[2 * i + 3]
        if (y1 > py) != (y2 > py):
            x1: cython.double = ring[2 * i]
            x2: cython.double = ring[2 * i + 2]
            xint: cython.double = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xint:
                inside = not inside
    return inside


@cython.cfunc
def _pt_seg_dist2(px: cython.double, py: cython.double,
                  ax: cython.double, ay: cython.double,
                  bx: cython.double, by: cython.double) -> cython.double:
    dx: cython.double = bx - ax
    dy: cython.double = by - ay
    l2: cython.double = dx * dx + dy * dy
    t: cython.double
    if l2 <= 0.0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    ex: cython.double = px - (ax + t * dx)
    ey: cython.double = py - (ay + t * dy)
    return ex * ex + ey * ey


@cython.cfunc
def _seg_seg_dist2(ax: cython.double, ay: cython.double,
                   bx: cython.double, by: cython.double,
                   cx: cython.double, cy: cython.double,
                   dx: cython.double, dy: cython.double) -> cython.double:
    d1: cython.double = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
    d2: cython.double = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
    d3: cython.double = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    d4: cython.double = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
    if ((d1 > 0.0 and d2 < 0.0) or (d1 < 0.0 and d2 > 0.0)) and \
       ((d3 > 0.0 and d4 < 0.0) or (d3 < 0.0 and d4 > 0.0)):
        return 0.0
    best: cython.double = _pt_seg_dist2(ax, ay, cx, cy, dx, dy)
    m: cython.double = _pt_seg_dist2(bx, by, cx, cy, dx, dy)
    if m < best:
        best = m
    m = _pt_seg_dist2(cx, cy, ax, ay, bx, by)
    if m < best:
        best = m
    m = _pt_seg_dist2(dx, dy, ax, ay, bx, by)
    if m < best:
        best = m
    return best


def point_on_ring(px: cython.double, py: cython.double,
                  ring: cython.double[:], tol: cython.double) -> bool:
    """True when the point lies within ``tol`` of the ring boundary."""
    n: cython.Py_ssize_t = len(ring) // 2
    tol2: cython.double = tol * tol
    i: cython.Py_ssize_t
    for i in range(n - 1):
        if _pt_seg_dist2(px, py, ring[2 * i], ring[2 * i + 1],
                         ring[2 * i + 2], ring[2 * i + 3]) <= tol2:
            return True
    return False


def rings_min_distance(r1: cython.double[:], r2: cython.double[:]) -> float:
    """Minimum distance between two ring boundaries (0 when they cross)."""
    n1: cython.Py_ssize_t = len(r1) // 2
    n2: cython.Py_ssize_t = len(r2) // 2
    best: cython.double = -1.0
    i: cython.Py_ssize_t
    j: cython.Py_ssize_t
    for i in range(n1 - 1):
        ax: cython.double = r1[2 * i]
        ay: cython.double = r1[2 * i + 1]
        bx: cython.double = r1[2 * i + 2]
        by: cython.double = r1[2 * i + 3]
        for j in range(n2 - 1):
            d: cython.double = _seg_seg_dist2(ax, ay, bx, by,
                                              r2[2 * j], r2[2 * j + 1],
                                              r2[2 * j + 2], r2[2 * j + 3])
            if best < 0.0 or d < best:
                best = d
                if best == 0.0:
                    return 0.0
    return best ** 0.5


def segment_point_distance(px: cython.double, py: cython.double,
                           ax: cython.double, ay: cython.double,
                           bx: cython.double, by: cython.double) -> float:
    return _pt_seg_dist2(px, py, ax, ay, bx, by) ** 0.5


def clip_rings(subj: cython.double[:], clip: cython.double[:], op: cython.Py_ssize_t):
    """Greiner-Hormann boolean of two simple closed rings.

    ``op`` is OP_INTERSECTION or OP_UNION.  Returns a list of closed
    ``[x, y, ...]`` result rings, or None when the boundaries do not cross
    (the caller resolves containment/disjointness).  Raises
    DegenerateGeometry instead of guessing on non-generic input.
    """
    ns: cython.Py_ssize_t = len(subj) // 2 - 1
    nc: cython.Py_ssize_t = len(clip) // 2 - 1
    if ns < 3 or nc < 3:
        raise ValueError("ring needs at least 3 distinct vertices")

    # node table; originals first (subject 0..ns-1, clip ns..ns+nc-1)
    nodes_x = [0.0] * (ns + nc)
    nodes_y = [0.0] * (ns + nc)
    i: cython.Py_ssize_t
    for i in range(ns):
        nodes_x[i] = subj[2 * i]
        nodes_y[i] = subj[2 * i + 1]
    for i in range(nc):
        nodes_x[ns + i] = clip[2 * i]
        nodes_y[ns + i] = clip[2 * i + 1]

    subj_hits = [None] * ns  # per subject edge: list of (alpha, node)
    clip_hits = [None] * nc

    # phase 1: locate all boundary crossings
    n_inter: cython.Py_ssize_t = 0
    j: cython.Py_ssize_t
    for i in range(ns):
        ax: cython.double = subj[2 * i]
        ay: cython.double = subj[2 * i + 1]
        bx: cython.double = subj[2 * i + 2]
        by: cython.double = subj[2 * i + 3]
        rx: cython.double = bx - ax
        ry: cython.double = by - ay
        rlen: cython.double = (rx * rx + ry * ry) ** 0.5
        for j in range(nc):
            cx: cython.double = clip[2 * j]
            cy: cython.double = clip[2 * j + 1]
            dx: cython.double = clip[2 * j + 2]
            dy: cython.double = clip[2 * j + 3]
            sx: cython.double = dx - cx
            sy: cython.double = dy - cy
            den: cython.double = rx * sy - ry * sx
            slen: cython.double = (sx * sx + sy * sy) ** 0.5
            if den < 0.0:
                aden: cython.double = -den
            else:
                aden = den
            if aden <= _EPS_PAR * rlen * slen:
                # parallel: only collinear overlap is a (degenerate) contact
                if _seg_seg_dist2(ax, ay, bx, by, cx, cy, dx, dy) <= \
                        (_EPS_T * (rlen + slen)) ** 2:
                    raise DegenerateGeometry("collinear edge overlap")
                continue
            qx: cython.double = cx - ax
            qy: cython.double = cy - ay
            t: cython.double = (qx * sy - qy * sx) / den
            u: cython.double = (qx * ry - qy * rx) / den
            if t < -_EPS_T or t > 1.0 + _EPS_T or u < -_EPS_T or u > 1.0 + _EPS_T:
                continue
            if t < _EPS_T or t > 1.0 - _EPS_T or u < _EPS_T or u > 1.0 - _EPS_T:
                raise DegenerateGeometry("crossing at a vertex")
            px: cython.double = ax + t * rx
            py: cython.double = ay + t * ry
            sn = len(nodes_x)
            nodes_x.append(px)
            nodes_y.append(py)
            nodes_x.append(px)
            nodes_y.append(py)
            if subj_hits[i] is None:
                subj_hits[i] = []
            subj_hits[i].append((t, sn))
            if clip_hits[j] is None:
                clip_hits[j] = []
            clip_hits[j].append((u, sn + 1))
            n_inter += 1

    if n_inter == 0:
        return None
    if n_inter % 2 != 0:
        raise DegenerateGeometry("odd crossing count")

    total = len(nodes_x)
    nxt = [0] * total
    prv = [0] * total
    neigh = [-1] * total
    entry = [False] * total
    inter = [False] * total
    visited = [False] * total

    for i in range(n_inter):
        a = ns + nc + 2 * i
        neigh[a] = a + 1
        neigh[a + 1] = a
        inter[a] = True
        inter[a + 1] = True

    # phase 1b: link each ring's chain, intersections sorted by alpha
    def _link(base, count, hits):
        order = []
        for k in range(count):
            order.append(base + k)
            hk = hits[k]
            if hk is not None:
                hk.sort()
                for m in range(len(hk) - 1):
                    if hk[m + 1][0] - hk[m][0] < 1e-12:
                        raise DegenerateGeometry("coincident crossings on edge")
                for _, node in hk:
                    order.append(node)
        n = len(order)
        for m in range(n):
            after = m + 1 if m + 1 < n else 0
            before = m - 1 if m > 0 else n - 1
            nxt[order[m]] = order[after]
            prv[order[m]] = order[before]

    _link(0, ns, subj_hits)
    _link(ns, nc, clip_hits)

    # phase 2: alternate entry/exit flags along each chain.
    # direction table (Greiner-Hormann): intersection f/f, union b/b.
    base_flag: cython.bint = op == OP_INTERSECTION
    flag: cython.bint = base_flag != point_in_ring(subj[0], subj[1], clip)
    cur = nxt[0]
    while cur != 0:
        if inter[cur]:
            entry[cur] = flag
            flag = not flag
        cur = nxt[cur]
    flag = base_flag != point_in_ring(clip[0], clip[1], subj)
    cur = nxt[ns]
    while cur != ns:
        if inter[cur]:
            entry[cur] = flag
            flag = not flag
        cur = nxt[cur]

    # phase 3: trace result rings
    results = []
    limit = 4 * total + 8
    for start in range(ns + nc, total):
        if visited[start] or not inter[start]:
            continue
        ring = [nodes_x[start], nodes_y[start]]
        cur = start
        steps = 0
        while True:
            visited[cur] = True
            visited[neigh[cur]] = True
            if entry[cur]:
                while True:
                    cur = nxt[cur]
                    ring.append(nodes_x[cur])
                    ring.append(nodes_y[cur])
                    steps += 1
                    if steps > limit:
                        raise DegenerateGeometry("tracing did not close")
                    if inter[cur]:
                        break
            else:
                while True:
                    cur = prv[cur]
                    ring.append(nodes_x[cur])
                    ring.append(nodes_y[cur])
                    steps += 1
                    if steps > limit:
                        raise DegenerateGeometry("tracing did not close")
                    if inter[cur]:
                        break
            cur = neigh[cur]
            if visited[cur]:
                break
        # drop the duplicated jump-off vertex, then close the ring
        m = len(ring)
        if ring[m - 2] == ring[0] and ring[m - 1] == ring[1]:
            ring.pop()
            ring.pop()
        ring.append(ring[0])
        ring.append(ring[1])
        if len(ring) >= 8:
            results.append(ring)

    for i in range(ns + nc, total):
        if not visited[i]:
            raise DegenerateGeometry("untraced crossing left over")
    return results
