"""Three-step CityGML <-> OSM entity linking.

Step 1 matches CityGML ground surfaces against OSM building footprints on
the overlap ratio  area(osm ^ bldg) / min(area(osm), area(bldg)) >= t  and
classifies the bipartite match graph's connected components as 1:1, 1:n,
m:1 or m:n.  Step 2 links still-unmatched surfaces that sit within
epsilon of a matched neighbor to that neighbor's OSM partner (adjacent
relation).  Step 3 maps POI points into CityGML surfaces using the OSM
footprint that contains them as a mediator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from citykg.geometry import (
    MultiPolygon,
    Point,
    Polygon,
    bbox_of,
    drop_z,
    index_build,
    intersection_area,
    point_in_polygon,
    polygon_area,
    polygon_distance,
)
from citykg.store import (
    KIND_ADJACENT,
    KIND_MATCH,
    KIND_POI,
    REL_M_TO_N,
    REL_M_TO_ONE,
    REL_ONE_TO_N,
    REL_ONE_TO_ONE,
    CityStore,
    LinkageRecord,
)

OsmKey = tuple[str, int]  # (osm_type, osm_id)


@dataclass(frozen=True)
class MatchParams:
    threshold: float = 0.5
    epsilon_adjacent: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.epsilon_adjacent < 0.0:
            raise ValueError(f"epsilon_adjacent must be >= 0, got {self.epsilon_adjacent}")


@dataclass
class MatchGraph:
    """Bipartite ratio-match edges between ground surfaces and footprints."""

    edges: dict[tuple[int, OsmKey], float] = field(default_factory=dict)

    def add(self, surface_id: int, osm: OsmKey, ratio: float) -> None:
        self.edges[(surface_id, osm)] = ratio

    def matched_surfaces(self) -> set[int]:
        return {s for s, _ in self.edges}

    def matched_osm(self) -> set[OsmKey]:
        return {o for _, o in self.edges}

    def osm_partners(self, surface_id: int) -> list[OsmKey]:
        return sorted(o for s, o in self.edges if s == surface_id)

    def surface_partners(self, osm: OsmKey) -> list[int]:
        return sorted(s for s, o in self.edges if o == osm)


@dataclass
class LinkReport:
    ground_surfaces: int = 0
    osm_footprints: int = 0
    excluded_zero_area: int = 0
    components: dict = field(default_factory=dict)      # class -> component count
    surfaces_by_class: dict = field(default_factory=dict)  # class -> surface count
    unmatched_step1: int = 0
    adjacent_surfaces: int = 0
    unmatched_final: int = 0
    osm_only: int = 0
    poi_matched: int = 0
    poi_records: int = 0

    def percentages(self) -> dict[str, float]:
        """Step-1 distribution over ground surfaces; sums to 100."""
        total = self.ground_surfaces
        if total == 0:
            return {}
        out = {}
        for cls in (REL_ONE_TO_ONE, REL_ONE_TO_N, REL_M_TO_ONE, REL_M_TO_N):
            out[cls] = 100.0 * self.surfaces_by_class.get(cls, 0) / total
        out["0:1"] = 100.0 * self.unmatched_step1 / total
        return out

    def lines(self) -> list[str]:
        pct = self.percentages()
        out = [
            f"citygml ground surfaces: {self.ground_surfaces}",
            f"osm building footprints: {self.osm_footprints}",
        ]
        if self.excluded_zero_area:
            out.append(f"excluded zero-area polygons: {self.excluded_zero_area}")
        for cls in (REL_ONE_TO_ONE, REL_ONE_TO_N, REL_M_TO_ONE, REL_M_TO_N):
            out.append(
                f"{cls:>4}: {self.components.get(cls, 0)} components, "
                f"{self.surfaces_by_class.get(cls, 0)} surfaces ({pct.get(cls, 0.0):.2f}%)"
            )
        out.append(f" 0:1: {self.unmatched_step1} surfaces ({pct.get('0:1', 0.0):.2f}%) after step 1")
        out.append(f"adjacent: {self.adjacent_surfaces} surfaces (step 2)")
        out.append(f" 0:1: {self.unmatched_final} surfaces after step 2")
        if self.osm_footprints:
            share = 100.0 * self.osm_only / self.osm_footprints
            out.append(f" 1:0: {self.osm_only} footprints ({share:.2f}%)")
        else:
            out.append(f" 1:0: {self.osm_only} footprints")
        out.append(f"poi matched: {self.poi_matched} (records: {self.poi_records})")
        return out


def ground_surface_footprints(store: CityStore) -> list[tuple[int, Polygon | MultiPolygon]]:
    """(thematic surface id, 2D footprint) for every ground surface."""
    geoms = {g.id: g.geometry for g in store.table("surface_geometry")}
    out = []
    for ts in store.table("thematic_surface"):
        if ts.surface_kind != "GroundSurface":
            continue
        geom = geoms.get(ts.lod2_multi_surface_id)
        if geom is not None:
            out.append((ts.id, drop_z(geom)))
    return out


def osm_footprints(store: CityStore) -> list[tuple[OsmKey, Polygon | MultiPolygon]]:
    out = []
    for ent in store.table("osm_entity"):
        if ent.osm_type == "W" and "building" in ent.tags and \
                isinstance(ent.geometry, (Polygon, MultiPolygon)):
            out.append(((ent.osm_type, ent.osm_id), ent.geometry))
    return out


def step1_spatial_match(store: CityStore, params: MatchParams,
                        report: LinkReport | None = None) -> MatchGraph:
    """Overlap-ratio matching; index-pruned but identical to the exhaustive
    pairwise evaluation (bbox-disjoint pairs have ratio 0)."""
    report = report if report is not None else LinkReport()
    surfaces = []
    for sid, geom in ground_surface_footprints(store):
        area = polygon_area(geom)
        if area <= 1e-12:
            report.excluded_zero_area += 1
            continue
        surfaces.append((sid, geom, area))
    footprints = []
    for key, geom in osm_footprints(store):
        area = polygon_area(geom)
        if area <= 1e-12:
            report.excluded_zero_area += 1
            continue
        footprints.append((key, geom, area))
    report.ground_surfaces = len(surfaces)
    report.osm_footprints = len(footprints)

    graph = MatchGraph()
    if not surfaces or not footprints:
        return graph
    index = index_build([(i, bbox_of(g)) for i, (_, g, _) in enumerate(footprints)])
    for sid, geom, area in surfaces:
        for i in index.query(bbox_of(geom)):
            key, fgeom, farea = footprints[i]
            overlap = intersection_area(geom, fgeom)
            ratio = overlap / min(area, farea)
            if ratio >= params.threshold:
                graph.add(sid, key, ratio)
    return graph


def classify_relations(graph: MatchGraph) -> dict[tuple[int, OsmKey], str]:
    """Relation class per edge from the connected components of the
    bipartite match graph."""
    neighbors: dict = {}
    for sid, osm in graph.edges:
        neighbors.setdefault(("s", sid), []).append(("o", osm))
        neighbors.setdefault(("o", osm), []).append(("s", sid))

    component_of: dict = {}
    comp_members: dict[int, tuple[set, set]] = {}
    comp_id = 0
    for node in neighbors:
        if node in component_of:
            continue
        stack = [node]
        component_of[node] = comp_id
        surfaces: set = set()
        osms: set = set()
        while stack:
            cur = stack.pop()
            (surfaces if cur[0] == "s" else osms).add(cur[1])
            for nxt in neighbors[cur]:
                if nxt not in component_of:
                    component_of[nxt] = comp_id
                    stack.append(nxt)
        comp_members[comp_id] = (surfaces, osms)
        comp_id += 1

    labels = {}
    for edge in graph.edges:
        surfaces, osms = comp_members[component_of[("s", edge[0])]]
        if len(osms) == 1 and len(surfaces) == 1:
            labels[edge] = REL_ONE_TO_ONE
        elif len(osms) == 1:
            labels[edge] = REL_ONE_TO_N
        elif len(surfaces) == 1:
            labels[edge] = REL_M_TO_ONE
        else:
            labels[edge] = REL_M_TO_N
    return labels


def step2_adjacent(store: CityStore, graph: MatchGraph,
                   params: MatchParams) -> list[LinkageRecord]:
    """Adjacent links: unmatched surface next to a matched one inherits the
    neighbor's OSM partners.  Conditions: (a) the neighbor matches some OSM
    footprint, (b) boundary distance <= epsilon, (c) the surface itself has
    no match."""
    matched = graph.matched_surfaces()
    all_surfaces = dict(ground_surface_footprints(store))
    records = []
    eps = params.epsilon_adjacent
    matched_list = [(sid, all_surfaces[sid]) for sid in sorted(matched) if sid in all_surfaces]
    for sid in sorted(all_surfaces):
        if sid in matched:
            continue
        geom = all_surfaces[sid]
        partners: set[OsmKey] = set()
        for other_id, other_geom in matched_list:
            if polygon_distance(geom, other_geom) <= eps:
                partners.update(graph.osm_partners(other_id))
        for osm_type, osm_id in sorted(partners):
            records.append(LinkageRecord(sid, osm_type, osm_id, 0.0, KIND_ADJACENT, None))
    return records


def step3_poi_match(store: CityStore, graph: MatchGraph,
                    adjacent: list[LinkageRecord]) -> list[LinkageRecord]:
    """POIs inherit the links of the footprint that contains them; both
    matched and adjacent-linked surfaces qualify."""
    linked: dict[OsmKey, set[int]] = {}
    for (sid, osm) in graph.edges:
        linked.setdefault(osm, set()).add(sid)
    for rec in adjacent:
        linked.setdefault((rec.osm_type, rec.osm_id), set()).add(rec.citygml_surface_id)

    footprints = [(key, geom) for key, geom in osm_footprints(store) if key in linked]
    records = []
    for ent in store.table("osm_entity"):
        if ent.osm_type != "N" or not isinstance(ent.geometry, Point):
            continue
        targets: set[int] = set()
        for key, geom in footprints:
            if point_in_polygon(ent.geometry, geom):
                targets.update(linked[key])
        for sid in sorted(targets):
            records.append(LinkageRecord(sid, "N", ent.osm_id, 1.0, KIND_POI, None))
    return records


def link_all(store: CityStore, params: MatchParams | None = None) -> LinkReport:
    """Run all three steps, persist the linkage records, return the report."""
    params = params or MatchParams()
    report = LinkReport()
    graph = step1_spatial_match(store, params, report)
    labels = classify_relations(graph)

    comp_counts, surf_counts = _component_stats(graph)
    report.components = comp_counts
    report.surfaces_by_class = surf_counts
    report.unmatched_step1 = report.ground_surfaces - len(graph.matched_surfaces())

    for (sid, (osm_type, osm_id)), ratio in sorted(graph.edges.items(),
                                                   key=lambda kv: (kv[0][0], kv[0][1])):
        store.insert_linkage(LinkageRecord(sid, osm_type, osm_id, ratio,
                                           KIND_MATCH, labels[(sid, (osm_type, osm_id))]))

    adjacent = step2_adjacent(store, graph, params)
    for rec in adjacent:
        store.insert_linkage(rec)
    report.adjacent_surfaces = len({r.citygml_surface_id for r in adjacent})
    report.unmatched_final = report.unmatched_step1 - report.adjacent_surfaces

    pois = step3_poi_match(store, graph, adjacent)
    for rec in pois:
        store.insert_linkage(rec)
    report.poi_records = len(pois)
    report.poi_matched = len({r.osm_id for r in pois})

    matched_osm = graph.matched_osm()
    report.osm_only = report.osm_footprints - len(matched_osm)
    return report


def _component_stats(graph: MatchGraph) -> tuple[dict, dict]:
    """(components per class, ground surfaces per class)."""
    neighbors: dict = {}
    for sid, osm in graph.edges:
        neighbors.setdefault(("s", sid), []).append(("o", osm))
        neighbors.setdefault(("o", osm), []).append(("s", sid))
    seen: set = set()
    comp_counts: dict[str, int] = {}
    surf_counts: dict[str, int] = {}
    for node in neighbors:
        if node in seen or node[0] != "s":
            continue
        stack = [node]
        seen.add(node)
        surfaces = set()
        osms = set()
        while stack:
            cur = stack.pop()
            (surfaces if cur[0] == "s" else osms).add(cur[1])
            for nxt in neighbors[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if len(osms) == 1 and len(surfaces) == 1:
            cls = REL_ONE_TO_ONE
        elif len(osms) == 1:
            cls = REL_ONE_TO_N
        elif len(surfaces) == 1:
            cls = REL_M_TO_ONE
        else:
            cls = REL_M_TO_N
        comp_counts[cls] = comp_counts.get(cls, 0) + 1
        surf_counts[cls] = surf_counts.get(cls, 0) + len(surfaces)
    return comp_counts, surf_counts
