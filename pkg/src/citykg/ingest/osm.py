"""OSM XML ingestion.

Nodes, ways and relations with their tags become osm_entity rows; tags are
classified into LinkedGeoData-style class names through a data-driven rule
table.  Closed building-tagged ways turn into footprint polygons, tagged
nodes into POI points, highway-tagged ways into linestrings.  WGS84
coordinates are reprojected into the store's UTM zone at ingest (zone
picked from the dataset centroid when the store has none yet).
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from citykg.geometry import LineString, Point, Polygon, Ring, transform, utm, utm_zone_for
from citykg.geometry.types import WGS84
from citykg.ingest.citygml import IngestError
from citykg.store import CityStore, OsmClassRow, OsmEntityRow

TagRule = tuple[str, str, str]  # key, value or "*", class name


def load_tag_table(path: str | Path | None = None) -> list[TagRule]:
    """Rules from a (tag_key, tag_value, class_name) TSV; the packaged
    default covers the classes the bundled queries use."""
    if path is None:
        text = resources.files("citykg").joinpath("data/osm_tag_classes.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    rules = []
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        key, value, cls = line.split("\t")
        rules.append((key, value, cls))
    return rules


def classify_tags(tags: dict, rules: list[TagRule]) -> list[str]:
    """All matching class names in table order; first matching rule wins
    per tag key."""
    classes = []
    matched = set()
    for key, value, cls in rules:
        if key in matched or key not in tags:
            continue
        if value == "*" or tags[key] == value:
            classes.append(cls)
            matched.add(key)
    return classes


@dataclass
class OsmReport:
    nodes: int = 0
    ways: int = 0
    relations: int = 0
    footprints: int = 0
    pois: int = 0
    highways: int = 0
    skipped_ways: int = 0
    warnings: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [
            f"nodes: {self.nodes}",
            f"ways: {self.ways}",
            f"relations: {self.relations}",
            f"footprints: {self.footprints}",
            f"pois: {self.pois}",
            f"highways: {self.highways}",
            f"skipped_ways: {self.skipped_ways}",
            f"warnings: {len(self.warnings)}",
        ]
        out.extend(f"  warning: {w}" for w in self.warnings)
        return out


def _tags_of(elem: ET.Element) -> dict:
    return {t.get("k"): t.get("v") for t in elem.findall("tag")}


def parse_osm(path: str | Path, store: CityStore,
              rules: list[TagRule] | None = None,
              zone: int | None = None) -> OsmReport:
    """Ingest one .osm file into the store; returns the count report."""
    path = Path(path)
    if rules is None:
        rules = load_tag_table()
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise IngestError(f"{path.name}: malformed XML at line {exc.position[0]}, "
                          f"column {exc.position[1]}") from exc
    root = tree.getroot()
    report = OsmReport()

    node_coords: dict[int, tuple[float, float]] = {}
    tagged_nodes: list[tuple[int, tuple[float, float], dict]] = []
    for elem in root.findall("node"):
        nid = int(elem.get("id"))
        lon, lat = float(elem.get("lon")), float(elem.get("lat"))
        node_coords[nid] = (lon, lat)
        report.nodes += 1
        tags = _tags_of(elem)
        if tags:
            tagged_nodes.append((nid, (lon, lat), tags))

    if zone is not None:
        crs = utm(zone)
    elif store.crs is not None:
        crs = store.crs
    elif node_coords:
        lons = [c[0] for c in node_coords.values()]
        lats = [c[1] for c in node_coords.values()]
        crs = utm_zone_for(sum(lons) / len(lons), sum(lats) / len(lats))
    else:
        crs = None
    if crs is not None and store.crs is None:
        store.crs = crs

    def project(lonlat_coords, as_ring: bool):
        if as_ring:
            geom = Polygon(Ring(tuple(lonlat_coords)), (), WGS84)
        else:
            geom = LineString(tuple(lonlat_coords), WGS84)
        return transform(geom, crs)

    for nid, (lon, lat), tags in tagged_nodes:
        point = transform(Point(lon, lat, crs=WGS84), crs)
        store.insert_osm_entity(OsmEntityRow(nid, "N", point, tags.get("name"), tags))
        for cls in classify_tags(tags, rules):
            store.insert_osm_class(OsmClassRow(nid, "N", cls))
        report.pois += 1

    for elem in root.findall("way"):
        wid = int(elem.get("id"))
        report.ways += 1
        tags = _tags_of(elem)
        refs = [int(nd.get("ref")) for nd in elem.findall("nd")]
        if not tags:
            continue
        missing = [r for r in refs if r not in node_coords]
        if missing:
            report.skipped_ways += 1
            report.warnings.append(f"way {wid}: dangling node ref {missing[0]}")
            continue
        coords = [node_coords[r] for r in refs]
        closed = len(coords) >= 4 and refs[0] == refs[-1]
        if "building" in tags and not closed:
            report.skipped_ways += 1
            report.warnings.append(f"way {wid}: unclosed building way")
            continue
        if len(coords) < 2:
            report.skipped_ways += 1
            report.warnings.append(f"way {wid}: fewer than 2 nodes")
            continue
        geometry = project(coords, as_ring=closed)
        store.insert_osm_entity(OsmEntityRow(wid, "W", geometry, tags.get("name"), tags))
        for cls in classify_tags(tags, rules):
            store.insert_osm_class(OsmClassRow(wid, "W", cls))
        if "building" in tags:
            report.footprints += 1
        if "highway" in tags:
            report.highways += 1

    for elem in root.findall("relation"):
        rid = int(elem.get("id"))
        report.relations += 1
        tags = _tags_of(elem)
        if not tags:
            continue
        store.insert_osm_entity(OsmEntityRow(rid, "R", None, tags.get("name"), tags))
        for cls in classify_tags(tags, rules):
            store.insert_osm_class(OsmClassRow(rid, "R", cls))

    return report
