"""CityGML 2.0 LoD2 building ingestion.

Reads the building-module subset (Building, measuredHeight, roofType,
boundedBy Ground/Roof/Wall surfaces, lod2Solid, xAL addresses) into the
city store.  Anything else is skipped with a counted warning.  Coordinates
are taken as-is: LoD2 state data ships in a projected UTM CRS which the
file's srsName announces (EPSG:258xx and friends).
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from citykg.geometry import CRS, Coord, MultiPolygon, Polygon, Ring, utm
from citykg.geometry.types import PolyhedralSurface
from citykg.store import (
    AddressRow,
    BuildingRow,
    CityObjectRow,
    CityStore,
    SurfaceGeometryRow,
    ThematicSurfaceRow,
)

NS = {
    "core": "http://www.opengis.net/citygml/2.0",
    "bldg": "http://www.opengis.net/citygml/building/2.0",
    "gml": "http://www.opengis.net/gml",
    "xal": "urn:oasis:names:tc:ciq:xsdschema:xAL:2.0",
    "xlink": "http://www.w3.org/1999/xlink",
}

_GML_ID = f"{{{NS['gml']}}}id"
_XLINK_HREF = f"{{{NS['xlink']}}}href"

_SURFACE_KINDS = {
    f"{{{NS['bldg']}}}GroundSurface": "GroundSurface",
    f"{{{NS['bldg']}}}RoofSurface": "RoofSurface",
    f"{{{NS['bldg']}}}WallSurface": "WallSurface",
}


class IngestError(Exception):
    pass


@dataclass
class CityGmlReport:
    buildings: int = 0
    surfaces: int = 0
    solids: int = 0
    addresses: int = 0
    skipped_surfaces: int = 0
    warnings: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [
            f"buildings: {self.buildings}",
            f"surfaces: {self.surfaces}",
            f"solids: {self.solids}",
            f"addresses: {self.addresses}",
            f"skipped_surfaces: {self.skipped_surfaces}",
            f"warnings: {len(self.warnings)}",
        ]
        out.extend(f"  warning: {w}" for w in self.warnings)
        return out


def decode_poslist(text: str, dims: int = 3) -> list[Coord]:
    """Whitespace-separated GML posList into coordinate tuples."""
    tokens = (text or "").split()
    values = []
    for i, tok in enumerate(tokens):
        try:
            values.append(float(tok))
        except ValueError:
            raise IngestError(f"bad posList number {tok!r} at token {i}") from None
    if len(values) % dims != 0:
        raise IngestError(
            f"posList length {len(values)} not divisible by srsDimension {dims}"
        )
    return [tuple(values[i:i + dims]) for i in range(0, len(values), dims)]


def _crs_from_srs_name(text: str) -> CRS | None:
    match = re.search(r"EPSG[:/]+(\d+)", text or "")
    if not match:
        return None
    code = int(match.group(1))
    if 25828 <= code <= 25838:  # ETRS89 / UTM zone
        return utm(code - 25800)
    if 32601 <= code <= 32660:  # WGS84 / UTM north
        return utm(code - 32600)
    if 32701 <= code <= 32760:  # WGS84 / UTM south
        return utm(code - 32700, "S")
    return None


def _detect_crs(root: ET.Element) -> CRS | None:
    for elem in root.iter():
        crs = _crs_from_srs_name(elem.get("srsName", ""))
        if crs is not None:
            return crs
    return None


def _parse_ring(ring_elem: ET.Element, where: str) -> Ring:
    poslist = ring_elem.find("gml:posList", NS)
    if poslist is None:
        raise IngestError(f"{where}: LinearRing without posList")
    dims = int(poslist.get("srsDimension", "3"))
    coords = decode_poslist(poslist.text, dims)
    if len(coords) < 4:
        raise IngestError(f"{where}: ring has fewer than 4 coordinates")
    if coords[0] != coords[-1]:
        raise IngestError(f"{where}: unclosed ring")
    return Ring(tuple(coords))


def _parse_polygon(poly_elem: ET.Element, crs: CRS, where: str) -> Polygon:
    ext = poly_elem.find("gml:exterior/gml:LinearRing", NS)
    if ext is None:
        raise IngestError(f"{where}: polygon without exterior ring")
    holes = tuple(
        _parse_ring(h, where)
        for h in poly_elem.findall("gml:interior/gml:LinearRing", NS)
    )
    return Polygon(_parse_ring(ext, where), holes, crs, normalized=False)


class _Ingester:
    def __init__(self, store: CityStore, crs: CRS):
        self.store = store
        self.crs = crs
        self.report = CityGmlReport()
        existing_objects = [r.id for r in store.table("cityobject")]
        existing_geoms = [r.id for r in store.table("surface_geometry")]
        self.next_object_id = max(existing_objects, default=0) + 1
        self.next_geom_id = max(existing_geoms, default=0) + 1
        self.polygons_by_gmlid: dict[str, Polygon] = {}

    def new_object_id(self) -> int:
        oid = self.next_object_id
        self.next_object_id += 1
        return oid

    def new_geom_id(self) -> int:
        gid = self.next_geom_id
        self.next_geom_id += 1
        return gid

    def ingest_building(self, elem: ET.Element, ordinal: int) -> None:
        gmlid = elem.get(_GML_ID)
        if not gmlid:
            gmlid = f"building_auto_{ordinal}"
            self.report.warnings.append(f"building without gml:id, assigned {gmlid}")
        building_id = self.new_object_id()
        self.store.insert_cityobject(CityObjectRow(building_id, gmlid))

        height_elem = elem.find("bldg:measuredHeight", NS)
        height = float(height_elem.text) if height_elem is not None else None
        roof_elem = elem.find("bldg:roofType", NS)
        roof_type = roof_elem.text.strip() if roof_elem is not None and roof_elem.text else None

        # thematic surfaces (geometry rows first, surface rows after the
        # building row exists)
        pending_surfaces = []
        for bounded in elem.findall("bldg:boundedBy", NS):
            for child in bounded:
                kind = _SURFACE_KINDS.get(child.tag)
                if kind is None:
                    self.report.skipped_surfaces += 1
                    self.report.warnings.append(
                        f"{gmlid}: skipped unsupported surface {child.tag.split('}')[-1]}"
                    )
                    continue
                surface_gmlid = child.get(_GML_ID) or f"{gmlid}_surf{len(pending_surfaces)}"
                polys = []
                for poly_elem in child.findall(
                        "bldg:lod2MultiSurface/gml:MultiSurface/gml:surfaceMember/gml:Polygon", NS):
                    poly = _parse_polygon(poly_elem, self.crs, surface_gmlid)
                    polys.append(poly)
                    pid = poly_elem.get(_GML_ID)
                    if pid:
                        self.polygons_by_gmlid[pid] = poly
                if not polys:
                    self.report.skipped_surfaces += 1
                    self.report.warnings.append(f"{surface_gmlid}: surface without lod2MultiSurface")
                    continue
                geometry = polys[0] if len(polys) == 1 else MultiPolygon(tuple(polys), self.crs)
                surface_id = self.new_object_id()
                self.store.insert_cityobject(CityObjectRow(surface_id, surface_gmlid))
                geom_id = self.new_geom_id()
                self.store.insert_surface_geometry(
                    SurfaceGeometryRow(geom_id, geom_id, surface_id, geometry)
                )
                pending_surfaces.append((surface_id, kind, geom_id))

        solid_geom_id = self._ingest_solid(elem, gmlid, building_id)
        self.store.insert_building(
            BuildingRow(building_id, 26, building_id, roof_type, height, solid_geom_id)
        )
        for surface_id, kind, geom_id in pending_surfaces:
            self.store.insert_thematic_surface(
                ThematicSurfaceRow(surface_id, building_id, kind, geom_id)
            )
            self.report.surfaces += 1
        self._ingest_address(elem, gmlid, building_id)
        self.report.buildings += 1

    def _ingest_solid(self, elem: ET.Element, gmlid: str, building_id: int) -> int | None:
        members = elem.findall(
            "bldg:lod2Solid/gml:Solid/gml:exterior/gml:CompositeSurface/gml:surfaceMember", NS)
        if not members:
            return None
        faces = []
        for member in members:
            href = member.get(_XLINK_HREF, "")
            if href.startswith("#"):
                poly = self.polygons_by_gmlid.get(href[1:])
                if poly is None:
                    self.report.warnings.append(f"{gmlid}: unresolved solid member {href}")
                    continue
                faces.append(poly)
            else:
                inline = member.find("gml:Polygon", NS)
                if inline is not None:
                    faces.append(_parse_polygon(inline, self.crs, gmlid))
        if not faces:
            self.report.warnings.append(f"{gmlid}: solid with no resolvable faces")
            return None
        geom_id = self.new_geom_id()
        self.store.insert_surface_geometry(
            SurfaceGeometryRow(geom_id, geom_id, building_id,
                               PolyhedralSurface(tuple(faces), self.crs))
        )
        self.report.solids += 1
        return geom_id

    def _ingest_address(self, elem: ET.Element, gmlid: str, building_id: int) -> None:
        details = elem.find("bldg:address/core:Address/core:xalAddress/xal:AddressDetails", NS)
        if details is None:
            return
        locality = _text(details, ".//xal:LocalityName")
        street = _text(details, ".//xal:ThoroughfareName")
        number = _text(details, ".//xal:ThoroughfareNumber")
        thoroughfare = " ".join(p for p in (street, number) if p) or None
        label = ", ".join(p for p in (thoroughfare, locality) if p)
        if not label:
            self.report.warnings.append(f"{gmlid}: empty address, skipped")
            return
        address_id = len(self.store.table("address")) + 1
        self.store.insert_address(
            AddressRow(address_id, building_id, thoroughfare, locality, label)
        )
        self.report.addresses += 1


def _text(elem: ET.Element, path: str) -> str | None:
    found = elem.find(path, NS)
    if found is not None and found.text and found.text.strip():
        return found.text.strip()
    return None


def parse_citygml(path: str | Path, store: CityStore, zone: int | None = None) -> CityGmlReport:
    """Ingest one CityGML file into the store; returns the count report."""
    path = Path(path)
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise IngestError(f"{path.name}: malformed XML at line {exc.position[0]}, "
                          f"column {exc.position[1]}") from exc
    root = tree.getroot()

    crs = utm(zone) if zone is not None else (_detect_crs(root) or store.crs)
    if crs is None:
        raise IngestError(
            f"{path.name}: no srsName with a recognizable UTM EPSG code; pass an explicit zone"
        )
    if store.crs is None:
        store.crs = crs
    elif store.crs != crs:
        raise IngestError(f"{path.name}: file CRS {crs} does not match store CRS {store.crs}")

    ingester = _Ingester(store, crs)
    buildings = root.findall(".//core:cityObjectMember/bldg:Building", NS)
    for ordinal, elem in enumerate(buildings, start=1):
        ingester.ingest_building(elem, ordinal)
    return ingester.report
