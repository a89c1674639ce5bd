"""In-memory tabular city store.

Mirrors a trimmed 3DCityDB layout (building, surface_geometry,
thematic_surface, address, cityobject) plus the OSM tables and the linkage
table produced by the linker.  Append-only during ingest; snapshots are a
directory of TSV files, one per table, byte-stable across reloads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

from citykg.geometry import CRS, Geometry, crs_from_string, parse_wkt, to_wkt
from citykg.geometry.wkt import format_number

GROUND_SURFACE = "GroundSurface"
ROOF_SURFACE = "RoofSurface"
WALL_SURFACE = "WallSurface"
SURFACE_KINDS = (GROUND_SURFACE, ROOF_SURFACE, WALL_SURFACE)

KIND_MATCH = "Match"
KIND_ADJACENT = "Adjacent"
KIND_POI = "PoiMatch"
LINK_KINDS = (KIND_MATCH, KIND_ADJACENT, KIND_POI)

REL_ONE_TO_ONE = "1:1"
REL_ONE_TO_N = "1:n"
REL_M_TO_ONE = "m:1"
REL_M_TO_N = "m:n"
RELATION_CLASSES = (REL_ONE_TO_ONE, REL_ONE_TO_N, REL_M_TO_ONE, REL_M_TO_N)

OSM_TYPES = ("N", "W", "R")


class StoreError(Exception):
    pass


class DuplicateKeyError(StoreError):
    pass


class ForeignKeyError(StoreError):
    pass


class UnknownColumnError(StoreError):
    pass


@dataclass(frozen=True)
class CityObjectRow:
    id: int
    gmlid: str


@dataclass(frozen=True)
class BuildingRow:
    id: int
    objectclass_id: int
    building_root_id: int
    roof_type: str | None
    measured_height: float | None
    lod2_solid_id: int | None


@dataclass(frozen=True)
class SurfaceGeometryRow:
    id: int
    root_id: int
    cityobject_id: int
    geometry: Geometry


@dataclass(frozen=True)
class ThematicSurfaceRow:
    id: int
    building_id: int
    surface_kind: str
    lod2_multi_surface_id: int


@dataclass(frozen=True)
class AddressRow:
    id: int
    building_id: int
    thoroughfare: str | None
    administrative_area: str | None
    label: str


@dataclass(frozen=True)
class OsmEntityRow:
    osm_id: int
    osm_type: str
    geometry: Geometry | None
    label: str | None
    tags: dict


@dataclass(frozen=True)
class OsmClassRow:
    osm_id: int
    osm_type: str
    class_name: str


@dataclass(frozen=True)
class LinkageRecord:
    # field order matches the linkage TSV export contract
    citygml_surface_id: int
    osm_type: str
    osm_id: int
    ratio: float
    kind: str
    relation_class: str | None


@dataclass(frozen=True)
class RoofCodeRow:
    """ALKIS roof-type code with its English label (shipped data)."""

    code: str
    label: str


_TABLES = {
    "cityobject": CityObjectRow,
    "building": BuildingRow,
    "surface_geometry": SurfaceGeometryRow,
    "thematic_surface": ThematicSurfaceRow,
    "address": AddressRow,
    "osm_entity": OsmEntityRow,
    "osm_class": OsmClassRow,
    "linkage": LinkageRecord,
    "roof_code": RoofCodeRow,
}

# shipped reference data, repopulated at construction, never snapshotted
_DATA_TABLES = ("roof_code",)

_OPS = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">": lambda a, b: a is not None and a > b,
    "<": lambda a, b: a is not None and a < b,
    ">=": lambda a, b: a is not None and a >= b,
    "<=": lambda a, b: a is not None and a <= b,
}


def table_columns(table: str) -> tuple[str, ...]:
    if table not in _TABLES:
        raise UnknownColumnError(f"unknown table {table!r}")
    return tuple(f.name for f in fields(_TABLES[table]))


class CityStore:
    """Holds all tables for one pipeline run.

    Single writer during ingest and linking; once handed to the mapping or
    query stages the store is treated as an immutable snapshot.
    """

    def __init__(self, crs: CRS | None = None):
        self.crs = crs
        self.rows: dict[str, list] = {name: [] for name in _TABLES}
        self._keys: dict[str, set] = {name: set() for name in _TABLES}
        self._gmlids: dict[str, int] = {}
        self._gmlid_by_id: dict[int, str] = {}
        for code, label in _load_roof_codes():
            self._insert("roof_code", RoofCodeRow(code, label), code)

    # -- generic access ----------------------------------------------------

    def table(self, name: str) -> list:
        if name not in self.rows:
            raise UnknownColumnError(f"unknown table {name!r}")
        return self.rows[name]

    def scan(self, table: str, predicates: list[tuple[str, str, object]] = ()):
        """Rows satisfying every (column, op, value) predicate, in
        insertion order."""
        cols = table_columns(table)
        for col, op, _ in predicates:
            if col not in cols:
                raise UnknownColumnError(f"{table} has no column {col!r}")
            if op not in _OPS:
                raise UnknownColumnError(f"unsupported operator {op!r}")
        for row in self.rows[table]:
            if all(_OPS[op](getattr(row, col), val) for col, op, val in predicates):
                yield row

    def equi_join(self, left: str, right: str, on: list[tuple[str, str]]):
        """Inner hash join; yields (left_row, right_row) pairs."""
        lcols = table_columns(left)
        rcols = table_columns(right)
        for lcol, rcol in on:
            if lcol not in lcols:
                raise UnknownColumnError(f"{left} has no column {lcol!r}")
            if rcol not in rcols:
                raise UnknownColumnError(f"{right} has no column {rcol!r}")
        buckets: dict[tuple, list] = {}
        for rrow in self.rows[right]:
            key = tuple(getattr(rrow, rcol) for _, rcol in on)
            buckets.setdefault(key, []).append(rrow)
        for lrow in self.rows[left]:
            key = tuple(getattr(lrow, lcol) for lcol, _ in on)
            for rrow in buckets.get(key, ()):
                yield lrow, rrow

    # -- inserts -----------------------------------------------------------

    def _insert(self, table: str, row, key):
        if key in self._keys[table]:
            raise DuplicateKeyError(f"{table} key {key!r} already present")
        self._keys[table].add(key)
        self.rows[table].append(row)
        return key

    def insert_cityobject(self, row: CityObjectRow) -> int:
        if row.gmlid in self._gmlids:
            raise DuplicateKeyError(f"gml:id {row.gmlid!r} already present")
        self._insert("cityobject", row, row.id)
        self._gmlids[row.gmlid] = row.id
        self._gmlid_by_id[row.id] = row.gmlid
        return row.id

    def insert_building(self, row: BuildingRow) -> int:
        if row.lod2_solid_id is not None and row.lod2_solid_id not in self._keys["surface_geometry"]:
            raise ForeignKeyError(f"lod2_solid_id {row.lod2_solid_id} does not resolve")
        if row.measured_height is not None and not row.measured_height > 0:
            raise StoreError(f"measured_height must be positive, got {row.measured_height}")
        return self._insert("building", row, row.id)

    def insert_surface_geometry(self, row: SurfaceGeometryRow) -> int:
        if row.cityobject_id not in self._keys["cityobject"]:
            raise ForeignKeyError(f"cityobject_id {row.cityobject_id} does not resolve")
        if row.geometry is None:
            raise StoreError("surface_geometry requires a geometry")
        return self._insert("surface_geometry", row, row.id)

    def insert_thematic_surface(self, row: ThematicSurfaceRow) -> int:
        if row.building_id not in self._keys["building"]:
            raise ForeignKeyError(f"building_id {row.building_id} does not resolve")
        if row.lod2_multi_surface_id not in self._keys["surface_geometry"]:
            raise ForeignKeyError(f"lod2_multi_surface_id {row.lod2_multi_surface_id} does not resolve")
        if row.surface_kind not in SURFACE_KINDS:
            raise StoreError(f"unknown surface kind {row.surface_kind!r}")
        return self._insert("thematic_surface", row, row.id)

    def insert_address(self, row: AddressRow) -> int:
        if row.building_id not in self._keys["building"]:
            raise ForeignKeyError(f"building_id {row.building_id} does not resolve")
        return self._insert("address", row, row.id)

    def insert_osm_entity(self, row: OsmEntityRow):
        if row.osm_type not in OSM_TYPES:
            raise StoreError(f"unknown osm_type {row.osm_type!r}")
        return self._insert("osm_entity", row, (row.osm_id, row.osm_type))

    def insert_osm_class(self, row: OsmClassRow):
        if (row.osm_id, row.osm_type) not in self._keys["osm_entity"]:
            raise ForeignKeyError(f"osm entity {row.osm_type}{row.osm_id} does not resolve")
        return self._insert("osm_class", row, (row.osm_id, row.osm_type, row.class_name))

    def insert_linkage(self, row: LinkageRecord):
        if row.citygml_surface_id not in self._keys["thematic_surface"]:
            raise ForeignKeyError(f"citygml_surface_id {row.citygml_surface_id} does not resolve")
        if (row.osm_id, row.osm_type) not in self._keys["osm_entity"]:
            raise ForeignKeyError(f"osm entity {row.osm_type}{row.osm_id} does not resolve")
        if row.kind not in LINK_KINDS:
            raise StoreError(f"unknown linkage kind {row.kind!r}")
        if row.kind == KIND_MATCH:
            if row.relation_class is not None and row.relation_class not in RELATION_CLASSES:
                raise StoreError(f"unknown relation class {row.relation_class!r}")
        elif row.relation_class is not None:
            raise StoreError("relation_class is only assigned to Match records")
        return self._insert(
            "linkage", row, (row.citygml_surface_id, row.osm_id, row.osm_type, row.kind)
        )

    # -- lookups -----------------------------------------------------------

    def gmlid_to_id(self, gmlid: str) -> int | None:
        return self._gmlids.get(gmlid)

    def id_to_gmlid(self, cityobject_id: int) -> str | None:
        return self._gmlid_by_id.get(cityobject_id)

    def has_citygml(self) -> bool:
        return bool(self.rows["building"])

    def has_osm(self) -> bool:
        return bool(self.rows["osm_entity"])

    def check_integrity(self) -> list[str]:
        """Full referential sweep; returns human-readable violations."""
        problems = []
        sg = self._keys["surface_geometry"]
        for b in self.rows["building"]:
            if b.lod2_solid_id is not None and b.lod2_solid_id not in sg:
                problems.append(f"building {b.id}: dangling lod2_solid_id")
        for t in self.rows["thematic_surface"]:
            if t.building_id not in self._keys["building"]:
                problems.append(f"thematic_surface {t.id}: dangling building_id")
            if t.lod2_multi_surface_id not in sg:
                problems.append(f"thematic_surface {t.id}: dangling lod2_multi_surface_id")
        for g in self.rows["surface_geometry"]:
            if g.cityobject_id not in self._keys["cityobject"]:
                problems.append(f"surface_geometry {g.id}: dangling cityobject_id")
        for a in self.rows["address"]:
            if a.building_id not in self._keys["building"]:
                problems.append(f"address {a.id}: dangling building_id")
        ents = self._keys["osm_entity"]
        for c in self.rows["osm_class"]:
            if (c.osm_id, c.osm_type) not in ents:
                problems.append(f"osm_class {c.osm_type}{c.osm_id}: dangling entity")
        for l in self.rows["linkage"]:
            if l.citygml_surface_id not in self._keys["thematic_surface"]:
                problems.append(f"linkage: dangling surface {l.citygml_surface_id}")
            if (l.osm_id, l.osm_type) not in ents:
                problems.append(f"linkage: dangling entity {l.osm_type}{l.osm_id}")
        return problems

    # -- TSV snapshots -------------------------------------------------------

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        meta = [("crs", str(self.crs) if self.crs else "")]
        _write_tsv(directory / "meta.tsv", ("key", "value"), meta)
        for name, cls in _TABLES.items():
            if name in _DATA_TABLES:
                continue
            cols = tuple(f.name for f in fields(cls))
            lines = [tuple(_cell(getattr(row, c)) for c in cols) for row in self.rows[name]]
            _write_tsv(directory / f"{name}.tsv", cols, lines)

    @classmethod
    def load(cls, directory: str | Path) -> "CityStore":
        directory = Path(directory)
        meta = dict(_read_tsv(directory / "meta.tsv"))
        crs = crs_from_string(meta["crs"]) if meta.get("crs") else None
        store = cls(crs)
        order = [
            "cityobject", "surface_geometry", "building", "thematic_surface",
            "address", "osm_entity", "osm_class", "linkage",
        ]
        inserters = {
            "cityobject": store.insert_cityobject,
            "building": store.insert_building,
            "surface_geometry": store.insert_surface_geometry,
            "thematic_surface": store.insert_thematic_surface,
            "address": store.insert_address,
            "osm_entity": store.insert_osm_entity,
            "osm_class": store.insert_osm_class,
            "linkage": store.insert_linkage,
        }
        for name in order:
            path = directory / f"{name}.tsv"
            if not path.exists():
                continue
            rowcls = _TABLES[name]
            for values in _read_tsv(path):
                inserters[name](_row_from_cells(rowcls, values, crs))
        return store


def _load_roof_codes() -> list[tuple[str, str]]:
    text = resources.files("citykg").joinpath("data/alkis_roof_types.tsv").read_text("utf-8")
    return [tuple(line.split("\t")) for line in text.splitlines()[1:] if line.strip()]


# -- cell codecs -------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Geometry):
        return to_wkt(value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, ensure_ascii=False)
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def _parse_cell(text: str, ftype: str, crs):
    if text == "" and "None" in ftype:
        return None
    if ftype.startswith("int"):
        return int(text)
    if ftype.startswith("float"):
        return float(text)
    if ftype.startswith("dict"):
        return json.loads(text)
    if "Geometry" in ftype:
        return parse_wkt(text, crs)
    return text


def _row_from_cells(rowcls, values: tuple[str, ...], crs):
    kwargs = {}
    for f, text in zip(fields(rowcls), values):
        kwargs[f.name] = _parse_cell(text, str(f.type), crs)
    return rowcls(**kwargs)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _write_tsv(path: Path, header: tuple[str, ...], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_escape(c) for c in row) + "\n")


def _read_tsv(path: Path):
    with open(path, encoding="utf-8", newline="\n") as fh:
        header = fh.readline()
        if not header:
            return
        for line in fh:
            yield tuple(_unescape(c) for c in line.rstrip("\n").split("\t"))
