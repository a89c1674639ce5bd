"""City store: inserts, scans, joins, integrity, TSV snapshots."""

import pytest

from citykg.geometry import parse_wkt, utm
from citykg.store import (
    AddressRow,
    BuildingRow,
    CityObjectRow,
    CityStore,
    DuplicateKeyError,
    ForeignKeyError,
    LinkageRecord,
    OsmClassRow,
    OsmEntityRow,
    SurfaceGeometryRow,
    ThematicSurfaceRow,
    UnknownColumnError,
)

UTM32 = utm(32)

# id, objectclass_id, building_root_id, roof_type, measured_height, lod2_solid_id
TABLE1_ROWS = [
    (10, 26, 10, "1000", 13.363, 117),
    (54, 26, 54, "3100", 13.99, 315),
    (248, 26, 248, "1000", 17.362, 1258),
]


def solid_wkt():
    return parse_wkt(
        "POLYHEDRALSURFACE Z (((0 0 0, 1 0 0, 1 1 0, 0 0 0)))", UTM32
    )


@pytest.fixture
def table1_store():
    store = CityStore(UTM32)
    for bid, ocl, root, roof, height, solid in TABLE1_ROWS:
        store.insert_cityobject(CityObjectRow(bid, f"bldg{bid}"))
        store.insert_surface_geometry(
            SurfaceGeometryRow(solid, solid, bid, solid_wkt())
        )
        store.insert_building(BuildingRow(bid, ocl, root, roof, height, solid))
    return store


def test_insert_returns_keys(table1_store):
    rows = list(table1_store.scan("building"))
    assert [r.id for r in rows] == [10, 54, 248]
    assert rows[0].measured_height == 13.363


def test_duplicate_key_rejected(table1_store):
    with pytest.raises(DuplicateKeyError):
        table1_store.insert_building(BuildingRow(10, 26, 10, "1000", 13.363, 117))


def test_dangling_solid_rejected():
    store = CityStore(UTM32)
    store.insert_cityobject(CityObjectRow(1, "b1"))
    with pytest.raises(ForeignKeyError):
        store.insert_building(BuildingRow(1, 26, 1, "1000", 10.0, 999))


def test_scan_equality_on_roof_type(table1_store):
    got = {r.id for r in table1_store.scan("building", [("roof_type", "=", "1000")])}
    assert got == {10, 248}


def test_scan_numeric_comparison(table1_store):
    got = [r.id for r in table1_store.scan("building", [("measured_height", ">", 15)])]
    assert got == [248]


def test_scan_empty_predicate_returns_all(table1_store):
    assert len(list(table1_store.scan("building"))) == 3


def test_scan_unknown_column(table1_store):
    with pytest.raises(UnknownColumnError):
        list(table1_store.scan("building", [("no_such", "=", 1)]))


def test_join_building_to_solid(table1_store):
    pairs = list(table1_store.equi_join("building", "surface_geometry",
                                        [("lod2_solid_id", "id")]))
    assert len(pairs) == 3
    assert all(b.lod2_solid_id == g.id for b, g in pairs)


def test_join_on_empty_table(table1_store):
    assert list(table1_store.equi_join("address", "building", [("building_id", "id")])) == []


def test_self_join_preserves_count(table1_store):
    pairs = list(table1_store.equi_join("building", "building", [("id", "id")]))
    assert len(pairs) == 3


def test_scan_insert_round_trip():
    store = CityStore(UTM32)
    for i in range(20):
        store.insert_cityobject(CityObjectRow(i, f"obj{i}"))
    assert [r.id for r in store.scan("cityobject")] == list(range(20))


def test_linkage_constraints(table1_store):
    store = table1_store
    store.insert_surface_geometry(SurfaceGeometryRow(2000, 2000, 10, solid_wkt()))
    store.insert_thematic_surface(ThematicSurfaceRow(500, 10, "GroundSurface", 2000))
    store.insert_osm_entity(OsmEntityRow(77, "W", None, None, {}))
    store.insert_linkage(LinkageRecord(500, "W", 77, 0.9, "Match", "1:1"))
    with pytest.raises(DuplicateKeyError):
        store.insert_linkage(LinkageRecord(500, "W", 77, 0.9, "Match", "1:1"))
    # adjacent records never carry a relation class
    with pytest.raises(Exception):
        store.insert_linkage(LinkageRecord(500, "W", 77, 0.0, "Adjacent", "1:1"))


def test_integrity_sweep_clean(table1_store):
    assert table1_store.check_integrity() == []


def test_tsv_snapshot_round_trip(tmp_path, table1_store):
    store = table1_store
    store.insert_surface_geometry(SurfaceGeometryRow(2000, 2000, 10, solid_wkt()))
    store.insert_thematic_surface(ThematicSurfaceRow(500, 10, "GroundSurface", 2000))
    store.insert_address(AddressRow(1, 10, "Stephansplatz 1", "München", "Stephansplatz 1, München"))
    store.insert_osm_entity(OsmEntityRow(77, "W", parse_wkt("POINT (1 2)", UTM32),
                                         "Café \t tab", {"building": "yes"}))
    store.insert_osm_class(OsmClassRow(77, "W", "Building"))
    store.insert_linkage(LinkageRecord(500, "W", 77, 0.75, "Match", "1:1"))

    first = tmp_path / "snap1"
    second = tmp_path / "snap2"
    store.save(first)
    reloaded = CityStore.load(first)
    reloaded.save(second)

    for name in ("building", "surface_geometry", "thematic_surface", "address",
                 "osm_entity", "osm_class", "linkage", "cityobject", "meta"):
        a = (first / f"{name}.tsv").read_bytes()
        b = (second / f"{name}.tsv").read_bytes()
        assert a == b, f"{name}.tsv not byte-stable"

    assert reloaded.crs == UTM32
    assert [r.id for r in reloaded.scan("building")] == [10, 54, 248]
    ent = next(reloaded.scan("osm_entity"))
    assert ent.tags == {"building": "yes"}
    assert ent.label == "Café \t tab"
    link = next(reloaded.scan("linkage"))
    assert link.ratio == 0.75 and link.relation_class == "1:1"


def test_linkage_tsv_column_contract(tmp_path, table1_store):
    store = table1_store
    store.save(tmp_path / "snap")
    header = (tmp_path / "snap" / "linkage.tsv").read_text().splitlines()[0]
    assert header.split("\t") == [
        "citygml_surface_id", "osm_type", "osm_id", "ratio", "kind", "relation_class",
    ]
