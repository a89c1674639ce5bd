"""Batch pipeline driver.

Subcommands mirror the pipeline phases: import-citygml / import-osm
(initialization and integration inputs), link (spatial matching),
materialize (RDF construction) and query (application).  The store lives
in a TSV snapshot directory given by --store, the CITYKG_STORE environment
variable, or a key=value config file.

Exit codes: 0 success, 2 input error, 3 pipeline-order error, 4 query
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from citykg.geometry import GeometryError, parse_wkt
from citykg.geometry.types import (
    LineString,
    MultiPolygon,
    Point,
    Polygon,
    PolyhedralSurface,
    WGS84,
)
from citykg.ingest import IngestError, parse_citygml, parse_osm
from citykg.ingest.osm import load_tag_table
from citykg.kg import load_rules, materialize, parse_turtle, serialize_turtle
from citykg.kg.namespaces import WKT_LITERAL
from citykg.kg.terms import Literal
from citykg.linker import MatchParams, link_all
from citykg.sparql import QueryParseError, evaluate, parse_query
from citykg.sparql.eval import SolutionTable
from citykg.store import CityStore, StoreError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ORDER = 3
EXIT_QUERY = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def read_config(path: str | None) -> dict[str, str]:
    """key=value lines; blank lines and #-comments ignored."""
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise CliError(f"config file not found: {path}", EXIT_INPUT)
    out: dict[str, str] = {}
    for ln, raw in enumerate(p.read_text("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliError(f"{path}:{ln}: expected key=value", EXIT_INPUT)
        out[key.strip()] = value.strip()
    return out


def _store_dir(args, config: dict[str, str]) -> Path:
    value = args.store or config.get("store") or os.environ.get("CITYKG_STORE")
    if not value:
        raise CliError(
            "no store directory: pass --store, set CITYKG_STORE, or put store= in the config",
            EXIT_INPUT,
        )
    return Path(value)


def _load_store(args, config, require: str | None = None) -> CityStore:
    directory = _store_dir(args, config)
    if not (directory / "meta.tsv").exists():
        if require:
            raise CliError(f"store at {directory} is empty; run the import steps first",
                           EXIT_ORDER)
        return CityStore()
    store = CityStore.load(directory)
    if require == "citygml" and not store.has_citygml():
        raise CliError("no CityGML data imported yet", EXIT_ORDER)
    if require == "both":
        if not store.has_citygml():
            raise CliError("no CityGML data imported yet", EXIT_ORDER)
        if not store.has_osm():
            raise CliError("no OSM data imported yet", EXIT_ORDER)
    return store


def _float_option(args, config, name: str, fallback: float) -> float:
    cli_value = getattr(args, name.replace("-", "_"), None)
    if cli_value is not None:
        return cli_value
    if name in config:
        return float(config[name])
    return fallback


def cmd_import_citygml(args, config) -> int:
    store = _load_store(args, config)
    zone = args.zone or (int(config["zone"]) if "zone" in config else None)
    for path in args.files:
        if not Path(path).exists():
            raise CliError(f"file not found: {path}", EXIT_INPUT)
        try:
            report = parse_citygml(path, store, zone=zone)
        except (IngestError, GeometryError, StoreError) as exc:
            raise CliError(f"{path}: {exc}", EXIT_INPUT) from exc
        print(f"# {path}")
        print("\n".join(report.lines()))
    store.save(_store_dir(args, config))
    return EXIT_OK


def cmd_import_osm(args, config) -> int:
    store = _load_store(args, config)
    zone = args.zone or (int(config["zone"]) if "zone" in config else None)
    rules = load_tag_table(args.tag_table or config.get("tag-table"))
    for path in args.files:
        if not Path(path).exists():
            raise CliError(f"file not found: {path}", EXIT_INPUT)
        try:
            report = parse_osm(path, store, rules=rules, zone=zone)
        except (IngestError, GeometryError, StoreError) as exc:
            raise CliError(f"{path}: {exc}", EXIT_INPUT) from exc
        print(f"# {path}")
        print("\n".join(report.lines()))
    store.save(_store_dir(args, config))
    return EXIT_OK


def cmd_link(args, config) -> int:
    store = _load_store(args, config, require="both")
    try:
        params = MatchParams(
            threshold=_float_option(args, config, "threshold", 0.5),
            epsilon_adjacent=_float_option(args, config, "epsilon-adjacent", 0.2),
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    report = link_all(store, params)
    store.save(_store_dir(args, config))
    text = "\n".join(report.lines())
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_materialize(args, config) -> int:
    store = _load_store(args, config, require="citygml")
    rules_path = args.rules or config.get("rules")
    rules, axioms = load_rules(rules_path)
    ts = materialize(store, rules, axioms)
    out = args.out or config.get("turtle-out") or "city.ttl"
    Path(out).write_text(serialize_turtle(ts), encoding="utf-8")
    print(f"wrote {len(ts)} triples to {out}")
    return EXIT_OK


def _kg_for_query(args, config):
    kg_path = args.kg or config.get("kg")
    if kg_path:
        if not Path(kg_path).exists():
            raise CliError(f"knowledge graph file not found: {kg_path}", EXIT_INPUT)
        return parse_turtle(Path(kg_path).read_text("utf-8"))
    store = _load_store(args, config, require="citygml")
    rules, axioms = load_rules(args.rules or config.get("rules"))
    return materialize(store, rules, axioms)


def _geojson_geometry(geom) -> dict:
    def ring_coords(ring):
        return [list(c) for c in ring.coords]

    if isinstance(geom, Point):
        return {"type": "Point", "coordinates": list(geom.coord)}
    if isinstance(geom, LineString):
        return {"type": "LineString", "coordinates": [list(c) for c in geom.coords]}
    if isinstance(geom, Polygon):
        return {"type": "Polygon",
                "coordinates": [ring_coords(r) for r in geom.rings()]}
    if isinstance(geom, MultiPolygon):
        return {"type": "MultiPolygon",
                "coordinates": [[ring_coords(r) for r in p.rings()] for p in geom.parts]}
    if isinstance(geom, PolyhedralSurface):
        return {"type": "MultiPolygon",
                "coordinates": [[ring_coords(r) for r in f.rings()] for f in geom.faces]}
    raise GeometryError(f"no GeoJSON mapping for {type(geom).__name__}")


def _dump_geojson(table: SolutionTable, path: str) -> None:
    features = []
    for row_index, row in enumerate(table.rows):
        for var, term in zip(table.variables, row):
            if isinstance(term, Literal) and term.datatype == WKT_LITERAL:
                try:
                    geom = parse_wkt(term.lexical, WGS84)
                except GeometryError:
                    continue
                features.append({
                    "type": "Feature",
                    "properties": {"row": row_index, "variable": var},
                    "geometry": _geojson_geometry(geom),
                })
    payload = {"type": "FeatureCollection", "features": features}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")


def cmd_query(args, config) -> int:
    if not Path(args.query).exists():
        raise CliError(f"query file not found: {args.query}", EXIT_INPUT)
    ts = _kg_for_query(args, config)
    try:
        ast = parse_query(Path(args.query).read_text("utf-8"))
        table = evaluate(ast, ts)
    except QueryParseError as exc:
        raise CliError(f"{args.query}: {exc}", EXIT_QUERY) from exc
    if args.pretty:
        output = table.pretty()
    else:
        output = table.to_tsv()
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    if args.geojson:
        _dump_geojson(table, args.geojson)
    return EXIT_OK


def cmd_stats(args, config) -> int:
    store = _load_store(args, config)
    from citykg.geometry.ops import KERNEL_BACKEND

    print(f"store: {_store_dir(args, config)}")
    print(f"crs: {store.crs or '(unset)'}")
    print(f"geometry kernels: {KERNEL_BACKEND}")
    for table in ("cityobject", "building", "surface_geometry", "thematic_surface",
                  "address", "osm_entity", "osm_class", "linkage"):
        print(f"{table}: {len(store.table(table))} rows")
    problems = store.check_integrity()
    print(f"integrity violations: {len(problems)}")
    for p in problems:
        print(f"  {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citykg",
        description="CityGML + OSM to a queryable geospatial knowledge graph",
    )
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--store", help="store snapshot directory (or $CITYKG_STORE)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import-citygml", help="ingest CityGML LoD2 building files")
    p.add_argument("files", nargs="+")
    p.add_argument("--zone", type=int, help="override the UTM zone")
    p.set_defaults(func=cmd_import_citygml)

    p = sub.add_parser("import-osm", help="ingest OSM XML files")
    p.add_argument("files", nargs="+")
    p.add_argument("--zone", type=int, help="override the UTM zone")
    p.add_argument("--tag-table", help="alternative tag classification TSV")
    p.set_defaults(func=cmd_import_osm)

    p = sub.add_parser("link", help="run the three-step spatial linking")
    p.add_argument("--threshold", type=float, default=None,
                   help="overlap ratio threshold t (default 0.5)")
    p.add_argument("--epsilon-adjacent", type=float, default=None,
                   help="adjacency distance in meters (default 0.2)")
    p.add_argument("--out", help="also write the distribution report to a file")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("materialize", help="expand mapping rules into Turtle")
    p.add_argument("--rules", help="mapping rules file (default: built-in set)")
    p.add_argument("--out", help="output Turtle path (default city.ttl)")
    p.set_defaults(func=cmd_materialize)

    p = sub.add_parser("query", help="evaluate a SPARQL query")
    p.add_argument("query", help="query file")
    p.add_argument("--kg", help="Turtle file to query (default: materialize the store)")
    p.add_argument("--rules", help="mapping rules when materializing on the fly")
    p.add_argument("--out", help="write results TSV to a file instead of stdout")
    p.add_argument("--pretty", action="store_true", help="aligned table output")
    p.add_argument("--geojson", help="dump geometry-typed result columns as GeoJSON")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stats", help="store table counts and integrity sweep")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = read_config(args.config)
        return args.func(args, config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
