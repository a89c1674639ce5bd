"""File ingestion: CityGML 2.0 LoD2 buildings and OSM XML."""

from citykg.ingest.citygml import CityGmlReport, IngestError, parse_citygml
from citykg.ingest.osm import OsmReport, classify_tags, load_tag_table, parse_osm

__all__ = [
    "CityGmlReport",
    "IngestError",
    "OsmReport",
    "classify_tags",
    "load_tag_table",
    "parse_citygml",
    "parse_osm",
]
