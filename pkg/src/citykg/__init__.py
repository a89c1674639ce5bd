"""citykg: CityGML LoD2 + OpenStreetMap to a queryable geospatial
knowledge graph — ingest, spatial linking, RDF materialization and
GeoSPARQL query answering as one batch pipeline."""

__version__ = "0.1.0"
