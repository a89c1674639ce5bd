"""Namespace table for the generated graph and the query engine.

The prefix bindings are fixed so the bundled analytical queries resolve
without their own PREFIX headers.
"""

from citykg.kg.terms import IRI

PREFIXES = {
    "": "https://github.com/yuzzfeng/D2G2/citygml#",
    "bldg": "http://www.opengis.net/citygml/building/2.0/",
    "geo": "http://www.opengis.net/ont/geosparql#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "lgdo": "http://linkedgeodata.org/ontology/",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "sf": "http://www.opengis.net/ont/sf#",
    "geof": "http://www.opengis.net/def/function/geosparql/",
    "uom": "http://www.opengis.net/def/uom/OGC/1.0/",
    "lgdo-data": "http://linkedgeodata.org/triplify/",
}


def expand(prefixed: str) -> str:
    """pfx:local -> absolute IRI string (raises on unknown prefix)."""
    prefix, _, local = prefixed.partition(":")
    if prefix not in PREFIXES:
        raise KeyError(f"unknown prefix {prefix!r} in {prefixed!r}")
    return PREFIXES[prefix] + local


RDF_TYPE = IRI(expand("rdf:type"))
RDFS_SUBPROPERTY = IRI(expand("rdfs:subPropertyOf"))
RDFS_LABEL = IRI(expand("rdfs:label"))
WKT_LITERAL = expand("geo:wktLiteral")
XSD_DECIMAL = expand("xsd:decimal")
XSD_DOUBLE = expand("xsd:double")
XSD_INTEGER = expand("xsd:integer")
XSD_BOOLEAN = expand("xsd:boolean")
GEO_AS_WKT = IRI(expand("geo:asWKT"))
GEO_HAS_GEOMETRY = IRI(expand("geo:hasGeometry"))
UOM_METRE = expand("uom:metre")
