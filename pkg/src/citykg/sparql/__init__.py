"""SPARQL/GeoSPARQL subset: parser, AST, evaluator."""

from citykg.sparql.ast import SelectQuery, to_text
from citykg.sparql.eval import SolutionTable, evaluate
from citykg.sparql.parser import QueryParseError, UnsupportedFeature, parse_query

__all__ = [
    "QueryParseError",
    "SelectQuery",
    "SolutionTable",
    "UnsupportedFeature",
    "evaluate",
    "parse_query",
    "to_text",
]
