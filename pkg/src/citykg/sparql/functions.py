"""Expression evaluation: comparisons, CONTAINS, and the GeoSPARQL
functions the query set needs (geof:buffer, geof:sfIntersects).

Errors raise ExprError; FILTER turns that into row elimination, BIND into
an unbound variable (SPARQL error semantics).
"""

from __future__ import annotations

from citykg.geometry import buffer as buffer_geometry
from citykg.geometry import parse_wkt, sf_intersects, to_wkt, transform, utm_zone_for
from citykg.geometry.errors import GeometryError
from citykg.geometry.types import WGS84, Geometry, bbox_of
from citykg.kg import namespaces
from citykg.kg.terms import IRI, Literal, Term
from citykg.sparql.ast import Comparison, FunctionCall, TermExpr, VarExpr

GEOF_BUFFER = namespaces.expand("geof:buffer")
GEOF_SF_INTERSECTS = namespaces.expand("geof:sfIntersects")

_NUMERIC_DATATYPES = {
    namespaces.XSD_INTEGER,
    namespaces.XSD_DECIMAL,
    namespaces.XSD_DOUBLE,
    namespaces.expand("xsd:float"),
    namespaces.expand("xsd:long"),
    namespaces.expand("xsd:int"),
}

TRUE = Literal("true", datatype=namespaces.XSD_BOOLEAN)
FALSE = Literal("false", datatype=namespaces.XSD_BOOLEAN)


class ExprError(Exception):
    """Evaluation error; maps to SPARQL's error-as-false semantics."""


def numeric_value(term: Term) -> float:
    """Promote integer/decimal/double literals to double."""
    if isinstance(term, Literal) and (term.datatype in _NUMERIC_DATATYPES):
        try:
            return float(term.lexical)
        except ValueError as exc:
            raise ExprError(f"bad numeric lexical {term.lexical!r}") from exc
    raise ExprError(f"not a numeric literal: {term}")


def string_value(term: Term) -> str:
    if isinstance(term, Literal) and term.datatype in (None, namespaces.expand("xsd:string")):
        return term.lexical
    raise ExprError(f"not a plain string literal: {term}")


def _is_numeric(term: Term) -> bool:
    return isinstance(term, Literal) and term.datatype in _NUMERIC_DATATYPES


def effective_boolean(term: Term) -> bool:
    if isinstance(term, Literal):
        if term.datatype == namespaces.XSD_BOOLEAN:
            return term.lexical == "true"
        if _is_numeric(term):
            return numeric_value(term) != 0.0
        if term.datatype is None:
            return term.lexical != ""
    raise ExprError(f"no effective boolean value for {term}")


def _geometry_of(term: Term) -> Geometry:
    if not isinstance(term, Literal):
        raise ExprError(f"expected a WKT literal, got {term}")
    try:
        return parse_wkt(term.lexical, WGS84)
    except GeometryError as exc:
        raise ExprError(f"unparseable WKT: {exc}") from exc


def _metric_crs(geom: Geometry):
    x1, y1, x2, y2 = bbox_of(geom)
    return utm_zone_for((x1 + x2) / 2.0, (y1 + y2) / 2.0)


def geof_buffer(geom_lit: Term, distance: Term, unit: Term) -> Literal:
    """Buffer in meters; the WGS84 literal is projected to its UTM zone,
    buffered, and serialized back as a WGS84 WKT literal."""
    if not isinstance(unit, IRI) or unit.value != namespaces.UOM_METRE:
        raise ExprError(f"geof:buffer supports uom:metre only, got {unit}")
    radius = numeric_value(distance)
    geom = _geometry_of(geom_lit)
    crs = _metric_crs(geom)
    try:
        buffered = buffer_geometry(transform(geom, crs), radius)
        result = transform(buffered, WGS84)
    except GeometryError as exc:
        raise ExprError(str(exc)) from exc
    return Literal(to_wkt(result), datatype=namespaces.WKT_LITERAL)


def geof_sf_intersects(a: Term, b: Term) -> Literal:
    ga = _geometry_of(a)
    gb = _geometry_of(b)
    crs = _metric_crs(ga)
    try:
        hit = sf_intersects(transform(ga, crs), transform(gb, crs))
    except GeometryError as exc:
        raise ExprError(str(exc)) from exc
    return TRUE if hit else FALSE


def evaluate_expr(expr, binding: dict) -> Term:
    """Expression -> RDF term under a solution binding; raises ExprError."""
    if isinstance(expr, VarExpr):
        value = binding.get(expr.var.name)
        if value is None:
            raise ExprError(f"unbound variable ?{expr.var.name}")
        return value
    if isinstance(expr, TermExpr):
        return expr.term
    if isinstance(expr, Comparison):
        return TRUE if _compare(expr, binding) else FALSE
    if isinstance(expr, FunctionCall):
        args = [evaluate_expr(a, binding) for a in expr.args]
        if expr.name == "CONTAINS":
            if len(args) != 2:
                raise ExprError("CONTAINS takes two arguments")
            return TRUE if string_value(args[1]) in string_value(args[0]) else FALSE
        if expr.name == GEOF_BUFFER:
            if len(args) != 3:
                raise ExprError("geof:buffer takes three arguments")
            return geof_buffer(*args)
        if expr.name == GEOF_SF_INTERSECTS:
            if len(args) != 2:
                raise ExprError("geof:sfIntersects takes two arguments")
            return geof_sf_intersects(*args)
        raise ExprError(f"unknown function <{expr.name}>")
    raise ExprError(f"cannot evaluate {expr!r}")


def _compare(expr: Comparison, binding: dict) -> bool:
    left = evaluate_expr(expr.left, binding)
    right = evaluate_expr(expr.right, binding)
    op = expr.op
    if _is_numeric(left) and _is_numeric(right):
        lv, rv = numeric_value(left), numeric_value(right)
        if op == ">":
            return lv > rv
        if op == "<":
            return lv < rv
        if op == "=":
            return lv == rv
        return lv != rv
    if op in (">", "<"):
        # lexical comparison only between two plain strings
        return (string_value(left) > string_value(right)) == (op == ">")
    if op == "=":
        return left == right
    return left != right
