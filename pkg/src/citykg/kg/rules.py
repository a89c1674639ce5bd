"""Declarative mapping rules: tabular source query -> triple templates.

A rules file is a sequence of blocks:

    rule <id>
      from <table> <alias>
      join <table> <alias> on <alias>.<col> = <alias>.<col>
      where <alias>.<col> = "constant"     # also !=, and the keyword null
      let <name> = <function>(<alias>.<col>[, ...])
      emit <subject> <predicate> <object> .

    axiom <property> subPropertyOf <property>

Templates are prefixed-name skeletons with {alias.col} or {letname}
placeholders; objects may also be quoted literal templates with an
optional ^^datatype.  A template whose placeholder evaluates to null is
skipped for that row; the row's other templates still fire.  The available
let-functions mirror what the mapping layer needs from the geometry
engine: wkt_wgs84 (serialize in WGS84), area_sqm, osm_ref
("way/123"-style reference fragments).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from citykg.geometry import Geometry, WGS84, polygon_area, to_wkt, transform
from citykg.geometry.types import MultiPolygon, Polygon
from citykg.geometry.wkt import format_number
from citykg.kg import namespaces
from citykg.kg.terms import IRI, Literal
from citykg.store import CityStore, table_columns

_PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z0-9_.]*)\}")


class RuleError(Exception):
    pass


@dataclass(frozen=True)
class SourceJoin:
    table: str
    alias: str
    left: tuple[str, str]   # (alias, column) already bound
    right: tuple[str, str]  # (alias, column) of the joined table


@dataclass(frozen=True)
class SourceFilter:
    alias: str
    column: str
    op: str          # "=" or "!="
    value: object    # constant, or None for the null keyword


@dataclass(frozen=True)
class Computed:
    name: str
    function: str
    args: tuple[tuple[str, str], ...]  # (alias, column) refs


@dataclass(frozen=True)
class Template:
    kind: str                 # "iri" | "literal"
    skeleton: str             # text with {placeholders}
    datatype: str | None = None

    def placeholders(self) -> list[str]:
        return _PLACEHOLDER.findall(self.skeleton)


@dataclass(frozen=True)
class TripleTemplate:
    subject: Template
    predicate: Template
    object: Template


@dataclass(frozen=True)
class MappingRule:
    id: str
    base_table: str
    base_alias: str
    joins: tuple[SourceJoin, ...] = ()
    filters: tuple[SourceFilter, ...] = ()
    computed: tuple[Computed, ...] = ()
    targets: tuple[TripleTemplate, ...] = ()


@dataclass
class SchemaAxioms:
    subproperties: list[tuple[str, str]] = field(default_factory=list)  # (sub, super) IRIs

    def closure(self) -> dict[str, set[str]]:
        """sub IRI -> all transitive super IRIs; rejects cycles."""
        direct: dict[str, set[str]] = {}
        for sub, sup in self.subproperties:
            direct.setdefault(sub, set()).add(sup)
        out: dict[str, set[str]] = {}

        def walk(node: str, trail: tuple) -> set[str]:
            if node in trail:
                raise RuleError(f"subproperty cycle through {node}")
            if node in out:
                return out[node]
            supers: set[str] = set()
            for nxt in direct.get(node, ()):
                supers.add(nxt)
                supers |= walk(nxt, trail + (node,))
            out[node] = supers
            return supers

        for sub in direct:
            walk(sub, ())
        return out


# ---------------------------------------------------------------------------
# parsing


def _split_terms(line: str) -> list[str]:
    """Whitespace split that keeps quoted strings (and their ^^suffix)
    together."""
    out = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        if line[i] == '"':
            j = i + 1
            while j < len(line) and line[j] != '"':
                j += 1
            if j >= len(line):
                raise RuleError(f"unterminated string in {line!r}")
            j += 1
            if line.startswith("^^", j):
                j += 2
                while j < len(line) and not line[j].isspace():
                    j += 1
            out.append(line[i:j])
            i = j
        else:
            j = i
            while j < len(line) and not line[j].isspace():
                j += 1
            out.append(line[i:j])
            i = j
    return out


def _parse_template(token: str) -> Template:
    if token.startswith('"'):
        end = token.rindex('"')
        body = token[1:end]
        rest = token[end + 1:]
        datatype = None
        if rest.startswith("^^"):
            datatype = namespaces.expand(rest[2:])
        return Template("literal", body, datatype)
    if token == "a":
        return Template("iri", namespaces.RDF_TYPE.value)
    # prefixed template: expand the prefix, keep the rest verbatim
    prefix, sep, local = token.partition(":")
    if not sep:
        raise RuleError(f"expected a prefixed name or literal, got {token!r}")
    return Template("iri", namespaces.PREFIXES[prefix] + local if prefix in namespaces.PREFIXES
                    else _fail_prefix(token))


def _fail_prefix(token: str):
    raise RuleError(f"unknown prefix in {token!r}")


def _parse_colref(text: str) -> tuple[str, str]:
    alias, sep, col = text.partition(".")
    if not sep:
        raise RuleError(f"expected alias.column, got {text!r}")
    return alias, col


def _parse_constant(token: str):
    if token == "null":
        return None
    if token.startswith('"') and token.endswith('"'):
        return token[1:-1]
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise RuleError(f"bad constant {token!r}") from None


def parse_rules(text: str) -> tuple[list[MappingRule], SchemaAxioms]:
    rules: list[MappingRule] = []
    axioms = SchemaAxioms()
    current: dict | None = None

    def finish():
        nonlocal current
        if current is None:
            return
        if current["base_table"] is None:
            raise RuleError(f"rule {current['id']}: missing from clause")
        if not current["targets"]:
            raise RuleError(f"rule {current['id']}: no emit templates")
        rules.append(MappingRule(
            id=current["id"],
            base_table=current["base_table"],
            base_alias=current["base_alias"],
            joins=tuple(current["joins"]),
            filters=tuple(current["filters"]),
            computed=tuple(current["computed"]),
            targets=tuple(current["targets"]),
        ))
        current = None

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        words = _split_terms(line)
        head = words[0]
        if head == "rule":
            finish()
            if len(words) != 2:
                raise RuleError(f"bad rule header {line!r}")
            current = {"id": words[1], "base_table": None, "base_alias": None,
                       "joins": [], "filters": [], "computed": [], "targets": []}
        elif head == "axiom":
            if len(words) != 4 or words[2] != "subPropertyOf":
                raise RuleError(f"bad axiom line {line!r}")
            axioms.subproperties.append(
                (namespaces.expand(words[1]), namespaces.expand(words[3]))
            )
        elif current is None:
            raise RuleError(f"statement outside a rule: {line!r}")
        elif head == "from":
            current["base_table"], current["base_alias"] = words[1], words[2]
        elif head == "join":
            if len(words) != 7 or words[3] != "on" or words[5] != "=":
                raise RuleError(f"bad join line {line!r}")
            left = _parse_colref(words[4])
            right = _parse_colref(words[6])
            # normalize: right side refers to the freshly joined alias
            alias = words[2]
            if right[0] != alias:
                left, right = right, left
            if right[0] != alias:
                raise RuleError(f"join condition must reference {alias!r}: {line!r}")
            current["joins"].append(SourceJoin(words[1], alias, left, right))
        elif head == "where":
            if len(words) != 4 or words[2] not in ("=", "!="):
                raise RuleError(f"bad where line {line!r}")
            alias, col = _parse_colref(words[1])
            current["filters"].append(
                SourceFilter(alias, col, words[2], _parse_constant(words[3]))
            )
        elif head == "let":
            if len(words) < 4 or words[2] != "=":
                raise RuleError(f"bad let line {line!r}")
            call = " ".join(words[3:])
            match = re.fullmatch(r"(\w+)\(([^)]*)\)", call)
            if not match:
                raise RuleError(f"bad let expression {call!r}")
            args = tuple(_parse_colref(a.strip()) for a in match.group(2).split(",") if a.strip())
            current["computed"].append(Computed(words[1], match.group(1), args))
        elif head == "emit":
            body = words[1:]
            if body and body[-1] == ".":
                body = body[:-1]
            if len(body) != 3:
                raise RuleError(f"emit needs subject predicate object: {line!r}")
            current["targets"].append(TripleTemplate(
                _parse_template(body[0]), _parse_template(body[1]), _parse_template(body[2])
            ))
        else:
            raise RuleError(f"unknown statement {head!r} in {line!r}")
    finish()
    return rules, axioms


# ---------------------------------------------------------------------------
# validation and expansion


_FUNCTIONS = {"wkt_wgs84": 1, "area_sqm": 1, "osm_ref": 2}

_OSM_REF_WORDS = {"N": "node", "W": "way", "R": "relation"}


def validate_rule(rule: MappingRule, store: CityStore) -> None:
    """Check tables, aliases, columns and functions before any expansion."""
    aliases = {rule.base_alias: rule.base_table}
    table_columns(rule.base_table)  # raises on unknown table
    for join in rule.joins:
        table_columns(join.table)
        if join.alias in aliases:
            raise RuleError(f"rule {rule.id}: duplicate alias {join.alias!r}")
        if join.left[0] not in aliases:
            raise RuleError(f"rule {rule.id}: join references unbound alias {join.left[0]!r}")
        _check_column(rule, aliases[join.left[0]], join.left[1])
        _check_column(rule, join.table, join.right[1])
        aliases[join.alias] = join.table
    for f in rule.filters:
        if f.alias not in aliases:
            raise RuleError(f"rule {rule.id}: filter references unknown alias {f.alias!r}")
        _check_column(rule, aliases[f.alias], f.column)
    names = set()
    for comp in rule.computed:
        if comp.function not in _FUNCTIONS:
            raise RuleError(f"rule {rule.id}: unknown function {comp.function!r}")
        if len(comp.args) != _FUNCTIONS[comp.function]:
            raise RuleError(f"rule {rule.id}: {comp.function} takes "
                            f"{_FUNCTIONS[comp.function]} argument(s)")
        for alias, col in comp.args:
            if alias not in aliases:
                raise RuleError(f"rule {rule.id}: let references unknown alias {alias!r}")
            _check_column(rule, aliases[alias], col)
        names.add(comp.name)
    for target in rule.targets:
        for template in (target.subject, target.predicate, target.object):
            for ref in template.placeholders():
                if "." in ref:
                    alias, col = ref.split(".", 1)
                    if alias not in aliases:
                        raise RuleError(f"rule {rule.id}: template references "
                                        f"unknown alias {alias!r}")
                    _check_column(rule, aliases[alias], col)
                elif ref not in names:
                    raise RuleError(f"rule {rule.id}: template references "
                                    f"unknown name {ref!r}")


def _check_column(rule: MappingRule, table: str, column: str) -> None:
    if column not in table_columns(table):
        raise RuleError(f"rule {rule.id}: table {table!r} has no column {column!r}")


def _source_rows(rule: MappingRule, store: CityStore):
    """Iterate bound-alias dicts for the rule's source query."""
    rows = [{rule.base_alias: row} for row in store.table(rule.base_table)]
    for join in rule.joins:
        buckets: dict = {}
        for jrow in store.table(join.table):
            buckets.setdefault(getattr(jrow, join.right[1]), []).append(jrow)
        joined = []
        for bound in rows:
            key = getattr(bound[join.left[0]], join.left[1])
            for jrow in buckets.get(key, ()):
                merged = dict(bound)
                merged[join.alias] = jrow
                joined.append(merged)
        rows = joined
    for f in rule.filters:
        ok = (lambda v, f=f: v == f.value) if f.op == "=" else (lambda v, f=f: v != f.value)
        rows = [b for b in rows if ok(getattr(b[f.alias], f.column))]
    return rows


def _apply_function(name: str, values: list):
    if any(v is None for v in values):
        return None
    if name == "wkt_wgs84":
        geom = values[0]
        if not isinstance(geom, Geometry):
            raise RuleError(f"wkt_wgs84 expects a geometry, got {type(geom).__name__}")
        return to_wkt(transform(geom, WGS84))
    if name == "area_sqm":
        geom = values[0]
        if not isinstance(geom, (Polygon, MultiPolygon)):
            raise RuleError("area_sqm expects a polygonal geometry")
        return polygon_area(geom)
    if name == "osm_ref":
        osm_type, osm_id = values
        return f"{_OSM_REF_WORDS[osm_type]}/{osm_id}"
    raise RuleError(f"unknown function {name!r}")


def _render_value(value) -> str:
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def _instantiate(template: Template, values: dict):
    """Template + bound values -> Term, or None when a placeholder is null."""
    missing = False

    def repl(match):
        nonlocal missing
        value = values.get(match.group(1))
        if value is None:
            missing = True
            return ""
        return _render_value(value)

    text = _PLACEHOLDER.sub(repl, template.skeleton)
    if missing:
        return None
    if template.kind == "iri":
        return IRI(text)
    return Literal(text, datatype=template.datatype)


def expand_rule(rule: MappingRule, store: CityStore, ts) -> int:
    """Expand one rule into the triple set; returns triples added."""
    added = 0
    for bound in _source_rows(rule, store):
        values: dict = {}
        for alias, row in bound.items():
            for col in table_columns(_table_of(row)):
                values[f"{alias}.{col}"] = getattr(row, col)
        for comp in rule.computed:
            args = [getattr(bound[a], c) for a, c in comp.args]
            values[comp.name] = _apply_function(comp.function, args)
        for target in rule.targets:
            s = _instantiate(target.subject, values)
            p = _instantiate(target.predicate, values)
            o = _instantiate(target.object, values)
            if s is None or p is None or o is None:
                continue
            if ts.add(s, p, o):
                added += 1
    return added


_ROWCLASS_TO_TABLE = {
    "CityObjectRow": "cityobject",
    "BuildingRow": "building",
    "SurfaceGeometryRow": "surface_geometry",
    "ThematicSurfaceRow": "thematic_surface",
    "AddressRow": "address",
    "OsmEntityRow": "osm_entity",
    "OsmClassRow": "osm_class",
    "LinkageRecord": "linkage",
    "RoofCodeRow": "roof_code",
}


def _table_of(row) -> str:
    return _ROWCLASS_TO_TABLE[type(row).__name__]
