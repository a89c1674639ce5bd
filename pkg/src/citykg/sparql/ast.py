"""Query AST for the supported SPARQL subset, plus the canonical printer."""

from __future__ import annotations

from dataclasses import dataclass

from citykg.kg.terms import IRI, Literal, Term


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


TermPattern = Var | IRI | Literal


@dataclass(frozen=True)
class PropertyPath:
    """Fixed-length sequence path p1/p2/...; IRI steps only."""

    steps: tuple[IRI, ...]


@dataclass(frozen=True)
class TriplePattern:
    subject: TermPattern
    predicate: TermPattern | PropertyPath
    object: TermPattern


@dataclass(frozen=True)
class VarExpr:
    var: Var


@dataclass(frozen=True)
class TermExpr:
    term: Term


@dataclass(frozen=True)
class FunctionCall:
    name: str  # builtin name (CONTAINS) or absolute IRI of an extension fn
    args: tuple


@dataclass(frozen=True)
class Comparison:
    op: str  # > < = !=
    left: object
    right: object


Expr = VarExpr | TermExpr | FunctionCall | Comparison


@dataclass(frozen=True)
class Filter:
    expr: Expr


@dataclass(frozen=True)
class Bind:
    expr: Expr
    var: Var


@dataclass(frozen=True)
class ValuesClause:
    var: Var
    values: tuple[Term, ...]


@dataclass(frozen=True)
class OptionalGroup:
    group: "Group"


GroupElement = TriplePattern | Filter | Bind | ValuesClause | OptionalGroup


@dataclass(frozen=True)
class Group:
    elements: tuple[GroupElement, ...]


@dataclass(frozen=True)
class Aggregate:
    function: str  # COUNT
    var: Var
    alias: Var


@dataclass(frozen=True)
class SelectQuery:
    select: tuple[Var | Aggregate, ...]
    where: Group
    group_by: Var | None = None
    order_by: tuple[Var, bool] | None = None  # (var, descending)
    limit: int | None = None

    def projected_names(self) -> list[str]:
        out = []
        for item in self.select:
            out.append(item.alias.name if isinstance(item, Aggregate) else item.name)
        return out


# ---------------------------------------------------------------------------
# canonical printer


def _term_text(t) -> str:
    if isinstance(t, Var):
        return str(t)
    if isinstance(t, IRI):
        return f"<{t.value}>"
    if isinstance(t, Literal):
        body = '"' + t.lexical.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if t.language:
            return f"{body}@{t.language}"
        if t.datatype:
            return f"{body}^^<{t.datatype}>"
        return body
    raise TypeError(f"unexpected term {t!r}")


def _expr_text(e) -> str:
    if isinstance(e, VarExpr):
        return str(e.var)
    if isinstance(e, TermExpr):
        return _term_text(e.term)
    if isinstance(e, FunctionCall):
        args = ", ".join(_expr_text(a) for a in e.args)
        name = e.name if not e.name.startswith("http") else f"<{e.name}>"
        return f"{name}({args})"
    if isinstance(e, Comparison):
        return f"({_expr_text(e.left)} {e.op} {_expr_text(e.right)})"
    raise TypeError(f"unexpected expression {e!r}")


def _element_text(el, indent: str) -> str:
    if isinstance(el, TriplePattern):
        if isinstance(el.predicate, PropertyPath):
            pred = "/".join(_term_text(s) for s in el.predicate.steps)
        else:
            pred = _term_text(el.predicate)
        return f"{indent}{_term_text(el.subject)} {pred} {_term_text(el.object)} ."
    if isinstance(el, Filter):
        return f"{indent}FILTER{_expr_text(el.expr) if isinstance(el.expr, Comparison) else '(' + _expr_text(el.expr) + ')'}"
    if isinstance(el, Bind):
        return f"{indent}BIND({_expr_text(el.expr)} AS {el.var})"
    if isinstance(el, ValuesClause):
        vals = " ".join(_term_text(v) for v in el.values)
        return f"{indent}VALUES {el.var} {{ {vals} }}"
    if isinstance(el, OptionalGroup):
        inner = "\n".join(_element_text(e, indent + "  ") for e in el.group.elements)
        return f"{indent}OPTIONAL {{\n{inner}\n{indent}}}"
    raise TypeError(f"unexpected element {el!r}")


def to_text(query: SelectQuery) -> str:
    """Normalized query text; parsing it back yields an equal AST."""
    parts = []
    for item in query.select:
        if isinstance(item, Aggregate):
            parts.append(f"({item.function}({item.var}) AS {item.alias})")
        else:
            parts.append(str(item))
    lines = [f"SELECT {' '.join(parts)}", "{"]
    lines.extend(_element_text(el, "  ") for el in query.where.elements)
    lines.append("}")
    if query.group_by is not None:
        lines.append(f"GROUP BY {query.group_by}")
    if query.order_by is not None:
        var, desc = query.order_by
        lines.append(f"ORDER BY {'DESC' if desc else 'ASC'}({var})")
    if query.limit is not None:
        lines.append(f"LIMIT {query.limit}")
    return "\n".join(lines) + "\n"
