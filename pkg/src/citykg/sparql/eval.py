"""Query evaluation over a TripleSet.

Bag semantics throughout.  Basic graph patterns run as index nested-loop
joins, greedily ordered by the triple indexes' cardinality estimates;
OPTIONAL is a per-row left outer join; FILTERs apply to their whole group
with error-as-false; BIND errors leave the variable unbound.  ORDER BY
yields a deterministic total order by breaking ties with the canonical
term order over all projected variables.
"""

from __future__ import annotations

from dataclasses import dataclass

from citykg.kg.namespaces import XSD_INTEGER
from citykg.kg.terms import IRI, Literal, Term, TripleSet, term_sort_key
from citykg.sparql.ast import (
    Aggregate,
    Bind,
    Filter,
    Group,
    OptionalGroup,
    PropertyPath,
    SelectQuery,
    TriplePattern,
    ValuesClause,
    Var,
)
from citykg.sparql.functions import ExprError, effective_boolean, evaluate_expr, numeric_value

Binding = dict[str, Term]


@dataclass
class SolutionTable:
    variables: list[str]
    rows: list[list[Term | None]]

    def to_tsv(self) -> str:
        lines = ["\t".join(self.variables)]
        for row in self.rows:
            lines.append("\t".join(_plain(term) for term in row))
        return "\n".join(lines) + "\n"

    def pretty(self) -> str:
        cells = [[_plain(t) for t in row] for row in self.rows]
        widths = [len(v) for v in self.variables]
        for row in cells:
            for i, c in enumerate(row):
                widths[i] = max(widths[i], len(c))
        header = " | ".join(v.ljust(w) for v, w in zip(self.variables, widths))
        sep = "-+-".join("-" * w for w in widths)
        lines = [header, sep]
        for row in cells:
            lines.append(" | ".join(c.ljust(w) for c, w in zip(row, widths)))
        lines.append(f"({len(self.rows)} row{'s' if len(self.rows) != 1 else ''})")
        return "\n".join(lines) + "\n"


def _plain(term: Term | None) -> str:
    if term is None:
        return ""
    if isinstance(term, IRI):
        return term.value
    if isinstance(term, Literal):
        return term.lexical
    return str(term)


def _resolve(pattern, binding: Binding):
    if isinstance(pattern, Var):
        return binding.get(pattern.name)
    return pattern


def _match_single(ts: TripleSet, pattern: TriplePattern, binding: Binding):
    """Extend one binding over a single-predicate pattern."""
    s = _resolve(pattern.subject, binding)
    p = _resolve(pattern.predicate, binding)
    o = _resolve(pattern.object, binding)
    for ts_s, ts_p, ts_o in ts.triples(s, p, o):
        extended = dict(binding)
        ok = True
        for slot, value in ((pattern.subject, ts_s), (pattern.predicate, ts_p),
                            (pattern.object, ts_o)):
            if isinstance(slot, Var):
                bound = extended.get(slot.name)
                if bound is None:
                    extended[slot.name] = value
                elif bound != value:
                    ok = False
                    break
        if ok:
            yield extended


def _match_pattern(ts: TripleSet, pattern: TriplePattern, binding: Binding):
    """Single predicate or sequence path (existential intermediates)."""
    pred = pattern.predicate
    if not isinstance(pred, PropertyPath):
        yield from _match_single(ts, pattern, binding)
        return
    frontier = [(binding, _resolve(pattern.subject, binding))]
    steps = pred.steps
    for i, step in enumerate(steps):
        last = i == len(steps) - 1
        nxt = []
        for bnd, subject in frontier:
            target = pattern.object if last else None
            obj = _resolve(target, bnd) if last else None
            for ts_s, _, ts_o in ts.triples(subject, step, obj):
                extended = bnd
                if subject is None and isinstance(pattern.subject, Var):
                    extended = dict(extended)
                    extended[pattern.subject.name] = ts_s
                if last and isinstance(pattern.object, Var) and obj is None:
                    extended = dict(extended)
                    extended[pattern.object.name] = ts_o
                nxt.append((extended, ts_o))
        frontier = nxt
        if not frontier:
            return
    for bnd, _ in frontier:
        yield bnd


def _pattern_cost(ts: TripleSet, pattern: TriplePattern, bound: set[str]):
    """(estimated cardinality, -bound positions) for greedy ordering."""
    def slot(term):
        if isinstance(term, Var):
            return None
        return term

    pred = pattern.predicate
    p = None if isinstance(pred, (Var, PropertyPath)) else pred
    if isinstance(pred, PropertyPath):
        p = pred.steps[0]
    count = ts.count(slot(pattern.subject), p, None if isinstance(pred, PropertyPath)
                     else slot(pattern.object))
    bound_positions = sum(
        1 for term in (pattern.subject, pattern.object)
        if isinstance(term, Var) and term.name in bound
    )
    return (count, -bound_positions)


def _eval_bgp(ts: TripleSet, patterns: list[TriplePattern],
              rows: list[Binding]) -> list[Binding]:
    remaining = list(patterns)
    bound: set[str] = set()
    for row in rows[:1]:
        bound.update(row.keys())
    while remaining:
        best_i = min(range(len(remaining)),
                     key=lambda i: _pattern_cost(ts, remaining[i], bound))
        pattern = remaining.pop(best_i)
        rows = [ext for row in rows for ext in _match_pattern(ts, pattern, row)]
        if not rows:
            return []
        for term in (pattern.subject, pattern.object):
            if isinstance(term, Var):
                bound.add(term.name)
    return rows


def _eval_group(ts: TripleSet, group: Group, rows: list[Binding]) -> list[Binding]:
    filters: list[Filter] = []
    pending: list[TriplePattern] = []

    def flush():
        nonlocal rows, pending
        if pending:
            rows = _eval_bgp(ts, pending, rows)
            pending = []

    for element in group.elements:
        if isinstance(element, TriplePattern):
            pending.append(element)
            continue
        flush()
        if isinstance(element, Filter):
            filters.append(element)
        elif isinstance(element, Bind):
            out = []
            for row in rows:
                try:
                    value = evaluate_expr(element.expr, row)
                except ExprError:
                    value = None
                new = dict(row)
                if value is not None:
                    if element.var.name in new and new[element.var.name] != value:
                        continue
                    new[element.var.name] = value
                out.append(new)
            rows = out
        elif isinstance(element, ValuesClause):
            name = element.var.name
            out = []
            for row in rows:
                already = row.get(name)
                for value in element.values:
                    if already is not None and already != value:
                        continue
                    new = dict(row)
                    new[name] = value
                    out.append(new)
            rows = out
        elif isinstance(element, OptionalGroup):
            out = []
            for row in rows:
                extensions = _eval_group(ts, element.group, [row])
                out.extend(extensions if extensions else [row])
            rows = out
        else:
            raise TypeError(f"unexpected group element {element!r}")
    flush()

    for f in filters:
        kept = []
        for row in rows:
            try:
                if effective_boolean(evaluate_expr(f.expr, row)):
                    kept.append(row)
            except ExprError:
                pass  # error-as-false: the row is eliminated
        rows = kept
    return rows


def _aggregate(query: SelectQuery, rows: list[Binding]) -> list[Binding]:
    key_var = query.group_by
    groups: dict = {}
    order: list = []
    for row in rows:
        key = row.get(key_var.name) if key_var else None
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        members = groups[key]
        agg_row: Binding = {}
        if key_var is not None and key is not None:
            agg_row[key_var.name] = key
        for item in query.select:
            if isinstance(item, Aggregate):
                n = sum(1 for m in members if m.get(item.var.name) is not None)
                agg_row[item.alias.name] = Literal(str(n), datatype=XSD_INTEGER)
        out.append(agg_row)
    return out


def evaluate(query: SelectQuery, ts: TripleSet) -> SolutionTable:
    rows = _eval_group(ts, query.where, [{}])

    if query.group_by is not None or any(isinstance(i, Aggregate) for i in query.select):
        rows = _aggregate(query, rows)

    names = query.projected_names()

    if query.order_by is not None:
        var, descending = query.order_by

        def tiebreak(row: Binding):
            return tuple(term_sort_key(row[n]) if row.get(n) is not None else ()
                         for n in names)

        def primary(row: Binding):
            term = row.get(var.name)
            if term is None:
                return (0, 0.0, "")
            try:
                return (1, numeric_value(term), "")
            except ExprError:
                return (2, 0.0, str(term))

        rows.sort(key=tiebreak)
        rows.sort(key=primary, reverse=descending)

    if query.limit is not None:
        rows = rows[:query.limit]

    table_rows = [[row.get(n) for n in names] for row in rows]
    return SolutionTable(names, table_rows)
