"""Recursive-descent parser for the supported SPARQL subset.

Covered: SELECT with variables and (COUNT(?v) AS ?alias), optional WHERE
keyword, basic graph patterns with `a` and fixed-length `/` property paths,
FILTER with >, <, =, != and CONTAINS, VALUES over one variable, OPTIONAL,
BIND, GROUP BY, ORDER BY ASC/DESC, LIMIT, and the GeoSPARQL functions
geof:buffer / geof:sfIntersects.  PREFIX declarations are accepted; the
fixed namespace table is preloaded so the bundled queries run verbatim.
Anything outside the subset raises UnsupportedFeature naming the construct.
"""

from __future__ import annotations

import re

from citykg.kg.namespaces import PREFIXES, XSD_DECIMAL, XSD_INTEGER
from citykg.kg.terms import IRI, Literal
from citykg.sparql.ast import (
    Aggregate,
    Bind,
    Comparison,
    Filter,
    FunctionCall,
    Group,
    OptionalGroup,
    PropertyPath,
    SelectQuery,
    TermExpr,
    TriplePattern,
    ValuesClause,
    Var,
    VarExpr,
)


class QueryParseError(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnsupportedFeature(QueryParseError):
    def __init__(self, construct: str, position: int):
        super().__init__(f"unsupported construct: {construct}", position)
        self.construct = construct


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
    | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
    | (?P<iri><[^<>\s]*>)
    | (?P<string>"(?:[^"\\]|\\.)*")
    | (?P<number>[+-]?\d+(?:\.\d+)?)
    | (?P<pname>[A-Za-z_][A-Za-z0-9_.-]*)?:(?P<local>[A-Za-z0-9_.-]*)
    | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<punct>\(|\)|\{|\}|\.|/|,|\*|\^\^|!=|=|>|<)
    """,
    re.VERBOSE,
)

_UNESCAPE = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QueryParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws" and m.lastgroup is not None:
            kind = m.lastgroup
            value = m.group(0)
            if kind == "local":
                kind = "pname"
            out.append((kind, value, pos))
        elif m.group("ws") is None:
            # pname with empty local part matched via the colon branch
            out.append(("pname", m.group(0), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


def _unescape_string(raw: str) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        if body[i] == "\\" and i + 1 < len(body):
            out.append(_UNESCAPE.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(body[i])
            i += 1
    return "".join(out)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes = dict(PREFIXES)

    # -- token helpers ------------------------------------------------------

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str) -> QueryParseError:
        return QueryParseError(message, self.peek()[2])

    def at_word(self, *words: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "word" and value.upper() in words

    def expect_word(self, word: str):
        if not self.at_word(word):
            raise self.error(f"expected {word}")
        return self.next()

    def at_punct(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return kind == "punct" and v == value

    def expect_punct(self, value: str):
        if not self.at_punct(value):
            raise self.error(f"expected {value!r}")
        return self.next()

    def resolve_pname(self, token: str, pos: int) -> IRI:
        prefix, _, local = token.partition(":")
        if prefix not in self.prefixes:
            raise QueryParseError(f"unknown prefix {prefix!r}", pos)
        return IRI(self.prefixes[prefix] + local)

    # -- grammar ------------------------------------------------------------

    def parse_query(self) -> SelectQuery:
        while self.at_word("PREFIX"):
            self.next()
            kind, value, pos = self.next()
            if kind != "pname":
                raise QueryParseError("expected prefix name", pos)
            name = value[:-len(value.partition(":")[2]) - 1] if ":" in value else value
            kind2, iri, pos2 = self.next()
            if kind2 != "iri":
                raise QueryParseError("expected IRI after prefix name", pos2)
            self.prefixes[name] = iri[1:-1]
        if self.at_word("CONSTRUCT", "ASK", "DESCRIBE"):
            raise UnsupportedFeature(self.peek()[1].upper(), self.peek()[2])
        self.expect_word("SELECT")
        select = self.parse_select_list()
        if self.at_word("WHERE"):
            self.next()
        where = self.parse_group()
        group_by = None
        order_by = None
        limit = None
        while self.peek()[0] != "eof":
            if self.at_word("GROUP"):
                self.next()
                self.expect_word("BY")
                group_by = self.parse_var()
            elif self.at_word("ORDER"):
                self.next()
                self.expect_word("BY")
                desc = False
                if self.at_word("DESC"):
                    self.next()
                    desc = True
                elif self.at_word("ASC"):
                    self.next()
                self.expect_punct("(")
                var = self.parse_var()
                self.expect_punct(")")
                order_by = (var, desc)
            elif self.at_word("LIMIT"):
                self.next()
                kind, value, pos = self.next()
                if kind != "number" or "." in value:
                    raise QueryParseError("LIMIT needs an integer", pos)
                limit = int(value)
            else:
                raise UnsupportedFeature(self.peek()[1], self.peek()[2])
        return SelectQuery(tuple(select), where, group_by, order_by, limit)

    def parse_select_list(self):
        items = []
        while True:
            kind, value, pos = self.peek()
            if kind == "punct" and value == "*":
                raise UnsupportedFeature("SELECT *", pos)
            if kind == "var":
                items.append(self.parse_var())
            elif kind == "punct" and value == "(":
                self.next()
                fn = self.next()
                if fn[0] != "word" or fn[1].upper() != "COUNT":
                    raise UnsupportedFeature(f"aggregate {fn[1]}", fn[2])
                self.expect_punct("(")
                var = self.parse_var()
                self.expect_punct(")")
                self.expect_word("AS")
                alias = self.parse_var()
                self.expect_punct(")")
                items.append(Aggregate("COUNT", var, alias))
            else:
                break
        if not items:
            raise self.error("empty SELECT list")
        return items

    def parse_var(self) -> Var:
        kind, value, pos = self.next()
        if kind != "var":
            raise QueryParseError(f"expected a variable, got {value!r}", pos)
        return Var(value[1:])

    def parse_group(self) -> Group:
        self.expect_punct("{")
        elements: list = []
        while not self.at_punct("}"):
            kind, value, pos = self.peek()
            if kind == "word" and value.upper() == "FILTER":
                self.next()
                self.expect_punct("(")
                expr = self.parse_expr()
                self.expect_punct(")")
                elements.append(Filter(expr))
            elif kind == "word" and value.upper() == "OPTIONAL":
                self.next()
                elements.append(OptionalGroup(self.parse_group()))
            elif kind == "word" and value.upper() == "BIND":
                self.next()
                self.expect_punct("(")
                expr = self.parse_expr()
                self.expect_word("AS")
                var = self.parse_var()
                self.expect_punct(")")
                elements.append(Bind(expr, var))
            elif kind == "word" and value.upper() == "VALUES":
                self.next()
                var = self.parse_var()
                self.expect_punct("{")
                values = []
                while not self.at_punct("}"):
                    values.append(self.parse_term())
                self.expect_punct("}")
                elements.append(ValuesClause(var, tuple(values)))
            elif kind == "word" and value.upper() in ("MINUS", "UNION", "GRAPH", "SERVICE"):
                raise UnsupportedFeature(value.upper(), pos)
            else:
                elements.extend(self.parse_triple_block())
            if self.at_punct("."):
                self.next()
        self.expect_punct("}")
        return Group(tuple(elements))

    def parse_triple_block(self) -> list[TriplePattern]:
        subject = self.parse_term_pattern()
        path = self.parse_path()
        obj = self.parse_term_pattern()
        predicate = path[0] if len(path) == 1 else PropertyPath(tuple(path))
        return [TriplePattern(subject, predicate, obj)]

    def parse_path(self):
        steps = [self.parse_predicate()]
        while self.at_punct("/"):
            self.next()
            nxt = self.parse_predicate()
            if isinstance(nxt, Var) or isinstance(steps[0], Var):
                raise UnsupportedFeature("variable inside a property path", self.peek()[2])
            steps.append(nxt)
        return steps

    def parse_predicate(self):
        kind, value, pos = self.peek()
        if kind == "word" and value == "a":
            self.next()
            return IRI(self.prefixes["rdf"] + "type")
        if kind in ("pname", "iri", "var"):
            term = self.parse_term_pattern()
            if isinstance(term, Literal):
                raise QueryParseError("literal in predicate position", pos)
            return term
        raise QueryParseError(f"expected a predicate, got {value!r}", pos)

    def parse_term(self):
        term = self.parse_term_pattern()
        if isinstance(term, Var):
            raise self.error("expected a constant term")
        return term

    def parse_term_pattern(self):
        kind, value, pos = self.next()
        if kind == "var":
            return Var(value[1:])
        if kind == "iri":
            return IRI(value[1:-1])
        if kind == "pname":
            return self.resolve_pname(value, pos)
        if kind == "string":
            if self.at_punct("^^"):
                self.next()
                dkind, dvalue, dpos = self.next()
                if dkind == "iri":
                    return Literal(_unescape_string(value), datatype=dvalue[1:-1])
                if dkind == "pname":
                    return Literal(_unescape_string(value),
                                   datatype=self.resolve_pname(dvalue, dpos).value)
                raise QueryParseError("expected datatype IRI after ^^", dpos)
            return Literal(_unescape_string(value))
        if kind == "number":
            dt = XSD_DECIMAL if "." in value else XSD_INTEGER
            return Literal(value, datatype=dt)
        raise QueryParseError(f"expected a term, got {value!r}", pos)

    def parse_expr(self):
        left = self.parse_primary()
        kind, value, _ = self.peek()
        if kind == "punct" and value in (">", "<", "=", "!="):
            self.next()
            right = self.parse_primary()
            return Comparison(value, left, right)
        return left

    def parse_primary(self):
        kind, value, pos = self.peek()
        if kind == "punct" and value == "(":
            self.next()
            inner = self.parse_expr()
            self.expect_punct(")")
            return inner
        if kind == "var":
            self.next()
            return VarExpr(Var(value[1:]))
        if kind == "word" and value.upper() in ("CONTAINS", "STR", "BOUND"):
            name = value.upper()
            if name != "CONTAINS":
                raise UnsupportedFeature(f"function {name}", pos)
            self.next()
            return FunctionCall("CONTAINS", self.parse_args())
        if kind in ("pname", "iri"):
            # extension function call or plain term
            term = self.parse_term_pattern()
            if isinstance(term, IRI) and self.at_punct("("):
                return FunctionCall(term.value, self.parse_args())
            return TermExpr(term)
        if kind in ("string", "number"):
            return TermExpr(self.parse_term_pattern())
        raise QueryParseError(f"unexpected token {value!r} in expression", pos)

    def parse_args(self):
        self.expect_punct("(")
        args = [self.parse_expr()]
        while self.at_punct(","):
            self.next()
            args.append(self.parse_expr())
        self.expect_punct(")")
        return tuple(args)


def parse_query(text: str) -> SelectQuery:
    """Parse a query; QueryParseError carries the character offset."""
    return _Parser(text).parse_query()
