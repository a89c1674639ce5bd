"""Turtle reading and writing for the subset the pipeline produces:
prefixed names or full IRIs, blank nodes, and literals with an optional
datatype or language tag.  Serialization is deterministic: sorted triples,
one per line, prefixed names wherever the fixed prefix table allows."""

from __future__ import annotations

import re

from citykg.kg.namespaces import PREFIXES
from citykg.kg.terms import BNode, IRI, Literal, Term, TripleSet, term_sort_key


class TurtleParseError(Exception):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_PN_LOCAL_SAFE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def _escape(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def _pname_or_iri(value: str) -> str:
    best = None
    for prefix, ns in PREFIXES.items():
        if value.startswith(ns):
            local = value[len(ns):]
            if _PN_LOCAL_SAFE.match(local):
                if best is None or len(ns) > len(PREFIXES[best[0]]):
                    best = (prefix, local)
    if best is not None:
        return f"{best[0]}:{best[1]}"
    return f"<{value}>"


def _format_term(term: Term) -> str:
    if isinstance(term, IRI):
        return _pname_or_iri(term.value)
    if isinstance(term, BNode):
        return f"_:{term.label}"
    body = f'"{_escape(term.lexical)}"'
    if term.language:
        return f"{body}@{term.language}"
    if term.datatype:
        return f"{body}^^{_pname_or_iri(term.datatype)}"
    return body


def serialize_turtle(ts: TripleSet) -> str:
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in PREFIXES.items()]
    lines.append("")
    triples = sorted(
        ts.triples(),
        key=lambda t: (term_sort_key(t[0]), term_sort_key(t[1]), term_sort_key(t[2])),
    )
    for s, p, o in triples:
        lines.append(f"{_format_term(s)} {_format_term(p)} {_format_term(o)} .")
    return "\n".join(lines) + "\n"


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1

    def error(self, message: str) -> TurtleParseError:
        return TurtleParseError(message, self.line)

    def _skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\n":
                self.line += 1
                self.pos += 1
            elif ch.isspace():
                self.pos += 1
            elif ch == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self.pos += 1
            else:
                return

    def next_token(self) -> tuple[str, str] | None:
        """(kind, value): iri, pname, bnode, literal-ish pieces, punct."""
        self._skip_ws()
        if self.pos >= len(self.text):
            return None
        ch = self.text[self.pos]
        if ch == "<":
            end = self.text.find(">", self.pos)
            if end < 0:
                raise self.error("unterminated IRI")
            value = self.text[self.pos + 1:end]
            self.pos = end + 1
            return ("iri", value)
        if ch == '"':
            return ("string", self._string())
        if ch in ".;,[]":
            self.pos += 1
            return ("punct", ch)
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            return ("punct", "^^")
        if ch == "@":
            start = self.pos + 1
            end = start
            while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "-"):
                end += 1
            word = self.text[start:end]
            self.pos = end
            return ("at", word)
        if ch == "_" and self.text.startswith("_:", self.pos):
            start = self.pos + 2
            end = start
            while end < len(self.text) and (self.text[end].isalnum() or self.text[end] in "_-"):
                end += 1
            label = self.text[start:end]
            self.pos = end
            return ("bnode", label)
        # prefixed name (or bare keyword like `a`)
        start = self.pos
        end = start
        while end < len(self.text) and not self.text[end].isspace() \
                and self.text[end] not in '";,':
            # a dot terminates a pname only at end of token
            if self.text[end] == "." and (end + 1 >= len(self.text)
                                          or self.text[end + 1].isspace()):
                break
            end += 1
        token = self.text[start:end]
        if not token:
            raise self.error(f"unexpected character {ch!r}")
        self.pos = end
        return ("pname", token)

    def _string(self) -> str:
        out = []
        i = self.pos + 1
        text = self.text
        while i < len(text):
            ch = text[i]
            if ch == "\\":
                if i + 1 >= len(text):
                    raise self.error("dangling escape")
                nxt = text[i + 1]
                if nxt == "u":
                    out.append(chr(int(text[i + 2:i + 6], 16)))
                    i += 6
                    continue
                if nxt == "U":
                    out.append(chr(int(text[i + 2:i + 10], 16)))
                    i += 10
                    continue
                if nxt not in _UNESCAPES:
                    raise self.error(f"unknown escape \\{nxt}")
                out.append(_UNESCAPES[nxt])
                i += 2
                continue
            if ch == '"':
                self.pos = i + 1
                return "".join(out)
            if ch == "\n":
                raise self.error("newline inside string literal")
            out.append(ch)
            i += 1
        raise self.error("unterminated string literal")


def parse_turtle(text: str) -> TripleSet:
    """Parse the supported Turtle subset; raises TurtleParseError with the
    line number on malformed input."""
    lex = _Lexer(text)
    prefixes = dict(PREFIXES)
    ts = TripleSet()

    def resolve_pname(token: str, lex: _Lexer) -> IRI:
        if token == "a":
            return IRI(prefixes["rdf"] + "type")
        prefix, sep, local = token.partition(":")
        if not sep or prefix not in prefixes:
            raise lex.error(f"undefined prefix in {token!r}")
        return IRI(prefixes[prefix] + local)

    def read_term(tok) -> Term:
        kind, value = tok
        if kind == "iri":
            return IRI(value)
        if kind == "bnode":
            return BNode(value)
        if kind == "pname":
            return resolve_pname(value, lex)
        if kind == "string":
            nxt_pos, nxt_line = lex.pos, lex.line
            nxt = lex.next_token()
            if nxt is not None and nxt == ("punct", "^^"):
                dtok = lex.next_token()
                if dtok is None or dtok[0] not in ("iri", "pname"):
                    raise lex.error("expected datatype IRI after ^^")
                dt = dtok[1] if dtok[0] == "iri" else resolve_pname(dtok[1], lex).value
                return Literal(value, datatype=dt)
            if nxt is not None and nxt[0] == "at":
                return Literal(value, language=nxt[1])
            lex.pos, lex.line = nxt_pos, nxt_line
            return Literal(value)
        raise lex.error(f"unexpected token {value!r}")

    while True:
        tok = lex.next_token()
        if tok is None:
            return ts
        if tok == ("at", "prefix"):
            name_tok = lex.next_token()
            iri_tok = lex.next_token()
            dot = lex.next_token()
            if name_tok is None or iri_tok is None or iri_tok[0] != "iri" \
                    or dot != ("punct", "."):
                raise lex.error("malformed @prefix directive")
            prefixes[name_tok[1].rstrip(":")] = iri_tok[1]
            continue
        subject = read_term(tok)
        while True:
            ptok = lex.next_token()
            if ptok is None:
                raise lex.error("unexpected end of input in triple")
            predicate = read_term(ptok)
            if not isinstance(predicate, IRI):
                raise lex.error("predicate must be an IRI")
            while True:
                otok = lex.next_token()
                if otok is None:
                    raise lex.error("unexpected end of input in triple")
                obj = read_term(otok)
                ts.add(subject, predicate, obj)
                punct = lex.next_token()
                if punct == ("punct", ","):
                    continue
                break
            if punct == ("punct", ";"):
                continue
            if punct == ("punct", "."):
                break
            raise lex.error(f"expected '.', ';' or ',', got {punct!r}")
