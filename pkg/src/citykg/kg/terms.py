"""RDF terms and the dictionary-encoded triple set.

Terms are interned into integer ids; triples live in SPO/POS/OSP nested
indexes so any bound/unbound pattern combination has a cheap access path.
The set is immutable by convention once handed to the query engine.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class IRI:
    value: str

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class BNode:
    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str | None = None
    language: str | None = None

    def __str__(self) -> str:
        if self.language:
            return f'"{self.lexical}"@{self.language}'
        if self.datatype:
            return f'"{self.lexical}"^^<{self.datatype}>'
        return f'"{self.lexical}"'


Term = IRI | BNode | Literal
Triple = tuple[Term, Term, Term]


def term_sort_key(term: Term) -> tuple:
    """Canonical total order over terms: IRIs, then blanks, then literals,
    each alphabetically.  Used for deterministic serialization and as the
    ORDER BY tie-breaker."""
    if isinstance(term, IRI):
        return (0, term.value, "", "")
    if isinstance(term, BNode):
        return (1, term.label, "", "")
    return (2, term.lexical, term.datatype or "", term.language or "")


class TripleSet:
    """Set-semantics triple store with term interning."""

    def __init__(self):
        self._terms: list[Term] = []
        self._ids: dict[Term, int] = {}
        self._spo: dict[int, dict[int, set[int]]] = {}
        self._pos: dict[int, dict[int, set[int]]] = {}
        self._osp: dict[int, dict[int, set[int]]] = {}
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def intern(self, term: Term) -> int:
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._terms.append(term)
            self._ids[term] = tid
        return tid

    def term(self, tid: int) -> Term:
        return self._terms[tid]

    def term_id(self, term: Term) -> int | None:
        return self._ids.get(term)

    def add(self, s: Term, p: Term, o: Term) -> bool:
        si, pi, oi = self.intern(s), self.intern(p), self.intern(o)
        objects = self._spo.setdefault(si, {}).setdefault(pi, set())
        if oi in objects:
            return False
        objects.add(oi)
        self._pos.setdefault(pi, {}).setdefault(oi, set()).add(si)
        self._osp.setdefault(oi, {}).setdefault(si, set()).add(pi)
        self._size += 1
        return True

    def __contains__(self, triple: Triple) -> bool:
        si = self._ids.get(triple[0])
        pi = self._ids.get(triple[1])
        oi = self._ids.get(triple[2])
        if si is None or pi is None or oi is None:
            return False
        return oi in self._spo.get(si, {}).get(pi, set())

    def triples(self, s: Term | None = None, p: Term | None = None,
                o: Term | None = None):
        """All triples matching the pattern (None = wildcard)."""
        si = self._ids.get(s) if s is not None else None
        pi = self._ids.get(p) if p is not None else None
        oi = self._ids.get(o) if o is not None else None
        if (s is not None and si is None) or (p is not None and pi is None) \
                or (o is not None and oi is None):
            return
        t = self._terms
        if si is not None:
            by_p = self._spo.get(si, {})
            if pi is not None:
                objects = by_p.get(pi, ())
                if oi is not None:
                    if oi in objects:
                        yield (s, p, o)
                else:
                    for obj in objects:
                        yield (s, p, t[obj])
            elif oi is not None:
                for pred in self._osp.get(oi, {}).get(si, ()):
                    yield (s, t[pred], o)
            else:
                for pred, objects in by_p.items():
                    for obj in objects:
                        yield (s, t[pred], t[obj])
        elif pi is not None:
            by_o = self._pos.get(pi, {})
            if oi is not None:
                for subj in by_o.get(oi, ()):
                    yield (t[subj], p, o)
            else:
                for obj, subjects in by_o.items():
                    for subj in subjects:
                        yield (t[subj], p, t[obj])
        elif oi is not None:
            for subj, preds in self._osp.get(oi, {}).items():
                for pred in preds:
                    yield (t[subj], t[pred], o)
        else:
            for subj, by_p in self._spo.items():
                for pred, objects in by_p.items():
                    for obj in objects:
                        yield (t[subj], t[pred], t[obj])

    def count(self, s: Term | None = None, p: Term | None = None,
              o: Term | None = None) -> int:
        """Cardinality estimate (exact for <=1 unbound position, an upper
        bound otherwise); used for greedy join ordering."""
        si = self._ids.get(s) if s is not None else None
        pi = self._ids.get(p) if p is not None else None
        oi = self._ids.get(o) if o is not None else None
        if (s is not None and si is None) or (p is not None and pi is None) \
                or (o is not None and oi is None):
            return 0
        if si is not None and pi is not None and oi is not None:
            return 1 if oi in self._spo.get(si, {}).get(pi, set()) else 0
        if si is not None and pi is not None:
            return len(self._spo.get(si, {}).get(pi, ()))
        if pi is not None and oi is not None:
            return len(self._pos.get(pi, {}).get(oi, ()))
        if si is not None and oi is not None:
            return len(self._osp.get(oi, {}).get(si, ()))
        if si is not None:
            return sum(len(objs) for objs in self._spo.get(si, {}).values())
        if pi is not None:
            return sum(len(subjs) for subjs in self._pos.get(pi, {}).values())
        if oi is not None:
            return sum(len(preds) for preds in self._osp.get(oi, {}).values())
        return self._size

    def equal_set(self, other: "TripleSet") -> bool:
        if len(self) != len(other):
            return False
        return all(t in other for t in self.triples())
