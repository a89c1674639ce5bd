"""Materialization: expand every mapping rule over the store, deduplicate,
and close the graph under the declared subproperty axioms."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from citykg.kg.namespaces import RDFS_SUBPROPERTY
from citykg.kg.rules import MappingRule, SchemaAxioms, expand_rule, parse_rules, validate_rule
from citykg.kg.terms import IRI, TripleSet
from citykg.store import CityStore


def load_rules(path: str | Path | None = None) -> tuple[list[MappingRule], SchemaAxioms]:
    """Rules from a file, or the packaged default set."""
    if path is None:
        text = resources.files("citykg").joinpath("data/default.rules").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return parse_rules(text)


def materialize(store: CityStore, rules: list[MappingRule] | None = None,
                axioms: SchemaAxioms | None = None) -> TripleSet:
    """Expand all rules into one deduplicated triple set.

    Subproperty closure is applied to the instance level (every asserted
    (s, sub, o) also asserts (s, super, o)) and the axioms themselves are
    emitted as rdfs:subPropertyOf triples.
    """
    if rules is None:
        rules, axioms = load_rules()
    axioms = axioms or SchemaAxioms()
    for rule in rules:
        validate_rule(rule, store)
    ts = TripleSet()
    for rule in rules:
        expand_rule(rule, store, ts)

    closure = axioms.closure()
    for sub, supers in sorted(closure.items()):
        sub_iri = IRI(sub)
        for sup in sorted(supers):
            ts.add(sub_iri, RDFS_SUBPROPERTY, IRI(sup))
        asserted = list(ts.triples(p=sub_iri))
        for s, _, o in asserted:
            for sup in supers:
                ts.add(s, IRI(sup), o)
    return ts
