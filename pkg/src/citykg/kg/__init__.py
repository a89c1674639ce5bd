"""RDF model: terms, triple set, namespaces, mapping rules, Turtle I/O."""

from citykg.kg.materialize import load_rules, materialize
from citykg.kg.namespaces import PREFIXES, expand
from citykg.kg.rules import MappingRule, RuleError, SchemaAxioms, expand_rule, parse_rules
from citykg.kg.terms import BNode, IRI, Literal, Term, Triple, TripleSet, term_sort_key
from citykg.kg.turtle import TurtleParseError, parse_turtle, serialize_turtle

__all__ = [
    "BNode",
    "IRI",
    "Literal",
    "MappingRule",
    "PREFIXES",
    "RuleError",
    "SchemaAxioms",
    "Term",
    "Triple",
    "TripleSet",
    "TurtleParseError",
    "expand",
    "expand_rule",
    "load_rules",
    "materialize",
    "parse_rules",
    "parse_turtle",
    "serialize_turtle",
    "term_sort_key",
]
