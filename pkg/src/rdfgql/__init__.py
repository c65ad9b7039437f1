"""GraphQL queries evaluated natively over RDF graphs with a multi-way left join."""

from .executor import Engine, Result
from .ntriples import Term, parse_ntriples
from .query import normalize, parse_query, validate_query
from .schema import load_schema, parse_sdl, validate_schema
from .store import TripleIndex, load_graph

__all__ = [
    "Engine",
    "Result",
    "Term",
    "TripleIndex",
    "load_graph",
    "load_schema",
    "normalize",
    "parse_ntriples",
    "parse_query",
    "parse_sdl",
    "validate_query",
    "validate_schema",
]
