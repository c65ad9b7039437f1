"""Query execution facade: schema + data in, response documents out."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .engine import ExecutionStats, Executor
from .ntriples import parse_ntriples
from .operands import RDF_TYPE, Operands, build_dependency_graph, generate_operands
from .oracle import GraphView, collecting_response, direct_response
from .query import NormalizedQuery, QueryAst, normalize, prepare_query
from .response import ResponseBuilder, serialize
from .schema import DIRECT, ID_MODES, Schema, TermBinding, load_schema
from .store import TripleIndex, load_graph

DEFAULT_DEPTH_LIMIT = 32


@dataclass
class Result:
    data: dict
    errors: list[str]
    stats: ExecutionStats
    materialized: int
    elapsed: float = 0.0
    operands: Optional[Operands] = field(default=None, repr=False)

    def serialize(self) -> str:
        return serialize(self.data, self.errors)


class Engine:
    def __init__(self, schema: Schema, binding: TermBinding, index: TripleIndex, id_mode: str = DIRECT,
                 type_iri: str = RDF_TYPE, depth_limit: int = DEFAULT_DEPTH_LIMIT):
        if id_mode not in ID_MODES:
            raise ValueError(f"unknown id mode {id_mode!r}")
        if depth_limit < 1:
            raise ValueError("depth limit must be at least 1")
        self.schema = schema
        self.binding = binding
        self.index = index
        self.id_mode = id_mode
        self.type_iri = type_iri
        self.depth_limit = depth_limit
        self._view: Optional[GraphView] = None

    @classmethod
    def from_text(cls, sdl: str, ntriples: Union[str, bytes], **options) -> "Engine":
        schema, binding = load_schema(sdl, options.get("id_mode", DIRECT))
        return cls(schema, binding, load_graph(parse_ntriples(ntriples)), **options)

    @classmethod
    def from_files(cls, schema_path, data_path, **options) -> "Engine":
        sdl = Path(schema_path).read_text(encoding="utf-8")
        schema, binding = load_schema(sdl, options.get("id_mode", DIRECT))
        with open(data_path, encoding="utf-8") as fh:
            index = load_graph(parse_ntriples(fh))
        return cls(schema, binding, index, **options)

    def prepare(self, query: Union[str, QueryAst, NormalizedQuery]) -> NormalizedQuery:
        if isinstance(query, str):
            return prepare_query(self.schema, query, self.depth_limit)
        if isinstance(query, NormalizedQuery):
            return query
        return normalize(self.schema, query)

    def plan(self, query: NormalizedQuery):
        operands = generate_operands(self.schema, self.binding, query, self.index, self.id_mode, self.type_iri)
        return operands, build_dependency_graph(operands, query)

    def execute(self, query: Union[str, QueryAst, NormalizedQuery], timeout: Optional[float] = None) -> Result:
        start = time.perf_counter()
        nq = self.prepare(query)
        operands, graph = self.plan(nq)
        deadline = None if timeout is None else time.monotonic() + timeout
        builder = ResponseBuilder(operands, self.index)
        executor = Executor(self.index, operands, graph, deadline)
        executor.run(builder.add)
        data, errors = builder.result()
        return Result(data, errors, executor.stats, builder.materialized, time.perf_counter() - start, operands)

    def query(self, text: str, timeout: Optional[float] = None) -> str:
        return self.execute(text, timeout).serialize()

    @property
    def view(self) -> GraphView:
        if self._view is None:
            self._view = GraphView(self.index, self.schema, self.binding, self.id_mode, self.type_iri)
        return self._view

    def oracle(self, query: Union[str, QueryAst, NormalizedQuery]) -> str:
        """Reference response from the recursive evaluator."""
        return direct_response(self.view, self.prepare(query))

    def collecting_oracle(self, query: QueryAst) -> str:
        """Reference response for a raw, unnormalized query."""
        return collecting_response(self.view, query)
