"""Differential testing of the engine against the reference evaluators.

Random mode draws small graphs and schema-conforming queries from a seeded
generator. For every case the engine's response must equal the recursive
evaluator's, the raw query evaluated with field collection must agree with
its normal form, normalization must be idempotent, and the builder must
materialize each response node exactly once.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable, Optional, Sequence

from .executor import Engine
from .ntriples import XSD, Term, serialize_ntriples
from .operands import RDF_TYPE
from .oracle import GraphView, collecting_response, direct_response
from .query import (
    BOOLEAN_VALUE,
    FLOAT_VALUE,
    INT_VALUE,
    STRING_VALUE,
    Field,
    InlineFragment,
    QueryAst,
    Value,
    normalize,
    parse_query,
    print_query,
    validate_query,
)
from .response import response_nodes
from .schema import DIRECT, SCALARS, Schema, TermBinding, TypeRef, load_schema
from .store import TripleIndex, load_graph

MAX_TRIPLES = 50
MAX_DEPTH = 4


def default_schema_text() -> str:
    return resources.files("rdfgql").joinpath("data/shop.graphql").read_text(encoding="utf-8")


# literal pools shared by the data and the argument generator, so arguments hit
_POOLS = {
    "String": [("a", None), ("b", None), ("c", None)],
    "Int": [("1", XSD + "integer"), ("2", XSD + "integer"), ("3", XSD + "integer")],
    "Float": [("1.5", XSD + "decimal"), ("2.5", XSD + "decimal"), ("1e0", XSD + "double")],
    "Boolean": [("true", XSD + "boolean"), ("false", XSD + "boolean")],
}
_VALUE_KIND = {"String": STRING_VALUE, "Int": INT_VALUE, "Boolean": BOOLEAN_VALUE}


def _node_iri(base: str, type_name: str, i: int) -> str:
    return f"{base}{type_name.lower()}{i}"


class GraphGenerator:
    """Random triple sets shaped by a schema's bindings."""

    def __init__(self, schema: Schema, binding: TermBinding, rng: random.Random,
                 type_iri: str = RDF_TYPE, base: str = "http://data.example/"):
        self.schema = schema
        self.binding = binding
        self.rng = rng
        self.type_iri = type_iri
        self.base = base

    def nodes(self) -> dict[str, list[str]]:
        return {
            t: [_node_iri(self.base, t, i) for i in range(self.rng.randint(1, 3))]
            for t in sorted(self.schema.object_types) if t != self.schema.query_root
        }

    def literal(self, scalar: str, node: str) -> Term:
        rng = self.rng
        if scalar == "ID":
            return Term.literal(node)
        if rng.random() < 0.05:
            # ill-typed data must not break either evaluator
            scalar = rng.choice(sorted(_POOLS))
        lexical, datatype = rng.choice(_POOLS[scalar])
        return Term.literal(lexical, datatype)

    def generate(self, limit: int = MAX_TRIPLES) -> list[tuple[Term, Term, Term]]:
        rng = self.rng
        nodes = self.nodes()
        every = [n for ns in nodes.values() for n in ns]
        rdf_type = Term.iri(self.type_iri)
        typing, facts = [], []
        for t, names in nodes.items():
            abstract = [a for a in sorted(self.schema.interface_types | self.schema.union_types)
                        if t in self.schema.possible_types(a)]
            for n in names:
                if rng.random() < 0.9:
                    typing.append((Term.iri(n), rdf_type, Term.iri(self.binding.type_iri(t))))
                for a in abstract:
                    if rng.random() < 0.5:
                        typing.append((Term.iri(n), rdf_type, Term.iri(self.binding.type_iri(a))))
                if rng.random() < 0.1:
                    other = rng.choice(sorted(nodes))
                    typing.append((Term.iri(n), rdf_type, Term.iri(self.binding.type_iri(other))))
                facts.extend(self.facts(t, n, nodes, every))
        rng.shuffle(facts)
        triples = typing[:limit] + facts[: max(0, limit - len(typing))]
        return list(dict.fromkeys(triples))

    def facts(self, t: str, node: str, nodes, every) -> Iterable[tuple[Term, Term, Term]]:
        rng = self.rng
        for fdef in self.schema.types[t].fields.values():
            fb = self.binding.field(t, fdef.name)
            if fb.iri is None or rng.random() < 0.3:
                continue
            pred = Term.iri(fb.iri)
            count = rng.choice((1, 1, 1, 2)) if not fdef.type.is_list else rng.randint(0, 3)
            for _ in range(count):
                if fdef.type.name in SCALARS:
                    yield Term.iri(node), pred, self.literal(fdef.type.name, node)
                    continue
                pool = [n for c in self.schema.possible_types(fdef.type.name) for n in nodes.get(c, ())]
                if rng.random() < 0.1 or not pool:
                    pool = every
                if rng.random() < 0.05 and not fb.inverse:
                    yield Term.iri(node), pred, Term.literal("dangling")
                    continue
                target = Term.iri(rng.choice(pool))
                yield (target, pred, Term.iri(node)) if fb.inverse else (Term.iri(node), pred, target)


class QueryGenerator:
    """Random valid queries: aliases, repeated fields, fragments and arguments."""

    def __init__(self, schema: Schema, rng: random.Random, id_mode: str = DIRECT,
                 node_iris: Sequence[str] = (), max_depth: int = MAX_DEPTH):
        self.schema = schema
        self.rng = rng
        self.id_mode = id_mode
        self.node_iris = list(node_iris) or ["http://data.example/none"]
        self.max_depth = max_depth
        self._alias = 0
        self._keys: dict[str, tuple] = {}

    def value(self, scalar: str) -> Value:
        if scalar == "ID":
            return Value(STRING_VALUE, self.rng.choice(self.node_iris))
        if scalar == "Float":
            lexical, datatype = self.rng.choice(_POOLS["Float"])
            return Value(FLOAT_VALUE, lexical)
        lexical, _ = self.rng.choice(_POOLS[scalar])
        return Value(_VALUE_KIND[scalar], lexical)

    def query(self) -> QueryAst:
        self._alias = 0
        self._keys = {}
        return QueryAst(self.selections(self.schema.query_root, 0))

    def fragment_types(self, scope: str) -> list[str]:
        schema = self.schema
        if schema.is_abstract(scope):
            return [scope] + schema.possible_types(scope)
        return [scope] + sorted(a for a in schema.interface_types | schema.union_types
                                if scope in schema.possible_types(a))

    def fields(self, scope: str, depth: int) -> list[str]:
        t = self.schema.types[scope]
        names = list(t.fields)
        if depth + 1 >= self.max_depth:
            names = [n for n in names if t.fields[n].type.name in SCALARS]
        return names

    def selections(self, scope: str, depth: int, budget: int = 3) -> tuple:
        rng = self.rng
        schema = self.schema
        out: list = []
        for _ in range(rng.randint(1, budget)):
            names = [] if schema.kind(scope) == "union" else self.fields(scope, depth)
            if depth == 0:
                names = [n for n in names if scope == schema.query_root]
            if names and (rng.random() < 0.8 or scope == schema.query_root):
                out.append(self.field(scope, rng.choice(names), depth))
            elif scope != schema.query_root:
                frag = rng.choice(self.fragment_types(scope))
                inner = self.selections(frag, depth, 2)
                out.append(InlineFragment(frag, inner))
            if out and rng.random() < 0.15 and isinstance(out[-1], Field):
                # repeat a field so that normalization has something to merge
                prev = out[-1]
                if prev.selections is None:
                    out.append(prev)
                else:
                    out.append(Field(prev.name, prev.alias, prev.args,
                                     self.selections(schema.field(scope, prev.name).type.name, depth + 1, 2)))
        if not out:
            names = self.fields(scope, depth) if schema.kind(scope) != "union" else []
            if names:
                out.append(self.field(scope, names[0], depth))
            else:
                member = schema.possible_types(scope)[0]
                out.append(InlineFragment(member, self.selections(member, depth, 1)))
        return tuple(out)

    def field(self, scope: str, name: str, depth: int) -> Field:
        rng = self.rng
        fdef = self.schema.field(scope, name)
        alias = None
        if rng.random() < 0.2:
            self._alias += 1
            alias = f"a{self._alias}"
        args = tuple((a, self.value(ref.name)) for a, ref in fdef.args.items() if rng.random() < 0.35)
        if self._keys.setdefault(alias or name, (name, args)) != (name, args):
            # a response key may only ever stand for one field and argument set
            self._alias += 1
            alias = f"a{self._alias}"
            self._keys[alias] = (name, args)
        if fdef.type.name in SCALARS:
            return Field(name, alias, (), None)
        return Field(name, alias, args, self.selections(fdef.type.name, depth + 1))


@dataclass
class Mismatch:
    kind: str
    query: str
    expected: str
    actual: str
    triples: list = field(default_factory=list)

    def report(self) -> str:
        lines = [f"mismatch ({self.kind})", "query:", "  " + self.query.replace("\n", "\n  "),
                 f"expected: {self.expected}", f"actual:   {self.actual}"]
        if self.triples:
            lines.append("graph:")
            lines.append(serialize_ntriples(self.triples).rstrip("\n"))
        return "\n".join(lines)


def check_case(engine: Engine, ast: QueryAst, view: Optional[GraphView] = None) -> list[tuple[str, str, str]]:
    """All failed checks for one query as (kind, expected, actual)."""
    view = view or engine.view
    failures = []
    nq = normalize(engine.schema, ast)
    result = engine.execute(nq)
    actual = result.serialize()
    expected = direct_response(view, nq)
    if actual != expected:
        failures.append(("engine", expected, actual))
    collected = collecting_response(view, ast)
    if collected != expected:
        failures.append(("normalization", collected, expected))
    again = normalize(engine.schema, nq)
    if again != nq:
        failures.append(("idempotence", print_query(nq), print_query(again)))
    nodes = response_nodes(result.data)
    if result.materialized != nodes:
        failures.append(("materialization", str(nodes), str(result.materialized)))
    return failures


def _engine_for(schema, binding, triples, id_mode, type_iri) -> Engine:
    return Engine(schema, binding, load_graph(triples), id_mode=id_mode, type_iri=type_iri)


def minimize(triples: list, still_fails: Callable[[list], bool]) -> list:
    """Greedy one-triple-at-a-time reduction of a failing graph."""
    current = list(triples)
    changed = True
    while changed:
        changed = False
        for i in range(len(current)):
            trial = current[:i] + current[i + 1:]
            if still_fails(trial):
                current = trial
                changed = True
                break
    return current


@dataclass
class CompareReport:
    cases: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def compare_random(count: int, seed: int, schema_text: Optional[str] = None, id_mode: str = DIRECT,
                   type_iri: str = RDF_TYPE, max_triples: int = MAX_TRIPLES, max_depth: int = MAX_DEPTH,
                   engine_factory=None, stop_after: int = 5) -> CompareReport:
    schema, binding = load_schema(schema_text or default_schema_text(), id_mode)
    rng = random.Random(seed)
    factory = engine_factory or _engine_for
    report = CompareReport()
    for _ in range(count):
        triples = GraphGenerator(schema, binding, rng, type_iri).generate(max_triples)
        iris = sorted({s.lexical for s, _, _ in triples})
        ast = QueryGenerator(schema, rng, id_mode, iris, max_depth).query()
        errors = validate_query(schema, ast)
        if errors:
            raise AssertionError(f"generator produced an invalid query: {errors}\n{print_query(ast)}")
        report.cases += 1
        engine = factory(schema, binding, triples, id_mode, type_iri)
        failures = check_case(engine, ast)
        if not failures:
            continue
        kind = failures[0][0]

        def still_fails(subset, kind=kind, ast=ast):
            return any(k == kind for k, _, _ in check_case(factory(schema, binding, subset, id_mode, type_iri), ast))

        small = minimize(triples, still_fails)
        again = check_case(factory(schema, binding, small, id_mode, type_iri), ast)
        _, expected, actual = next((f for f in again if f[0] == kind), failures[0])
        report.mismatches.append(Mismatch(kind, print_query(ast), expected, actual, small))
        if stop_after and len(report.mismatches) >= stop_after:
            break
    return report


def compare_corpus(engine: Engine, queries: Iterable[tuple[str, str]]) -> CompareReport:
    """Check named query texts against an engine's loaded data."""
    report = CompareReport()
    for name, text in queries:
        ast = parse_query(text)
        errors = validate_query(engine.schema, ast)
        if errors:
            raise AssertionError(f"{name}: {errors}")
        report.cases += 1
        for kind, expected, actual in check_case(engine, ast):
            report.mismatches.append(Mismatch(kind, f"# {name}\n{text.strip()}", expected, actual))
    return report
