import json
from functools import lru_cache

import pytest

from rdfgql import Engine
from rdfgql.ntriples import XSD, Term
from rdfgql.response import cardinality_message, count_nodes, render_scalar, response_nodes, serialize
from conftest import PEOPLE, read
from corpus import cases

CASES = list(cases())


@lru_cache(maxsize=None)
def engine_for(schema, data) -> Engine:
    return Engine.from_files(schema, data)


@pytest.mark.parametrize("name, schema, data, query, golden", CASES, ids=[c[0] for c in CASES])
def test_corpus_matches_golden(name, schema, data, query, golden):
    engine = engine_for(schema, data)
    result = engine.execute(query)
    assert result.serialize() == golden
    assert engine.oracle(query) == golden


@pytest.mark.parametrize("name, schema, data, query, golden", CASES, ids=[c[0] for c in CASES])
def test_each_node_materialized_once(name, schema, data, query, golden):
    result = engine_for(schema, data).execute(query)
    assert result.materialized == response_nodes(json.loads(golden)["data"])


def test_doe_people_counts(people_engine, doe_people):
    result = people_engine.execute(doe_people)
    # two person objects and three scalar values from three mappings sharing x
    assert result.materialized == 5
    assert result.stats.emitted == 3


@pytest.mark.parametrize("term, scalar, value", [
    (Term.literal("42", XSD + "integer"), "Int", 42),
    (Term.literal("x", XSD + "integer"), "Int", "x"),
    (Term.literal("2.5", XSD + "decimal"), "Float", 2.5),
    (Term.literal("1e400"), "Float", "1e400"),
    (Term.literal("true", XSD + "boolean"), "Boolean", True),
    (Term.literal("false"), "Boolean", False),
    (Term.literal("yes"), "Boolean", "yes"),
    (Term.literal("Jon"), "String", "Jon"),
    (Term.iri("http://a/b"), "String", "http://a/b"),
])
def test_render_scalar(term, scalar, value):
    assert render_scalar(term, scalar) == value


def test_serialize_is_compact_and_sorts_errors():
    text = serialize({"a": ["é"]}, ["b", "a", "b"])
    assert text == '{"data":{"a":["é"]},"errors":[{"message":"a"},{"message":"b"}]}'
    assert serialize({}) == '{"data":{}}'


def test_cardinality_message():
    assert cardinality_message(("a", "b"), Term.iri("http://x")) == \
        "field a.b has several values at <http://x>; the first one is kept"
    assert cardinality_message(("a",), None).endswith("at the query root; the first one is kept")


def test_node_counting():
    assert count_nodes(None) == 0
    assert count_nodes([1, {"a": None, "b": [2, 3]}]) == 4
    assert response_nodes({"people": [{"fname": "Jon"}]}) == 2


def test_single_valued_field_keeps_first():
    text = '{ people { fname } }'
    engine = Engine.from_text(
        read(PEOPLE / "schema.graphql"),
        '<http://www.exmpl.org/p1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.exmpl.org/Person> .\n'
        '<http://www.exmpl.org/p1> <http://www.exmpl.org/fname> "A" .\n'
        '<http://www.exmpl.org/p1> <http://www.exmpl.org/fname> "B" .\n',
    )
    out = json.loads(engine.query(text))
    assert out["data"] == {"people": [{"fname": "A"}]}
    assert out["errors"] == [{"message": "field people.fname has several values at <http://www.exmpl.org/p1>; "
                                         "the first one is kept"}]
    assert engine.query(text) == engine.oracle(text)

