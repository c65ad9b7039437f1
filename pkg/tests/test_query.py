import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdfgql import normalize, parse_query, validate_query
from rdfgql.compare import QueryGenerator, default_schema_text
from rdfgql.errors import QuerySyntaxError, QueryValidationError
from rdfgql.query import Field, InlineFragment, prepare_query, print_query
from rdfgql.schema import load_schema
from conftest import PEOPLE, read

import random

PEOPLE_SCHEMA, _ = load_schema(read(PEOPLE / "schema.graphql"))
SHOP_SCHEMA, _ = load_schema(default_schema_text())


def test_doe_people_structure():
    ast = parse_query(read(PEOPLE / "doe_people.graphql"))
    [people] = ast.selections
    assert people.name == "people"
    assert [(a, v.lexical) for a, v in people.args] == [("lname", "Doe")]
    assert [s.name for s in people.selections] == ["fname", "email"]
    assert validate_query(PEOPLE_SCHEMA, ast) == []


@pytest.mark.parametrize("text", ["{", "{ people(lname: ) { fname } }", "{ people @skip { x } }",
                                  "mutation { x }", "{ people { fname } } trailing"])
def test_syntax_errors(text):
    with pytest.raises(QuerySyntaxError) as info:
        parse_query(text)
    assert info.value.location is not None
    assert str(info.value).startswith("syntax error: ")


@pytest.mark.parametrize("text, fragment", [
    ("{ people { nope } }", "unknown field nope"),
    ("{ people(lname: 3) { fname } }", "expects String"),
    ("{ people }", "needs a selection"),
    ("{ people { fname { x } } }", "selection on scalar"),
    ("{ companies { ... on Person { fname } } }", "can never apply"),
])
def test_validation_errors(text, fragment):
    errors = validate_query(PEOPLE_SCHEMA, parse_query(text))
    assert any(fragment in e for e in errors)


def test_alias_conflict_rejected():
    with pytest.raises(QueryValidationError):
        prepare_query(PEOPLE_SCHEMA, "{ people { a: fname a: lname } }")


def test_depth_limit():
    with pytest.raises(QueryValidationError, match="depth"):
        prepare_query(PEOPLE_SCHEMA, "{ companies { employees { fname } } }", depth_limit=1)


def test_normalize_expands_interface_selections():
    ast = parse_query("{ nodes { id ... on Customer { age } } }")
    norm = normalize(SHOP_SCHEMA, ast)
    [nodes] = norm.selections
    fragments = [s for s in nodes.selections if isinstance(s, InlineFragment)]
    assert sorted(f.type_name for f in fragments) == ["Customer", "Maker", "Order", "Product"]
    for f in fragments:
        assert all(isinstance(s, Field) for s in f.selections)
        assert f.selections[0].name == "id"
    customer = next(f for f in fragments if f.type_name == "Customer")
    assert [s.name for s in customer.selections] == ["id", "age"]


def test_normalize_merges_repeated_fields():
    norm = normalize(PEOPLE_SCHEMA, parse_query("{ people { fname } people { email fname } }"))
    [people] = norm.selections
    assert [s.name for s in people.selections] == ["fname", "email"]


def test_print_parse_round_trip():
    ast = parse_query(read(PEOPLE / "company_staff.graphql"))
    assert parse_query(print_query(ast)) == ast


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_normalize_is_idempotent(seed):
    ast = QueryGenerator(SHOP_SCHEMA, random.Random(seed)).query()
    assert validate_query(SHOP_SCHEMA, ast) == []
    once = normalize(SHOP_SCHEMA, ast)
    assert normalize(SHOP_SCHEMA, once) == once
    assert print_query(normalize(SHOP_SCHEMA, once)) == print_query(once)


def test_normal_form_may_hold_empty_selection_sets():
    # no field applies to a Customer that is also a Maker
    ast = parse_query("{ parties { ... on Customer { ... on Maker { id } } } }")
    [parties] = normalize(SHOP_SCHEMA, ast).selections
    assert parties.selections == ()
