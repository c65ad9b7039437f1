import pytest

from rdfgql.errors import SchemaError, SchemaValidationError
from rdfgql.schema import JOIN, load_schema, parse_sdl, print_sdl, validate_schema
from conftest import EX, PEOPLE, read


def codes(text, id_mode="direct"):
    try:
        schema, binding = parse_sdl(text)
    except SchemaValidationError as exc:
        return sorted(e.code for e in exc.errors)
    except SchemaError as exc:
        return [exc.code]
    return sorted(e.code for e in validate_schema(schema, binding, id_mode))


def test_plain_example_schema_parses():
    schema, binding = parse_sdl(read(PEOPLE / "schema_plain.graphql"))
    assert schema.object_types == {"Person", "Company", "Query"}
    assert schema.interface_types == {"Entity"}
    assert schema.impls_of("Entity") == {"Person", "Company"}
    assert schema.args_of("Query", "people") == {"lname"}
    assert schema.fields_of("Company") == {"id", "name", "email", "employees"}
    assert schema.type_of("Company", "employees").is_list


def test_plain_schema_lacks_bindings():
    schema, binding = parse_sdl(read(PEOPLE / "schema_plain.graphql"))
    assert "missing-uri" in {e.code for e in validate_schema(schema, binding)}


def test_bound_schema_is_valid():
    schema, binding = load_schema(read(PEOPLE / "schema.graphql"))
    assert binding.type_iri("Company") == EX + "Company"
    assert binding.field("Company", "employees").filter
    # implementations inherit the interface's field binding
    assert binding.field("Person", "email").iri == EX + "email"


def test_round_trip_through_printer():
    schema, binding = load_schema(read(PEOPLE / "schema.graphql"))
    again, again_binding = load_schema(print_sdl(schema, binding))
    assert print_sdl(again, again_binding) == print_sdl(schema, binding)


HEADER = 'type Query { a: [A] }\ntype A @uri(value: "a") { x: String @uri(value: "x") }\n'


@pytest.mark.parametrize("text, code", [
    ("type Query { a: Foo }", "unknown-type"),
    ("type Query { a: [A] }\ntype A { x: String }\ntype A { y: String }", "duplicate-type"),
    ("type Query { a: [A] }\ntype A { x: String x: Int }", "duplicate-field"),
    ("type Query { a: U }\nunion U = String", "union-member-not-object"),
    ("type Query { a: Int }", "root-field-scalar"),
    ("type Query { a(y: String): [A] }\ntype A { x: String }", "argument-not-field"),
    ("type Query { a(x: Int): [A] }\ntype A { x: String }", "argument-type"),
    ("type Query { a: [A] }\ntype A { x(q: String): String }", "argument-on-leaf"),
    ("type Query { a: [A] }\ntype A implements B { x: String }\ntype B { x: String }", "not-an-interface"),
    ("type Query { a: [A] }\ntype A implements I { x: String }\ninterface I { x: String y: Int }",
     "interface-field-missing"),
    ("scalar Date\ntype Query { a: [A] }\ntype A { x: Date }", "custom-scalar"),
])
def test_structural_violations(text, code):
    assert code in codes(text)


def test_every_violation_is_reported():
    text = "type Query { a: Foo b: Bar }"
    assert codes(text) == ["unknown-type", "unknown-type"]


def test_missing_uri_on_type_and_field():
    assert codes('type Query { a: [A] }\ntype A { x: String @uri(value: "x") }') == ["missing-uri"]
    assert codes('type Query { a: [A] }\ntype A @uri(value: "a") { x: String }') == ["missing-uri"]


def test_id_field_needs_binding_only_in_join_mode():
    text = 'type Query { a: [A] }\ntype A @uri(value: "a") { id: ID }'
    assert codes(text, "direct") == []
    assert codes(text, JOIN) == ["missing-uri"]


def test_filter_on_scalar_rejected():
    assert codes(HEADER.replace('@uri(value: "x")', '@uri(value: "x") @filter')) == ["invalid-directive"]


def test_valid_header_schema():
    assert codes(HEADER) == []


def test_syntax_error_has_location():
    with pytest.raises(SchemaError) as info:
        parse_sdl("type Query {\n  a: [A\n}")
    assert info.value.code == "syntax"
    assert info.value.location.line == 3
