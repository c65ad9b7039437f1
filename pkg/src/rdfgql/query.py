"""Query documents: parsing, validation against a schema, normalization.

The accepted language is the field/alias/inline-fragment core of GraphQL:

    phi ::= f[a] | l:f[a] | on t{phi} | f[a]{phi} | l:f[a]{phi} | phi ... phi

Inline fragments may be written ``on T { ... }`` or ``... on T { ... }``.
Argument values are scalar literals only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import Location, QuerySyntaxError, QueryValidationError
from .lexer import EOF, FLOAT, INT, NAME, PUNCT, STRING, TokenStream, tokenize
from .schema import SCALARS, Schema

STRING_VALUE = "string"
INT_VALUE = "int"
FLOAT_VALUE = "float"
BOOLEAN_VALUE = "boolean"


@dataclass(frozen=True)
class Value:
    """A scalar argument literal, compared by kind and exact lexical form."""

    kind: str
    lexical: str

    def __str__(self):
        if self.kind == STRING_VALUE:
            import json

            return json.dumps(self.lexical, ensure_ascii=False)
        return self.lexical


@dataclass(frozen=True)
class Field:
    name: str
    alias: Optional[str] = None
    args: tuple[tuple[str, Value], ...] = ()
    selections: Optional[tuple["Selection", ...]] = None
    location: Optional[Location] = None

    @property
    def key(self) -> str:
        return self.alias or self.name

    def __eq__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        return (self.name, self.key, self.args, self.selections) == (
            other.name, other.key, other.args, other.selections)

    def __hash__(self):
        return hash((self.name, self.key, self.args, self.selections))


@dataclass(frozen=True)
class InlineFragment:
    type_name: str
    selections: tuple["Selection", ...] = ()
    location: Optional[Location] = None

    def __eq__(self, other):
        if not isinstance(other, InlineFragment):
            return NotImplemented
        return (self.type_name, self.selections) == (other.type_name, other.selections)

    def __hash__(self):
        return hash((self.type_name, self.selections))


Selection = Union[Field, InlineFragment]


@dataclass(frozen=True)
class QueryAst:
    selections: tuple[Selection, ...]

    def __str__(self):
        return print_query(self)


# ---------------------------------------------------------------------------
# parsing


def _syntax(message: str, location: Location) -> QuerySyntaxError:
    return QuerySyntaxError(message, location)


class _QueryParser:
    def __init__(self, text: str):
        self.ts = TokenStream(tokenize(text, _syntax), _syntax)

    def document(self) -> QueryAst:
        ts = self.ts
        if ts.at(EOF):
            raise ts.fail("empty query document")
        if ts.at(NAME, "fragment") and ts.peek().kind == NAME:
            raise ts.fail("named fragment definitions are not supported")
        if ts.at(NAME, "mutation") or ts.at(NAME, "subscription"):
            raise ts.fail(f"{ts.current.value} operations are not supported")
        if ts.at(NAME, "query") and (ts.peek().kind == NAME or ts.peek().value in ("{", "(")):
            ts.advance()
            ts.accept(NAME)
            if ts.at_punct("("):
                raise ts.fail("variable definitions are not supported")
        if ts.accept(PUNCT, "{"):
            selections = self.selections(closing="}")
        else:
            selections = self.selections(closing=None)
        if not ts.at(EOF):
            if ts.at(NAME, "fragment"):
                raise ts.fail("named fragment definitions are not supported")
            raise ts.fail(f"unexpected {ts.current.value!r}")
        return QueryAst(selections)

    def selections(self, closing: Optional[str]) -> tuple[Selection, ...]:
        ts = self.ts
        out = []
        while True:
            if closing is not None and ts.accept(PUNCT, closing):
                break
            if closing is None and ts.at(EOF):
                break
            out.append(self.selection())
        if not out:
            raise ts.fail("empty selection set")
        return tuple(out)

    def selection(self) -> Selection:
        ts = self.ts
        start = ts.current.location
        if ts.accept(PUNCT, "..."):
            if not ts.at(NAME, "on"):
                if ts.at(NAME):
                    raise ts.fail("fragment spreads are not supported")
                raise ts.fail("expected 'on' after '...'")
        if ts.at(NAME, "on") and ts.peek().kind == NAME:
            ts.advance()
            type_name = ts.expect(NAME).value
            self.no_directives()
            ts.expect(PUNCT, "{")
            return InlineFragment(type_name, self.selections("}"), start)
        if ts.at_punct("$"):
            raise ts.fail("variables are not supported")
        name = ts.expect(NAME).value
        alias = None
        if ts.accept(PUNCT, ":"):
            alias = name
            name = ts.expect(NAME).value
        args = []
        if ts.accept(PUNCT, "("):
            seen = set()
            while not ts.accept(PUNCT, ")"):
                atok = ts.expect(NAME)
                ts.expect(PUNCT, ":")
                if atok.value in seen:
                    raise ts.fail(f"argument {atok.value} given twice", atok.location)
                seen.add(atok.value)
                args.append((atok.value, self.value()))
            if not args:
                raise ts.fail("empty argument list")
        self.no_directives()
        selections = None
        if ts.accept(PUNCT, "{"):
            selections = self.selections("}")
        return Field(name, alias, tuple(args), selections, start)

    def no_directives(self):
        if self.ts.at_punct("@"):
            raise self.ts.fail("directives in queries are not supported")

    def value(self) -> Value:
        ts = self.ts
        tok = ts.current
        if tok.kind == STRING:
            ts.advance()
            return Value(STRING_VALUE, tok.value)
        if tok.kind == INT:
            ts.advance()
            return Value(INT_VALUE, tok.value)
        if tok.kind == FLOAT:
            ts.advance()
            return Value(FLOAT_VALUE, tok.value)
        if tok.kind == NAME and tok.value in ("true", "false"):
            ts.advance()
            return Value(BOOLEAN_VALUE, tok.value)
        if tok.kind == PUNCT and tok.value == "$":
            raise ts.fail("variables are not supported")
        raise ts.fail("argument values must be string, integer, float or boolean literals")


def parse_query(text: str) -> QueryAst:
    return _QueryParser(text).document()


# ---------------------------------------------------------------------------
# printing


def _print_selections(selections: Sequence[Selection], indent: int, out: list[str]):
    pad = "  " * indent
    for sel in selections:
        if isinstance(sel, InlineFragment):
            out.append(f"{pad}... on {sel.type_name} {{")
            _print_selections(sel.selections, indent + 1, out)
            out.append(f"{pad}}}")
            continue
        head = f"{sel.alias}: {sel.name}" if sel.alias and sel.alias != sel.name else sel.name
        if sel.args:
            head += "(" + ", ".join(f"{a}: {v}" for a, v in sel.args) + ")"
        if sel.selections is None:
            out.append(pad + head)
        elif not sel.selections:
            # only produced by normalization when no fragment applies
            out.append(pad + head + " { }")
        else:
            out.append(pad + head + " {")
            _print_selections(sel.selections, indent + 1, out)
            out.append(pad + "}")


def print_query(query: Union[QueryAst, "NormalizedQuery", Sequence[Selection]]) -> str:
    selections = query.selections if hasattr(query, "selections") else query
    out = ["{"]
    _print_selections(selections, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# validation


def query_depth(selections: Sequence[Selection]) -> int:
    depth = 0
    for sel in selections:
        if isinstance(sel, InlineFragment):
            depth = max(depth, query_depth(sel.selections))
        else:
            depth = max(depth, 1 + (query_depth(sel.selections) if sel.selections else 0))
    return depth


def _value_fits(value: Value, scalar: str) -> bool:
    if scalar in ("String", "ID"):
        return value.kind == STRING_VALUE
    if scalar == "Int":
        return value.kind == INT_VALUE
    if scalar == "Float":
        return value.kind in (INT_VALUE, FLOAT_VALUE)
    if scalar == "Boolean":
        return value.kind == BOOLEAN_VALUE
    return False


def _where(node) -> str:
    return f" at {node.location}" if getattr(node, "location", None) else ""


def validate_query(schema: Schema, ast: QueryAst) -> list[str]:
    """All violations of the schema by ``ast``; empty when valid."""
    errors: list[str] = []
    _validate_selections(schema, ast.selections, schema.query_root, errors)
    return errors


def _validate_selections(schema: Schema, selections, scope: str, errors: list[str]):
    scope_kind = schema.kind(scope)
    for sel in selections:
        if isinstance(sel, InlineFragment):
            if sel.type_name not in schema.types or schema.kind(sel.type_name) not in ("object", "interface", "union"):
                errors.append(f"unknown fragment type {sel.type_name}{_where(sel)}")
                continue
            if not set(schema.possible_types(sel.type_name)) & set(schema.possible_types(scope)):
                errors.append(f"fragment on {sel.type_name} can never apply within {scope}{_where(sel)}")
                continue
            _validate_selections(schema, sel.selections, sel.type_name, errors)
            continue
        if scope_kind == "union":
            errors.append(f"field {sel.name} selected directly on union {scope}{_where(sel)}")
            continue
        fdef = schema.field(scope, sel.name)
        if fdef is None:
            errors.append(f"unknown field {sel.name} on type {scope}{_where(sel)}")
            continue
        for aname, value in sel.args:
            if aname not in fdef.args:
                errors.append(f"unknown argument {aname} on field {scope}.{sel.name}{_where(sel)}")
            elif not _value_fits(value, fdef.args[aname].name):
                errors.append(f"argument {aname} of {scope}.{sel.name} expects {fdef.args[aname]}, got {value}{_where(sel)}")
        leaf = fdef.type.name in SCALARS
        if leaf and sel.selections is not None:
            errors.append(f"selection on scalar field {scope}.{sel.name}{_where(sel)}")
        elif not leaf and sel.selections is None:
            errors.append(f"field {scope}.{sel.name} of type {fdef.type} needs a selection{_where(sel)}")
        elif not leaf:
            _validate_selections(schema, sel.selections, fdef.type.name, errors)


# ---------------------------------------------------------------------------
# normalization


@dataclass(frozen=True)
class NormalizedQuery:
    """A non-redundant query in ground-typed normal form, rooted at ``root``."""

    selections: tuple[Selection, ...]
    root: str

    def to_ast(self) -> QueryAst:
        return QueryAst(self.selections)

    def __str__(self):
        return print_query(self)


class MergeConflict(QueryValidationError):
    pass


def _collect(schema: Schema, selections, object_type: str, out: dict, conflicts: list[str]):
    # field collection for one concrete type: fields keyed by response key
    for sel in selections:
        if isinstance(sel, InlineFragment):
            if object_type in schema.possible_types(sel.type_name):
                _collect(schema, sel.selections, object_type, out, conflicts)
            continue
        prev = out.get(sel.key)
        if prev is None:
            out[sel.key] = [sel]
            continue
        first = prev[0]
        if first.name != sel.name or first.args != sel.args:
            conflicts.append(
                f"response key {sel.key} is used by {first.name}{_args(first)} and {sel.name}{_args(sel)}"
            )
            continue
        prev.append(sel)


def _args(sel: Field) -> str:
    return "(" + ", ".join(f"{a}: {v}" for a, v in sel.args) + ")" if sel.args else ""


def _normalize_object(schema: Schema, selections, object_type: str, conflicts: list[str]) -> tuple[Field, ...]:
    grouped: dict[str, list[Field]] = {}
    _collect(schema, selections, object_type, grouped, conflicts)
    out = []
    for key, fields in grouped.items():
        first = fields[0]
        alias = key if key != first.name else None
        if first.selections is None:
            out.append(Field(first.name, alias, first.args, None))
            continue
        merged: list[Selection] = []
        for f in fields:
            merged.extend(f.selections or ())
        fdef = schema.field(object_type, first.name)
        sub = _normalize_scope(schema, merged, fdef.type.name, conflicts)
        out.append(Field(first.name, alias, first.args, sub))
    return tuple(out)


def _normalize_scope(schema: Schema, selections, scope: str, conflicts: list[str]) -> tuple[Selection, ...]:
    if not schema.is_abstract(scope):
        return _normalize_object(schema, selections, scope, conflicts)
    out = []
    for concrete in schema.possible_types(scope):
        fields = _normalize_object(schema, selections, concrete, conflicts)
        if fields:
            out.append(InlineFragment(concrete, fields))
    return tuple(out)


def normalize(schema: Schema, ast: Union[QueryAst, NormalizedQuery]) -> NormalizedQuery:
    """Rewrite a validated query into non-redundant ground-typed normal form.

    Selections under abstract types become inline fragments on each concrete
    type, fragments on the already-concrete scope are inlined, and sibling
    fields sharing a response key are merged. Keys bound to different fields
    or arguments raise ``MergeConflict``.
    """
    conflicts: list[str] = []
    selections = _normalize_scope(schema, ast.selections, schema.query_root, conflicts)
    if conflicts:
        raise MergeConflict(conflicts)
    return NormalizedQuery(selections, schema.query_root)


def prepare_query(schema: Schema, text: str, depth_limit: Optional[int] = None) -> NormalizedQuery:
    """Parse, validate and normalize ``text``."""
    ast = parse_query(text)
    errors = validate_query(schema, ast)
    if depth_limit is not None and query_depth(ast.selections) > depth_limit:
        errors.append(f"query depth {query_depth(ast.selections)} exceeds the limit of {depth_limit}")
    if errors:
        raise QueryValidationError(errors)
    return normalize(schema, ast)
