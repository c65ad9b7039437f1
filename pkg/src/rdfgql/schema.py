"""GraphQL SDL subset and the RDF term bindings carried by its directives.

Supported definitions are ``type`` (with ``implements`` or the shorthand
``impl``), ``interface``, ``union`` and ``schema { query: ... }``. The
directives ``@uri(value: "...")``, ``@inverse`` and ``@filter`` map schema
elements onto RDF terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import Location, SchemaError, SchemaValidationError
from .lexer import EOF, NAME, PUNCT, STRING, TokenStream, tokenize

SCALARS = ("String", "Int", "Float", "Boolean", "ID")

OBJECT = "object"
INTERFACE = "interface"
UNION = "union"

DIRECT = "direct"
JOIN = "join"
ID_MODES = (DIRECT, JOIN)


@dataclass(frozen=True)
class TypeRef:
    name: str
    is_list: bool = False

    def __str__(self):
        return f"[{self.name}]" if self.is_list else self.name


@dataclass
class FieldDef:
    name: str
    type: TypeRef
    args: dict[str, TypeRef] = field(default_factory=dict)
    location: Optional[Location] = field(default=None, compare=False, repr=False)


@dataclass
class TypeDef:
    name: str
    kind: str
    fields: dict[str, FieldDef] = field(default_factory=dict)
    interfaces: tuple[str, ...] = ()
    members: tuple[str, ...] = ()
    location: Optional[Location] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FieldBinding:
    iri: Optional[str] = None
    inverse: bool = False
    filter: bool = False


@dataclass
class TermBinding:
    """IRIs and traversal flags attached to types and fields."""

    types: dict[str, str] = field(default_factory=dict)
    fields: dict[tuple[str, str], FieldBinding] = field(default_factory=dict)
    # bindings as written in the SDL, before interface inheritance
    declared: dict[tuple[str, str], FieldBinding] = field(default_factory=dict, compare=False, repr=False)

    def type_iri(self, type_name: str) -> Optional[str]:
        return self.types.get(type_name)

    def field(self, type_name: str, field_name: str) -> FieldBinding:
        return self.fields.get((type_name, field_name), FieldBinding())


@dataclass
class Schema:
    types: dict[str, TypeDef]
    query_root: str = "Query"

    # -- the formal components -------------------------------------------

    def fields_of(self, type_name: str) -> set[str]:
        return set(self.types[type_name].fields)

    def args_of(self, type_name: str, field_name: str) -> set[str]:
        return set(self.types[type_name].fields[field_name].args)

    def type_of(self, type_name: str, field_name: str, arg: Optional[str] = None) -> TypeRef:
        fdef = self.types[type_name].fields[field_name]
        return fdef.args[arg] if arg is not None else fdef.type

    def unions_of(self, union: str) -> set[str]:
        return set(self.types[union].members)

    def impls_of(self, interface: str) -> set[str]:
        return {t.name for t in self.types.values() if t.kind == OBJECT and interface in t.interfaces}

    @property
    def object_types(self) -> set[str]:
        return {n for n, t in self.types.items() if t.kind == OBJECT}

    @property
    def interface_types(self) -> set[str]:
        return {n for n, t in self.types.items() if t.kind == INTERFACE}

    @property
    def union_types(self) -> set[str]:
        return {n for n, t in self.types.items() if t.kind == UNION}

    @property
    def scalars(self) -> set[str]:
        return set(SCALARS)

    @property
    def field_names(self) -> set[str]:
        return {f for t in self.types.values() for f in t.fields}

    @property
    def argument_names(self) -> set[str]:
        return {a for t in self.types.values() for f in t.fields.values() for a in f.args}

    # -- helpers ---------------------------------------------------------

    def is_scalar(self, type_name: str) -> bool:
        return type_name in SCALARS

    def is_abstract(self, type_name: str) -> bool:
        t = self.types.get(type_name)
        return t is not None and t.kind in (INTERFACE, UNION)

    def kind(self, type_name: str) -> str:
        if type_name in SCALARS:
            return "scalar"
        return self.types[type_name].kind

    def possible_types(self, type_name: str) -> list[str]:
        """Concrete object types a value of ``type_name`` may have, in declaration order."""
        t = self.types.get(type_name)
        if t is None:
            return []
        if t.kind == OBJECT:
            return [type_name]
        if t.kind == UNION:
            members = set(t.members)
        else:
            members = self.impls_of(type_name)
        return [n for n in self.types if n in members]

    def field(self, type_name: str, field_name: str) -> Optional[FieldDef]:
        t = self.types.get(type_name)
        if t is None or t.kind == UNION:
            return None
        return t.fields.get(field_name)

    def reachable_types(self) -> list[str]:
        seen: list[str] = []
        todo = [self.query_root]
        while todo:
            name = todo.pop()
            if name in seen or name not in self.types:
                continue
            seen.append(name)
            t = self.types[name]
            todo.extend(f.type.name for f in t.fields.values())
            todo.extend(t.members)
            if t.kind == INTERFACE:
                todo.extend(self.possible_types(name))
        return [n for n in self.types if n in seen]


# ---------------------------------------------------------------------------
# parsing


def _syntax(message: str, location: Location) -> SchemaError:
    return SchemaError("syntax", message, location)


class _SdlParser:
    def __init__(self, text: str):
        self.ts = TokenStream(tokenize(text, _syntax), _syntax)
        self.types: dict[str, TypeDef] = {}
        self.binding = TermBinding()
        self.query_root: Optional[str] = None
        self.errors: list[SchemaError] = []

    def parse(self):
        ts = self.ts
        while not ts.at(EOF):
            ts.accept(STRING)  # description
            tok = ts.expect(NAME)
            if tok.value == "type":
                self._type_def(OBJECT, tok.location)
            elif tok.value == "interface":
                self._type_def(INTERFACE, tok.location)
            elif tok.value == "union":
                self._union_def(tok.location)
            elif tok.value == "schema":
                self._schema_def()
            elif tok.value == "scalar":
                raise SchemaError("custom-scalar", "custom scalar types are not supported", tok.location)
            elif tok.value in ("enum", "input", "directive", "extend"):
                raise SchemaError("unsupported", f"'{tok.value}' definitions are not supported", tok.location)
            else:
                raise ts.fail(f"unexpected {tok.value!r}", tok.location)
        return self

    def _register(self, tdef: TypeDef):
        if tdef.name in self.types or tdef.name in SCALARS:
            self.errors.append(SchemaError("duplicate-type", f"type {tdef.name} is defined twice", tdef.location))
            return
        self.types[tdef.name] = tdef

    def _type_ref(self) -> TypeRef:
        ts = self.ts
        if ts.accept(PUNCT, "["):
            start = ts.current.location
            if ts.at_punct("["):
                raise SchemaError("unsupported", "nested list types are not supported", start)
            name = ts.expect(NAME).value
            ts.accept(PUNCT, "!")
            ts.expect(PUNCT, "]")
            ts.accept(PUNCT, "!")
            return TypeRef(name, True)
        name = ts.expect(NAME).value
        ts.accept(PUNCT, "!")
        return TypeRef(name)

    def _directives(self, target: str) -> dict:
        ts = self.ts
        found: dict = {}
        while ts.at_punct("@"):
            at = ts.advance().location
            name = ts.expect(NAME).value
            args = {}
            if ts.accept(PUNCT, "("):
                while not ts.accept(PUNCT, ")"):
                    key = ts.expect(NAME).value
                    ts.expect(PUNCT, ":")
                    args[key] = ts.expect(STRING).value
            if name == "uri":
                if set(args) != {"value"}:
                    raise SchemaError("invalid-directive", '@uri takes exactly one argument: value: "<IRI>"', at)
                found["uri"] = args["value"]
            elif name in ("inverse", "filter"):
                if target != "field":
                    raise SchemaError("invalid-directive", f"@{name} is only valid on field definitions", at)
                if args:
                    raise SchemaError("invalid-directive", f"@{name} takes no arguments", at)
                found[name] = True
            else:
                raise SchemaError("invalid-directive", f"unknown directive @{name}", at)
        return found

    def _type_def(self, kind: str, location: Location):
        ts = self.ts
        name = ts.expect(NAME).value
        interfaces = []
        if ts.at(NAME, "implements") or ts.at(NAME, "impl"):
            ts.advance()
            ts.accept(PUNCT, "&")
            interfaces.append(ts.expect(NAME).value)
            while ts.accept(PUNCT, "&") or ts.at(NAME):
                interfaces.append(ts.expect(NAME).value)
        directives = self._directives("type")
        tdef = TypeDef(name, kind, interfaces=tuple(interfaces), location=location)
        ts.expect(PUNCT, "{")
        while not ts.accept(PUNCT, "}"):
            ts.accept(STRING)
            ftok = ts.expect(NAME)
            args: dict[str, TypeRef] = {}
            if ts.accept(PUNCT, "("):
                while not ts.accept(PUNCT, ")"):
                    ts.accept(STRING)
                    atok = ts.expect(NAME)
                    ts.expect(PUNCT, ":")
                    aref = self._type_ref()
                    if ts.at_punct("="):
                        raise SchemaError("unsupported", "argument default values are not supported", ts.current.location)
                    if atok.value in args:
                        self.errors.append(SchemaError("duplicate-argument", f"argument {atok.value} repeated", atok.location))
                    args[atok.value] = aref
            ts.expect(PUNCT, ":")
            fref = self._type_ref()
            fdirs = self._directives("field")
            if ftok.value in tdef.fields:
                self.errors.append(SchemaError("duplicate-field", f"field {name}.{ftok.value} is defined twice", ftok.location))
                continue
            tdef.fields[ftok.value] = FieldDef(ftok.value, fref, args, ftok.location)
            if fdirs:
                self.binding.fields[(name, ftok.value)] = FieldBinding(
                    fdirs.get("uri"), fdirs.get("inverse", False), fdirs.get("filter", False)
                )
        if "uri" in directives:
            self.binding.types[name] = directives["uri"]
        self._register(tdef)

    def _union_def(self, location: Location):
        ts = self.ts
        name = ts.expect(NAME).value
        directives = self._directives("type")
        ts.expect(PUNCT, "=")
        ts.accept(PUNCT, "|")
        members = [ts.expect(NAME).value]
        while ts.accept(PUNCT, "|"):
            members.append(ts.expect(NAME).value)
        if "uri" in directives:
            self.binding.types[name] = directives["uri"]
        self._register(TypeDef(name, UNION, members=tuple(members), location=location))

    def _schema_def(self):
        ts = self.ts
        ts.expect(PUNCT, "{")
        while not ts.accept(PUNCT, "}"):
            op = ts.expect(NAME)
            ts.expect(PUNCT, ":")
            target = ts.expect(NAME).value
            if op.value != "query":
                raise SchemaError("unsupported", f"{op.value} operations are not supported", op.location)
            self.query_root = target


def _inherit_bindings(types: dict[str, TypeDef], binding: TermBinding) -> TermBinding:
    fields = dict(binding.fields)
    for t in types.values():
        if t.kind != OBJECT:
            continue
        for fname in t.fields:
            own = fields.get((t.name, fname))
            if own is not None and own.iri is not None:
                continue
            for iface in t.interfaces:
                ib = binding.fields.get((iface, fname))
                if ib is not None and ib.iri is not None:
                    fields[(t.name, fname)] = FieldBinding(
                        ib.iri,
                        ib.inverse or (own.inverse if own else False),
                        ib.filter or (own.filter if own else False),
                    )
                    break
    return TermBinding(dict(binding.types), fields, dict(binding.fields))


def parse_sdl(text: str, check: bool = True) -> tuple[Schema, TermBinding]:
    """Parse SDL text into a schema and its term bindings.

    Syntax problems raise immediately. With ``check`` set, structural
    violations (unknown types, non-object union members, non-scalar
    arguments, ...) are collected and raised together.
    """
    parser = _SdlParser(text).parse()
    schema = Schema(parser.types, parser.query_root or "Query")
    binding = _inherit_bindings(parser.types, parser.binding)
    errors = list(parser.errors)
    if check:
        errors.extend(structural_errors(schema))
    if errors:
        raise SchemaValidationError(errors)
    return schema, binding


# ---------------------------------------------------------------------------
# validation


def structural_errors(schema: Schema) -> list[SchemaError]:
    errors: list[SchemaError] = []

    def err(code, message, location=None):
        errors.append(SchemaError(code, message, location))

    def known(name):
        return name in SCALARS or name in schema.types

    root = schema.types.get(schema.query_root)
    if root is None:
        err("unknown-type", f"query root type {schema.query_root} is not defined")
    elif root.kind != OBJECT:
        err("invalid-root", f"query root {schema.query_root} must be an object type", root.location)

    for t in schema.types.values():
        if t.kind == UNION:
            if not t.members:
                err("empty-union", f"union {t.name} has no members", t.location)
            for m in t.members:
                if m not in schema.types and m not in SCALARS:
                    err("unknown-type", f"union {t.name} references unknown type {m}", t.location)
                elif schema.kind(m) != OBJECT:
                    err("union-member-not-object", f"union {t.name} member {m} is not an object type", t.location)
            continue
        for iface in t.interfaces:
            if iface not in schema.types:
                err("unknown-type", f"{t.name} implements unknown type {iface}", t.location)
            elif schema.types[iface].kind != INTERFACE:
                err("not-an-interface", f"{t.name} implements {iface}, which is not an interface", t.location)
            else:
                for fname, ifield in schema.types[iface].fields.items():
                    own = t.fields.get(fname)
                    if own is None:
                        err("interface-field-missing", f"{t.name} lacks field {fname} of interface {iface}", t.location)
                    elif own.type != ifield.type:
                        err("interface-field-type",
                            f"{t.name}.{fname} has type {own.type}, interface {iface} declares {ifield.type}",
                            own.location)
        if t.kind == INTERFACE and t.interfaces:
            err("unsupported", f"interface {t.name} implementing interfaces is not supported", t.location)
        for f in t.fields.values():
            if not known(f.type.name):
                err("unknown-type", f"{t.name}.{f.name} references unknown type {f.type.name}", f.location)
                continue
            for aname, aref in f.args.items():
                if not known(aref.name):
                    err("unknown-type", f"argument {t.name}.{f.name}({aname}) references unknown type {aref.name}",
                        f.location)
                    continue
                if aref.name not in SCALARS or aref.is_list:
                    err("argument-not-scalar", f"argument {aname} of {t.name}.{f.name} must be scalar", f.location)
                    continue
                if f.type.name in SCALARS:
                    err("argument-on-leaf", f"leaf field {t.name}.{f.name} cannot take arguments", f.location)
                    continue
                target = schema.field(f.type.name, aname)
                if target is None:
                    err("argument-not-field",
                        f"argument {aname} of {t.name}.{f.name} is not a field of {f.type.name}", f.location)
                elif target.type.name not in SCALARS or target.type.is_list:
                    err("argument-not-field",
                        f"argument {aname} of {t.name}.{f.name} must name a scalar field of {f.type.name}",
                        f.location)
                elif target.type.name != aref.name:
                    err("argument-type",
                        f"argument {aname} of {t.name}.{f.name} has type {aref}, field declares {target.type}",
                        f.location)
            if t.name == schema.query_root and f.type.name in SCALARS:
                err("root-field-scalar", f"root field {f.name} must have an object, interface or union type",
                    f.location)
    return errors


def validate_schema(schema: Schema, binding: TermBinding, id_mode: str = DIRECT) -> list[SchemaError]:
    """Every structural and binding violation; an empty list means valid."""
    errors = structural_errors(schema)
    reachable = schema.reachable_types()
    for name in reachable:
        t = schema.types[name]
        if name != schema.query_root and binding.type_iri(name) is None:
            errors.append(SchemaError("missing-uri", f"type {name} has no @uri binding", t.location))
        if t.kind == UNION:
            continue
        for f in t.fields.values():
            fb = binding.field(name, f.name)
            scalar = f.type.name in SCALARS
            if fb.filter and scalar:
                errors.append(SchemaError("invalid-directive", f"@filter on scalar field {name}.{f.name}", f.location))
            if name == schema.query_root:
                continue
            direct_id = id_mode == DIRECT and f.type == TypeRef("ID")
            if fb.iri is None and not direct_id:
                errors.append(SchemaError("missing-uri", f"field {name}.{f.name} has no @uri binding", f.location))
    for (tname, fname), fb in binding.fields.items():
        if tname in schema.types and tname == schema.query_root and fb.inverse:
            errors.append(SchemaError("invalid-directive", f"@inverse on root field {fname}", None))
    return errors


def load_schema(text: str, id_mode: str = DIRECT) -> tuple[Schema, TermBinding]:
    schema, binding = parse_sdl(text)
    errors = validate_schema(schema, binding, id_mode)
    if errors:
        raise SchemaValidationError(errors)
    return schema, binding


# ---------------------------------------------------------------------------
# printing


def _quote(value: str) -> str:
    import json

    return json.dumps(value, ensure_ascii=False)


def print_sdl(schema: Schema, binding: Optional[TermBinding] = None) -> str:
    binding = binding or TermBinding()
    out: list[str] = []
    for t in schema.types.values():
        tdir = f' @uri(value: {_quote(binding.types[t.name])})' if t.name in binding.types else ""
        if t.kind == UNION:
            out.append(f"union {t.name}{tdir} = {' | '.join(t.members)}")
            continue
        head = "type" if t.kind == OBJECT else "interface"
        impl = f" implements {' & '.join(t.interfaces)}" if t.interfaces else ""
        out.append(f"{head} {t.name}{impl}{tdir} {{")
        for f in t.fields.values():
            args = ""
            if f.args:
                args = "(" + ", ".join(f"{a}: {r}" for a, r in f.args.items()) + ")"
            dirs = ""
            declared = binding.declared if binding.declared or not binding.fields else binding.fields
            fb = declared.get((t.name, f.name))
            if fb is not None:
                if fb.iri is not None:
                    dirs += f" @uri(value: {_quote(fb.iri)})"
                if fb.inverse:
                    dirs += " @inverse"
                if fb.filter:
                    dirs += " @filter"
            out.append(f"  {f.name}{args}: {f.type}{dirs}")
        out.append("}")
    out.append(f"schema {{ query: {schema.query_root} }}")
    return "\n".join(out) + "\n"


def iter_fields(schema: Schema) -> Iterable[tuple[str, FieldDef]]:
    for t in schema.types.values():
        for f in t.fields.values():
            yield t.name, f
