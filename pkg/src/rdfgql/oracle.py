"""Reference evaluators used to check the engine.

Both evaluators walk a plain adjacency view of the triple set node by node,
without operands, slices or joins. ``eval_direct`` follows the recursive
field semantics over normalized queries; ``eval_collecting`` evaluates raw
(unnormalized) queries with per-node field collection.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Optional

from .ntriples import Term
from .operands import RDF_TYPE, value_term
from .query import Field, InlineFragment, NormalizedQuery, QueryAst
from .response import cardinality_message, render_scalar, serialize
from .schema import DIRECT, SCALARS, Schema, TermBinding, TypeRef
from .store import TripleIndex

ROOT = None


class GraphView:
    """Nodes, typed edges and values of a triple set, keyed by term id."""

    def __init__(self, index: TripleIndex, schema: Schema, binding: TermBinding,
                 id_mode: str = DIRECT, type_iri: str = RDF_TYPE):
        self.index = index
        self.schema = schema
        self.binding = binding
        self.id_mode = id_mode
        self.out: dict[tuple[int, int], list[int]] = defaultdict(list)
        self.inc: dict[tuple[int, int], list[int]] = defaultdict(list)
        self.types: dict[int, set[int]] = defaultdict(set)
        self.instances: dict[int, list[int]] = defaultdict(list)
        type_id = index.lookup(Term.iri(type_iri))
        for s, p, o in index.triples():
            self.out[(s, p)].append(o)
            self.inc[(o, p)].append(s)
            if p == type_id:
                self.types[s].add(o)
                self.instances[o].append(s)
        for table in (self.out, self.inc, self.instances):
            for key in table:
                table[key].sort()

    def term(self, tid: int) -> Term:
        return self.index.decode(tid)

    def iri_id(self, iri: Optional[str]) -> Optional[int]:
        return None if iri is None else self.index.lookup(Term.iri(iri))

    def has_type(self, node: int, type_name: str) -> bool:
        tid = self.iri_id(self.binding.type_iri(type_name))
        return tid is not None and tid in self.types.get(node, ())

    def of_type(self, type_name: str) -> list[int]:
        tid = self.iri_id(self.binding.type_iri(type_name))
        return list(self.instances.get(tid, ())) if tid is not None else []

    def neighbours(self, node: int, scope: str, field: str) -> list[int]:
        fb = self.binding.field(scope, field)
        pid = self.iri_id(fb.iri)
        if pid is None:
            return []
        table = self.inc if fb.inverse else self.out
        return list(table.get((node, pid), ()))

    def is_direct_id(self, ftype: TypeRef) -> bool:
        return self.id_mode == DIRECT and ftype == TypeRef("ID")

    def matches(self, node: int, target: str, args) -> bool:
        """Whether ``node`` satisfies every argument value of a field of type ``target``."""
        for name, value in args:
            adef = self.schema.field(target, name)
            if self.is_direct_id(adef.type):
                term = self.term(node)
                if not (term.is_iri and term.lexical == value.lexical):
                    return False
                continue
            want = self.index.lookup(value_term(value))
            if want is None or want not in self.neighbours(node, target, name):
                return False
        return True

    def targets(self, node, scope: str, sel: Field) -> list[int]:
        fdef = self.schema.field(scope, sel.name)
        target = fdef.type.name
        if node is ROOT:
            found = self.of_type(target)
        else:
            found = self.neighbours(node, scope, sel.name)
            if self.binding.field(scope, sel.name).filter:
                found = [v for v in found if self.has_type(v, target)]
        return [v for v in found if self.matches(v, target, sel.args)]


class _Evaluator:
    def __init__(self, view: GraphView):
        self.view = view
        self.schema = view.schema
        self.errors: set[str] = set()

    def error(self, path, node):
        self.errors.add(cardinality_message(path, None if node is ROOT else self.view.term(node)))

    def pick(self, values: list, path, node):
        if not values:
            return None
        if len(values) > 1:
            self.error(path, node)
        return values[0]

    def scalar_value(self, node, scope: str, sel: Field, path):
        view = self.view
        ftype = self.schema.field(scope, sel.name).type
        if view.is_direct_id(ftype):
            return render_scalar(view.term(node), "ID")
        values = [render_scalar(view.term(v), ftype.name) for v in view.neighbours(node, scope, sel.name)]
        if ftype.is_list:
            return values
        return self.pick(values, path, node)

    def field_value(self, sels, node, scope: str, sel: Field, ftype: TypeRef, path):
        targets = self.view.targets(node, scope, sel)
        if ftype.is_list:
            return [self.object(sels, v, ftype.name, path) for v in targets]
        chosen = self.pick(targets, path, node)
        return None if chosen is None else self.object(sels, chosen, ftype.name, path)


class _Direct(_Evaluator):
    """The recursive semantics over a non-redundant, ground-typed query."""

    def selections(self, sels, node, scope: str, path, pairs: dict):
        for sel in sels:
            if isinstance(sel, InlineFragment):
                if node is not ROOT and self.view.has_type(node, sel.type_name):
                    self.selections(sel.selections, node, sel.type_name, path, pairs)
                continue
            if sel.key in pairs:
                # concatenated fragments may repeat a key; the first occurrence wins
                continue
            sub = path + (sel.key,)
            ftype = self.schema.field(scope, sel.name).type
            if ftype.name in SCALARS:
                pairs[sel.key] = self.scalar_value(node, scope, sel, sub)
                continue
            pairs[sel.key] = self.field_value(sel.selections, node, scope, sel, ftype, sub)
        return pairs

    def object(self, sels, node, scope: str, path) -> dict:
        return self.selections(sels, node, scope, path, {})


class _Collecting(_Evaluator):
    """Raw-query evaluation with field collection at each node."""

    def applies(self, fragment_type: str, object_type: str) -> bool:
        return object_type in self.schema.possible_types(fragment_type)

    def collect(self, sels, object_type: str, grouped: dict):
        for sel in sels:
            if isinstance(sel, InlineFragment):
                if self.applies(sel.type_name, object_type):
                    self.collect(sel.selections, object_type, grouped)
                continue
            grouped.setdefault(sel.key, []).append(sel)
        return grouped

    def runtime_types(self, node, scope: str) -> list[str]:
        if not self.schema.is_abstract(scope):
            return [scope]
        return [t for t in self.schema.possible_types(scope) if self.view.has_type(node, t)]

    def object(self, sels, node, scope: str, path) -> dict:
        pairs: dict = {}
        for object_type in self.runtime_types(node, scope):
            for key, fields in self.collect(sels, object_type, {}).items():
                if key in pairs:
                    continue
                first = fields[0]
                sub = path + (key,)
                ftype = self.schema.field(object_type, first.name).type
                if ftype.name in SCALARS:
                    pairs[key] = self.scalar_value(node, object_type, first, sub)
                    continue
                merged = [s for f in fields for s in (f.selections or ())]
                pairs[key] = self.field_value(merged, node, object_type, first, ftype, sub)
        return pairs


def eval_direct(view: GraphView, query: NormalizedQuery) -> tuple[dict, list[str]]:
    ev = _Direct(view)
    data = ev.selections(query.selections, ROOT, view.schema.query_root, (), {})
    return data, sorted(ev.errors)


def eval_collecting(view: GraphView, query: QueryAst) -> tuple[dict, list[str]]:
    ev = _Collecting(view)
    data = ev.object(query.selections, ROOT, view.schema.query_root, ())
    return data, sorted(ev.errors)


def direct_response(view: GraphView, query: NormalizedQuery) -> str:
    return serialize(*eval_direct(view, query))


def collecting_response(view: GraphView, query: QueryAst) -> str:
    return serialize(*eval_collecting(view, query))
