"""Query operands and the operand dependency graph.

Every field, argument and inline fragment of a normalized query becomes a
triple pattern (an operand). Operands that share a variable are connected
in a directed, edge-labelled dependency graph: the operands of one field
expression depend on each other (a strong component), while the operands of
its sub-selection depend on it one-way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

from .errors import BindingError, RdfGqlError
from .ntriples import XSD, Term
from .query import (
    BOOLEAN_VALUE,
    FLOAT_VALUE,
    INT_VALUE,
    Field,
    InlineFragment,
    NormalizedQuery,
    Value,
)
from .schema import DIRECT, SCALARS, Schema, TermBinding, TypeRef
from .store import TripleIndex

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

ROOT = "root"
INNER = "inner"
LEAF = "leaf"
ARGUMENT = "argument"
FRAGMENT = "fragment"
TYPE_FILTER = "type-filter"

_NAMES = "xyzwvutsrqponmlkjihgfedcba"


@dataclass(frozen=True)
class Label:
    id: int
    name: str

    def __str__(self):
        return f"?{self.name}"


def _label_name(i: int) -> str:
    base = _NAMES[i % len(_NAMES)]
    return base if i < len(_NAMES) else f"{base}{i // len(_NAMES)}"


Slot = Union[int, Label, None]


@dataclass(frozen=True)
class Operand:
    index: int
    pattern: tuple[Slot, Slot, Slot]
    kind: str
    path: tuple[int, ...]
    key: Optional[str] = None
    # direct-mode ID argument: the subject label must equal the constant itself
    identity: bool = False
    # leaf operand of an ID-typed field (only generated in join mode)
    id_leaf: bool = False
    source: object = field(default=None, compare=False, repr=False)

    @property
    def labels(self) -> tuple[Label, ...]:
        out: list[Label] = []
        for slot in self.pattern:
            if isinstance(slot, Label) and slot not in out:
                out.append(slot)
        return tuple(out)

    def render(self, decode) -> str:
        if self.identity:
            return f"⟨{self.pattern[0]} = {_show(decode(self.pattern[2]))}⟩"
        parts = [str(s) if isinstance(s, Label) else _show(decode(s)) for s in self.pattern]
        return "⟨" + ", ".join(parts) + "⟩"


def _show(term: Term) -> str:
    return term.n3()


@dataclass
class FieldPlan:
    """A field of the normalized query together with its variable and operands."""

    key: str
    name: str
    scope: str
    type: TypeRef
    label: Optional[Label]
    parent: Optional[Label]
    operands: list[int] = field(default_factory=list)
    children: list = field(default_factory=list)
    direct_id: bool = False

    @property
    def is_list(self) -> bool:
        return self.type.is_list

    @property
    def scalar(self) -> Optional[str]:
        return self.type.name if self.type.name in SCALARS else None


@dataclass
class FragmentPlan:
    type_name: str
    operand: int
    parent: Label
    children: list = field(default_factory=list)


class Operands(list):
    """Ordered operand list (1-based ``index``) with generation metadata."""

    def __init__(self, items: Iterable[Operand] = (), labels: Sequence[Label] = (),
                 shape: Sequence = (), extra_terms: Optional[dict[int, Term]] = None):
        super().__init__(items)
        self.labels = list(labels)
        self.shape = list(shape)
        self.extra_terms = dict(extra_terms or {})

    def op(self, index: int) -> Operand:
        return self[index - 1]

    def decoder(self, index: TripleIndex):
        """Term lookup covering ids minted for constants absent from the data."""
        return lambda tid: self.extra_terms[tid] if tid in self.extra_terms else index.decode(tid)

    def render(self, index: TripleIndex) -> list[str]:
        decode = self.decoder(index)
        return [op.render(decode) for op in self]


def value_term(value: Value) -> Term:
    """RDF literal matched by an argument value (exact lexical comparison)."""
    if value.kind == INT_VALUE:
        return Term.literal(value.lexical, XSD + "integer")
    if value.kind == FLOAT_VALUE:
        dt = "double" if ("e" in value.lexical or "E" in value.lexical) else "decimal"
        return Term.literal(value.lexical, XSD + dt)
    if value.kind == BOOLEAN_VALUE:
        return Term.literal(value.lexical, XSD + "boolean")
    return Term.literal(value.lexical)


class _Generator:
    def __init__(self, schema: Schema, binding: TermBinding, index: TripleIndex, id_mode: str, type_iri: str):
        self.schema = schema
        self.binding = binding
        self.index = index
        self.id_mode = id_mode
        self.ops: list[Operand] = []
        self.labels: list[Label] = []
        self.extra: dict[Term, int] = {}
        self.type_id = self.term_id(Term.iri(type_iri))

    def term_id(self, term: Term) -> int:
        tid = self.index.lookup(term)
        if tid is None:
            # fresh per-query id: slices to empty without touching the shared dictionary
            tid = self.extra.get(term)
            if tid is None:
                tid = len(self.index.dictionary) + len(self.extra)
                self.extra[term] = tid
        return tid

    def new_label(self) -> Label:
        label = Label(len(self.labels), _label_name(len(self.labels)))
        self.labels.append(label)
        return label

    def add(self, pattern, kind, path, **kw) -> int:
        op = Operand(len(self.ops) + 1, pattern, kind, path, **kw)
        self.ops.append(op)
        return op.index

    def type_term(self, type_name: str) -> int:
        iri = self.binding.type_iri(type_name)
        if iri is None:
            raise BindingError(f"type {type_name} has no @uri binding")
        return self.term_id(Term.iri(iri))

    def field_term(self, scope: str, name: str) -> int:
        fb = self.binding.field(scope, name)
        if fb.iri is None:
            raise BindingError(f"field {scope}.{name} has no @uri binding")
        return self.term_id(Term.iri(fb.iri))

    def selections(self, sels, scope: str, parent: Label, path: tuple[int, ...]) -> list:
        plans = []
        for i, sel in enumerate(sels):
            sub = path + (i,)
            if isinstance(sel, InlineFragment):
                idx = self.add((parent, self.type_id, self.type_term(sel.type_name)), FRAGMENT, sub, source=sel)
                plan = FragmentPlan(sel.type_name, idx, parent)
                plan.children = self.selections(sel.selections, sel.type_name, parent, sub)
                plans.append(plan)
            else:
                plans.append(self.field(sel, scope, parent, sub))
        return plans

    def arguments(self, sel: Field, target: str, label: Label, path):
        for aname, value in sel.args:
            adef = self.schema.field(target, aname)
            if self.id_mode == DIRECT and adef is not None and adef.type == TypeRef("ID"):
                const = self.term_id(Term.iri(value.lexical))
                self.add((label, None, const), ARGUMENT, path, identity=True, source=sel)
                continue
            pred = self.field_term(target, aname)
            obj = self.term_id(value_term(value))
            if self.binding.field(target, aname).inverse:
                pattern = (obj, pred, label)
            else:
                pattern = (label, pred, obj)
            self.add(pattern, ARGUMENT, path, source=sel)

    def field(self, sel: Field, scope: str, parent: Optional[Label], path) -> FieldPlan:
        fdef = self.schema.field(scope, sel.name)
        ftype = fdef.type
        plan = FieldPlan(sel.key, sel.name, scope, ftype, None, parent)
        start = len(self.ops)
        if parent is None:
            label = self.new_label()
            self.add((label, self.type_id, self.type_term(ftype.name)), ROOT, path, key=sel.key, source=sel)
            self.arguments(sel, ftype.name, label, path)
        elif ftype.name in SCALARS and ftype == TypeRef("ID") and self.id_mode == DIRECT:
            plan.direct_id = True
            return plan
        else:
            label = self.new_label()
            fb = self.binding.field(scope, sel.name)
            pred = self.field_term(scope, sel.name)
            pattern = (label, pred, parent) if fb.inverse else (parent, pred, label)
            scalar = ftype.name in SCALARS
            self.add(pattern, LEAF if scalar else INNER, path, key=sel.key,
                     id_leaf=scalar and ftype.name == "ID", source=sel)
            if not scalar:
                self.arguments(sel, ftype.name, label, path)
                if fb.filter:
                    self.add((label, self.type_id, self.type_term(ftype.name)), TYPE_FILTER, path, source=sel)
        plan.label = label
        plan.operands = list(range(start + 1, len(self.ops) + 1))
        if sel.selections is not None:
            plan.children = self.selections(sel.selections, ftype.name, label, path)
        return plan


def generate_operands(schema: Schema, binding: TermBinding, query: NormalizedQuery, index: TripleIndex,
                      id_mode: str = DIRECT, type_iri: str = RDF_TYPE) -> Operands:
    """Operands of ``query`` in generation order (pre-order over the query)."""
    gen = _Generator(schema, binding, index, id_mode, type_iri)
    shape = []
    for i, sel in enumerate(query.selections):
        if isinstance(sel, InlineFragment):
            raise RdfGqlError("fragments directly under the query root are not supported")
        shape.append(gen.field(sel, schema.query_root, None, (i,)))
    extra = {tid: term for term, tid in gen.extra.items()}
    return Operands(gen.ops, gen.labels, shape, extra)


# ---------------------------------------------------------------------------
# dependency graph


class InvariantViolation(RdfGqlError):
    pass


class _Base:
    __slots__ = ("labels", "out", "inc", "memo")

    def __init__(self, labels: dict[int, frozenset], edges: Iterable[tuple[int, int, int]]):
        self.labels = labels
        self.out: dict[int, list[tuple[int, int]]] = {v: [] for v in labels}
        self.inc: dict[int, list[tuple[int, int]]] = {v: [] for v in labels}
        for u, lab, v in sorted(set(edges)):
            self.out[u].append((lab, v))
            self.inc[v].append((lab, u))
        self.memo: dict = {}


class DependencyGraph:
    """Directed vertex- and edge-labelled graph over operand indices.

    Instances are immutable views of one base graph: a vertex subset plus a
    set of labels already removed. Views are interned per base, so derived
    properties are computed once per distinct view.
    """

    __slots__ = ("_base", "vertices", "dead", "__dict__")

    def __new__(cls, base: _Base, vertices: frozenset, dead: frozenset = frozenset()):
        key = (vertices, dead)
        view = base.memo.get(key)
        if view is None:
            view = object.__new__(cls)
            view._base = base
            view.vertices = vertices
            view.dead = dead
            base.memo[key] = view
        return view

    @classmethod
    def from_edges(cls, labels: dict[int, Iterable], edges: Iterable[tuple[int, object, int]]) -> "DependencyGraph":
        base = _Base({v: frozenset(ls) for v, ls in labels.items()}, edges)
        return cls(base, frozenset(labels))

    def __repr__(self):
        return f"DependencyGraph(vertices={sorted(self.vertices)}, edges={sorted(self.edges)})"

    def __len__(self):
        return len(self.vertices)

    def __bool__(self):
        return bool(self.vertices)

    def labels_of(self, v: int) -> frozenset:
        return self._base.labels[v] - self.dead

    @cached_property
    def label_set(self) -> frozenset:
        out = set()
        for v in self.vertices:
            out |= self.labels_of(v)
        return frozenset(out)

    def _alive(self, lab, v) -> bool:
        return v in self.vertices and lab not in self.dead

    def successors(self, u: int) -> list[int]:
        return sorted({v for lab, v in self._base.out[u] if self._alive(lab, v)})

    def predecessors(self, v: int) -> list[int]:
        return sorted({u for lab, u in self._base.inc[v] if self._alive(lab, u)})

    @cached_property
    def edges(self) -> frozenset:
        return frozenset(
            (u, lab, v) for u in self.vertices for lab, v in self._base.out[u] if self._alive(lab, v)
        )

    def _sub(self, vertices, dead=None) -> "DependencyGraph":
        return DependencyGraph(self._base, frozenset(vertices), self.dead if dead is None else dead)

    @cached_property
    def components(self) -> tuple["DependencyGraph", ...]:
        """Weakly connected components, ordered by smallest vertex."""
        seen: set[int] = set()
        comps = []
        for start in sorted(self.vertices):
            if start in seen:
                continue
            comp = {start}
            todo = [start]
            while todo:
                u = todo.pop()
                for w in self.successors(u) + self.predecessors(u):
                    if w not in comp:
                        comp.add(w)
                        todo.append(w)
            seen |= comp
            comps.append(self._sub(comp))
        return tuple(comps)

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1

    @cached_property
    def strong_components(self) -> tuple[frozenset, ...]:
        """Tarjan's algorithm; components in reverse topological order."""
        index: dict[int, int] = {}
        low: dict[int, int] = {}
        stack: list[int] = []
        on_stack: set[int] = set()
        result: list[frozenset] = []
        counter = [0]

        def connect(v):
            index[v] = low[v] = counter[0]
            counter[0] += 1
            stack.append(v)
            on_stack.add(v)
            for w in self.successors(v):
                if w not in index:
                    connect(w)
                    low[v] = min(low[v], low[w])
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                result.append(frozenset(comp))

        for v in sorted(self.vertices):
            if v not in index:
                connect(v)
        return tuple(result)

    @property
    def is_strongly_connected(self) -> bool:
        return len(self.strong_components) == 1

    @cached_property
    def source_components(self) -> tuple[frozenset, ...]:
        """Strong components with no incoming edge from another component."""
        where = {v: comp for comp in self.strong_components for v in comp}
        sources = []
        for comp in self.strong_components:
            if all(where[u] is comp for v in comp for u in self.predecessors(v)):
                sources.append(comp)
        return tuple(sorted(sources, key=min))

    @cached_property
    def independent_component(self) -> tuple[frozenset, frozenset]:
        """The unique source of the condensation and the labels it carries."""
        if not self.vertices:
            raise InvariantViolation("empty graph has no independent strong component")
        if not self.is_connected:
            raise InvariantViolation("independent strong component requested for a disconnected graph")
        sources = self.source_components
        if len(sources) != 1:
            raise InvariantViolation(f"connected dependency graph with {len(sources)} source components")
        comp = sources[0]
        labels = set()
        for v in comp:
            labels |= self.labels_of(v)
        return comp, frozenset(labels)

    def reachable(self, starts: Iterable[int]) -> frozenset:
        seen = set(v for v in starts if v in self.vertices)
        todo = list(seen)
        while todo:
            u = todo.pop()
            for w in self.successors(u):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return frozenset(seen)

    def prune(self, empty: Iterable[int]) -> "DependencyGraph":
        """Drop empty operands and every operand transitively depending on them."""
        empty = frozenset(empty)
        if not empty:
            return self
        key = ("prune", empty)
        cache = self.__dict__.setdefault("_prune_cache", {})
        hit = cache.get(key)
        if hit is None:
            hit = self._sub(self.vertices - self.reachable(empty))
            cache[key] = hit
        return hit

    def remove_label(self, label) -> "DependencyGraph":
        """Forget ``label``; operands left without labels are fully resolved and dropped."""
        cache = self.__dict__.setdefault("_remove_cache", {})
        hit = cache.get(label)
        if hit is None:
            dead = self.dead | {label}
            keep = [v for v in self.vertices if self._base.labels[v] - dead]
            hit = self._sub(keep, dead)
            cache[label] = hit
        return hit

    def with_label(self, label) -> tuple[int, ...]:
        cache = self.__dict__.setdefault("_with_cache", {})
        hit = cache.get(label)
        if hit is None:
            hit = tuple(sorted(v for v in self.vertices if label in self.labels_of(v)))
            cache[label] = hit
        return hit


def _group_edges(ops: Sequence[Operand], labels: dict[int, frozenset]):
    edges = set()
    by_path: dict[tuple, list[int]] = {}
    for op in ops:
        by_path.setdefault(op.path, []).append(op.index)
    for path, group in by_path.items():
        # operands of one field expression (field, arguments, type filter) join each other
        for u in group:
            for v in group:
                if u != v:
                    for lab in labels[u] & labels[v]:
                        edges.add((u, lab, v))
        # operands of the sub-selection depend on them one-way
        depth = len(path)
        below = [op.index for op in ops if len(op.path) > depth and op.path[:depth] == path]
        for u in group:
            for v in below:
                for lab in labels[u] & labels[v]:
                    edges.add((u, lab, v))
    return edges


def build_dependency_graph(operands: Sequence[Operand], query: Optional[NormalizedQuery] = None) -> DependencyGraph:
    """Dependency graph over ``operands``; edge labels are label ids.

    Operands generated from the same query node form one group; the
    hierarchy is recovered from each operand's position path.
    """
    labels = {op.index: frozenset(lab.id for lab in op.labels) for op in operands}
    if query is not None:
        roots = {op.path[0] for op in operands}
        if roots - set(range(len(query.selections))):
            raise InvariantViolation("operands do not belong to the given query")
    return DependencyGraph.from_edges(labels, _group_edges(operands, labels))


def independent_strong_component(graph: DependencyGraph) -> tuple[frozenset, frozenset]:
    return graph.independent_component


def prune(graph: DependencyGraph, empty: Iterable[int]) -> DependencyGraph:
    return graph.prune(empty)


def remove_label(graph: DependencyGraph, label) -> DependencyGraph:
    return graph.remove_label(label)
