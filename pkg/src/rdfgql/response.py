"""Incremental construction and serialization of response documents.

Every solution mapping describes one path through the response tree. The
builder keeps, per query field, a cursor on the node it produced last; since
solutions arrive depth-first, a path that shares a prefix with the previous
one reuses those nodes instead of rebuilding them.
"""

from __future__ import annotations

import json
import math
from typing import Optional

from .engine import Solution
from .ntriples import Term
from .operands import FieldPlan, FragmentPlan, Operands
from .store import TripleIndex


def render_scalar(term: Term, scalar: str):
    text = term.lexical
    if scalar == "Int":
        try:
            return int(text.strip())
        except ValueError:
            return text
    if scalar == "Float":
        try:
            value = float(text.strip())
        except ValueError:
            return text
        return value if math.isfinite(value) else text
    if scalar == "Boolean" and text in ("true", "false"):
        return text == "true"
    return text


def cardinality_message(path: tuple[str, ...], holder: Optional[Term]) -> str:
    where = "the query root" if holder is None else holder.n3()
    return f"field {'.'.join(path)} has several values at {where}; the first one is kept"


def serialize(data, errors=()) -> str:
    doc = {"data": data}
    errors = sorted(set(errors))
    if errors:
        doc["errors"] = [{"message": m} for m in errors]
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def count_nodes(value) -> int:
    """Objects and scalar values in a response tree (lists and nulls are structure)."""
    if value is None:
        return 0
    if isinstance(value, list):
        return sum(count_nodes(v) for v in value)
    if isinstance(value, dict):
        return 1 + sum(count_nodes(v) for v in value.values())
    return 1


def response_nodes(data: dict) -> int:
    """Nodes below the top-level ``data`` object, which exists before any solution."""
    return sum(count_nodes(v) for v in data.values())


class ResponseBuilder:
    """Folds a depth-first stream of solutions into a response tree."""

    def __init__(self, operands: Operands, index: TripleIndex):
        self.shape = operands.shape
        self.index = index
        self.extra = operands.extra_terms
        self.errors: set[str] = set()
        self.materialized = 0
        self._owners: dict[int, dict[str, object]] = {}
        # per field plan: (id of holder object, value id, node built for it)
        self._cursor: dict[int, tuple[int, int, object]] = {}
        self._paths: dict[int, tuple[str, ...]] = {}
        self._index_paths(self.shape, ())
        self.data: dict = {}
        self._layout(self.shape, self.data, None, frozenset())

    def _index_paths(self, plans, prefix):
        for plan in plans:
            if isinstance(plan, FragmentPlan):
                self._index_paths(plan.children, prefix)
            else:
                self._paths[id(plan)] = prefix + (plan.key,)
                self._index_paths(plan.children, prefix + (plan.key,))

    def decode(self, tid: int) -> Term:
        if tid in self.extra:
            return self.extra[tid]
        return self.index.decode(tid)

    def _layout(self, plans, obj: dict, term: Optional[Term], fragments: frozenset, owners=None):
        if owners is None:
            owners = self._owners.setdefault(id(obj), {})
        for plan in plans:
            if isinstance(plan, FragmentPlan):
                if plan.operand in fragments:
                    self._layout(plan.children, obj, term, fragments, owners)
                continue
            if plan.key in owners:
                continue
            owners[plan.key] = plan
            if plan.direct_id:
                obj[plan.key] = render_scalar(term, "ID")
                self.materialized += 1
            else:
                obj[plan.key] = [] if plan.is_list else None

    def add(self, solution: Solution) -> None:
        self._walk(self.shape, self.data, None, solution)

    def _walk(self, plans, obj: dict, holder: Optional[int], solution: Solution):
        owners = self._owners[id(obj)]
        for plan in plans:
            if isinstance(plan, FragmentPlan):
                if plan.operand in solution.fragments:
                    self._walk(plan.children, obj, holder, solution)
                continue
            if plan.direct_id or owners.get(plan.key) is not plan:
                continue
            value = solution.values[plan.label.id]
            if value is None:
                continue
            if plan.scalar is not None:
                self._scalar(plan, obj, holder, value)
            else:
                child = self._child(plan, obj, holder, value, solution)
                if child is not None:
                    self._walk(plan.children, child, value, solution)

    def _cardinality(self, plan: FieldPlan, holder: Optional[int]):
        term = None if holder is None else self.decode(holder)
        self.errors.add(cardinality_message(self._paths[id(plan)], term))

    def _scalar(self, plan: FieldPlan, obj: dict, holder, value: int):
        cursor = self._cursor.get(id(plan))
        if cursor is not None and cursor[0] == id(obj):
            if cursor[1] == value:
                return
            if not plan.is_list:
                self._cardinality(plan, holder)
                return
        self._cursor[id(plan)] = (id(obj), value, None)
        rendered = render_scalar(self.decode(value), plan.scalar)
        if plan.is_list:
            obj[plan.key].append(rendered)
        else:
            obj[plan.key] = rendered
        self.materialized += 1

    def _child(self, plan: FieldPlan, obj: dict, holder, value: int, solution: Solution):
        cursor = self._cursor.get(id(plan))
        if cursor is not None and cursor[0] == id(obj):
            if cursor[1] == value:
                return cursor[2]
            if not plan.is_list:
                self._cardinality(plan, holder)
                self._cursor[id(plan)] = (id(obj), value, None)
                return None
        child: dict = {}
        self.materialized += 1
        self._layout(plan.children, child, self.decode(value), solution.fragments)
        if plan.is_list:
            obj[plan.key].append(child)
        else:
            obj[plan.key] = child
        self._cursor[id(plan)] = (id(obj), value, child)
        return child

    def result(self) -> tuple[dict, list[str]]:
        return self.data, sorted(self.errors)

    def serialize(self) -> str:
        return serialize(self.data, self.errors)
