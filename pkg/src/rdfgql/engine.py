"""Multi-way left-join evaluation over operand relations.

The executor binds one label at a time. While the dependency graph still
contains one-way (left-join) edges, the label comes from its independent
strong component: every operand holding the label is sliced with each
candidate value, empty operands are pruned together with everything that
depends on them, and evaluation recurses on what is left. Once the graph is
strongly connected only inner joins remain and a plain per-variable
multi-way join finishes the branch.

Solutions are streamed to a callback; nothing proportional to the number of
solutions is ever buffered.
"""

from __future__ import annotations

import time
from bisect import bisect_left
from collections import Counter
from typing import Callable, Iterator, Optional, Sequence

from .errors import QueryTimeout
from .operands import FRAGMENT, DependencyGraph, Operand, Operands
from .store import IndexStats, TripleIndex, UnitRelation


class Solution:
    """One emitted solution mapping.

    ``values`` is indexed by label id (``None`` for unbound labels);
    ``fragments`` holds the fragment operands that were satisfied on the
    path that produced it.
    """

    __slots__ = ("values", "fragments")

    def __init__(self, values: tuple, fragments: frozenset):
        self.values = values
        self.fragments = fragments

    def bound(self) -> dict[int, int]:
        return {i: v for i, v in enumerate(self.values) if v is not None}

    def __repr__(self):
        return f"Solution({self.bound()})"


class ExecutionStats:
    def __init__(self):
        self.slices: Counter = Counter()
        self.id_leaf_slices = 0
        self.frames = 0
        self.peak_frames = 0
        self.emitted = 0
        self.index = IndexStats()

    @property
    def materialized_rows(self) -> int:
        return self.index.materialized_rows

    def as_dict(self) -> dict:
        return {
            "slices": dict(self.slices),
            "id_leaf_slices": self.id_leaf_slices,
            "peak_frames": self.peak_frames,
            "emitted": self.emitted,
            "materialized_rows": self.materialized_rows,
        }


def leapfrog(columns: Sequence[Sequence[int]]) -> Iterator[int]:
    """Ascending intersection of sorted id columns, seeking with binary search."""
    if not columns:
        return
    if len(columns) == 1:
        yield from columns[0]
        return
    cols = sorted(columns, key=len)
    if not cols[0]:
        return
    pos = [0] * len(cols)
    target = cols[0][0]
    while True:
        for j, col in enumerate(cols):
            p = bisect_left(col, target, pos[j])
            if p == len(col):
                return
            pos[j] = p
            if col[p] != target:
                target = col[p]
                break
        else:
            yield target
            pos[0] += 1
            if pos[0] == len(cols[0]):
                return
            target = cols[0][pos[0]]


class Executor:
    """State of one query execution over a shared, read-only index."""

    def __init__(self, index: TripleIndex, operands: Operands, graph: DependencyGraph,
                 deadline: Optional[float] = None, stats: Optional[ExecutionStats] = None):
        self.index = index
        self.operands = operands
        self.graph = graph
        self.deadline = deadline
        self.stats = stats or ExecutionStats()
        self.labels = list(operands.labels)
        self._ticks = 0
        self._fragment_ops = frozenset(op.index for op in operands if op.kind == FRAGMENT)

    # -- relations

    def _relation(self, op: Operand):
        if op.identity:
            return UnitRelation(op.pattern[0], op.pattern[2])
        return self.index.slice(op.pattern, self.stats.index)

    def initial_relations(self) -> dict:
        rels = {}
        for op in self.operands:
            if op.index in self.graph.vertices:
                rels[op.index] = self._relation(op)
        return rels

    def _tick(self):
        self._ticks += 1
        if self.deadline is not None and self._ticks & 0xFF == 0 and time.monotonic() > self.deadline:
            raise QueryTimeout("query exceeded its time limit")

    # -- algorithm

    def run(self, emit: Callable[[Solution], None]) -> None:
        values = [None] * len(self.labels)
        if self.graph:
            self.mwlj_rec(self.graph, self.initial_relations(), values, frozenset(), emit)

    def _emit(self, values, fragments, emit) -> None:
        self.stats.emitted += 1
        emit(Solution(tuple(values), fragments))

    def _enter(self):
        self.stats.frames += 1
        self.stats.peak_frames = max(self.stats.peak_frames, self.stats.frames)

    def _leave(self):
        self.stats.frames -= 1

    def enumerate_candidates(self, graph: DependencyGraph, rels: dict, x) -> Iterator[int]:
        comp, _ = graph.independent_component
        columns = [rels[v].column(self.labels[x]) for v in sorted(comp) if x in graph.labels_of(v)]
        return leapfrog(columns)

    def resolve_label(self, graph: DependencyGraph, rels: dict, x, value: int) -> tuple[dict, set]:
        """Slice every live operand holding ``x`` with ``value``; report the empty ones."""
        out = dict(rels)
        empty = set()
        for v in graph.with_label(x):
            rel = rels[v].bind(self.labels[x], value)
            op = self.operands.op(v)
            self.stats.slices[op.kind] += 1
            if op.id_leaf:
                self.stats.id_leaf_slices += 1
            out[v] = rel
            if rel.is_empty():
                empty.add(v)
        return out, empty

    def mwlj_rec(self, graph: DependencyGraph, rels: dict, values: list, fragments: frozenset,
                 emit: Callable[[Solution], None]) -> int:
        """Evaluate ``graph`` under the current bindings; returns the number of emitted solutions."""
        self._enter()
        try:
            if not graph.is_connected:
                return sum(self.mwlj_rec(comp, rels, values, fragments, emit) for comp in graph.components)
            if graph.is_strongly_connected:
                return self.mwj(graph, rels, values, fragments, emit)
            comp, labels = graph.independent_component
            x = min(labels)
            count = 0
            for value in self.enumerate_candidates(graph, rels, x):
                self._tick()
                sliced, empty = self.resolve_label(graph, rels, x, value)
                pruned = graph.prune(empty)
                if not pruned:
                    continue
                values[x] = value
                rest = pruned.remove_label(x)
                passed = fragments | ((pruned.vertices - rest.vertices) & self._fragment_ops)
                emitted = self.mwlj_rec(rest, sliced, values, passed, emit) if rest else 0
                if not emitted:
                    # the join on x succeeded even if every dependent left join failed
                    self._emit(values, passed, emit)
                    emitted = 1
                count += emitted
                values[x] = None
            return count
        finally:
            self._leave()

    def mwj(self, graph: DependencyGraph, rels: dict, values: list, fragments: frozenset,
            emit: Callable[[Solution], None]) -> int:
        """Plain multi-way join over a strongly connected graph."""
        live = graph.label_set
        if not live:
            self._emit(values, fragments, emit)
            return 1
        self._enter()
        try:
            def width(label):
                return min(len(rels[v].column(self.labels[label])) for v in graph.with_label(label))

            x = min(live, key=lambda label: (width(label), label))
            columns = [rels[v].column(self.labels[x]) for v in graph.with_label(x)]
            count = 0
            for value in leapfrog(columns):
                self._tick()
                sliced, empty = self.resolve_label(graph, rels, x, value)
                if empty:
                    continue
                values[x] = value
                count += self.mwj(graph.remove_label(x), sliced, values, fragments, emit)
                values[x] = None
            return count
        finally:
            self._leave()


def mwlj(index: TripleIndex, operands: Operands, graph: DependencyGraph, emit: Callable[[Solution], None],
         deadline: Optional[float] = None, stats: Optional[ExecutionStats] = None) -> ExecutionStats:
    executor = Executor(index, operands, graph, deadline, stats)
    executor.run(emit)
    return executor.stats


def solutions(index: TripleIndex, operands: Operands, graph: DependencyGraph) -> list[Solution]:
    out: list[Solution] = []
    mwlj(index, operands, graph, out.append)
    return out
