"""Dictionary-encoded, in-memory triple store.

Terms are mapped to dense integer ids in first-seen order. Triples are held
in three orderings (SPO, POS, OSP) so that a pattern with any combination of
bound positions can be sliced, and any single unbound position can be
iterated in ascending id order.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_left
from collections import defaultdict
from typing import Hashable, Iterable, Optional, Sequence

from .ntriples import Term, parse_ntriples

S, P, O = 0, 1, 2

_EMPTY: tuple = ()


class Dictionary:
    """Bijection between terms and dense integer ids."""

    def __init__(self):
        self._terms: list[Term] = []
        self._ids: dict[Term, int] = {}

    def encode(self, term: Term) -> int:
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._terms.append(term)
            self._ids[term] = tid
        return tid

    def lookup(self, term: Term) -> Optional[int]:
        return self._ids.get(term)

    def decode(self, tid: int) -> Term:
        return self._terms[tid]

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)


class _Ordering:
    """One permutation of the triple set as a two-level map of sorted lists.

    ``first`` holds the sorted distinct leading ids, ``second[a]`` the sorted
    distinct second ids under ``a`` and ``third[(a, b)]`` the sorted last ids.
    """

    __slots__ = ("first", "second", "third")

    def __init__(self, rows: Iterable[tuple[int, int, int]]):
        second = defaultdict(set)
        third = defaultdict(list)
        for a, b, c in sorted(rows):
            second[a].add(b)
            third[(a, b)].append(c)
        self.first = sorted(second)
        self.second = {a: sorted(bs) for a, bs in second.items()}
        self.third = dict(third)


class IndexStats:
    """Counters shared by all slices of one execution."""

    __slots__ = ("materialized_rows",)

    def __init__(self):
        self.materialized_rows = 0


class TripleIndex:
    def __init__(self, dictionary: Dictionary, triples: Iterable[tuple[int, int, int]]):
        self.dictionary = dictionary
        unique = set(triples)
        self._triples = sorted(unique)
        self._spo = _Ordering(unique)
        self._pos = _Ordering((p, o, s) for s, p, o in unique)
        self._osp = _Ordering((o, s, p) for s, p, o in unique)

    def __len__(self):
        return len(self._triples)

    def triples(self) -> list[tuple[int, int, int]]:
        """All triples as id tuples in SPO order."""
        return list(self._triples)

    def decode(self, tid: int) -> Term:
        return self.dictionary.decode(tid)

    def lookup(self, term: Term) -> Optional[int]:
        return self.dictionary.lookup(term)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for term in self.dictionary:
            h.update(repr(term).encode())
        for row in self._triples:
            h.update(repr(row).encode())
        return h.hexdigest()

    def contains(self, s: int, p: int, o: int) -> bool:
        col = self._spo.third.get((s, p), _EMPTY)
        i = bisect_left(col, o)
        return i < len(col) and col[i] == o

    def is_empty(self, s: Optional[int], p: Optional[int], o: Optional[int]) -> bool:
        bound = (s is not None, p is not None, o is not None)
        if bound == (False, False, False):
            return not self._triples
        if bound == (True, False, False):
            return s not in self._spo.second
        if bound == (False, True, False):
            return p not in self._pos.second
        if bound == (False, False, True):
            return o not in self._osp.second
        if bound == (True, True, False):
            return (s, p) not in self._spo.third
        if bound == (False, True, True):
            return (p, o) not in self._pos.third
        if bound == (True, False, True):
            return (o, s) not in self._osp.third
        return not self.contains(s, p, o)

    def column(self, s: Optional[int], p: Optional[int], o: Optional[int], target: int,
               stats: Optional[IndexStats] = None) -> Sequence[int]:
        """Sorted distinct ids at position ``target`` among matching triples.

        Shapes where the target is not the next key of some ordering fall back
        to a merged, freshly sorted list; those rows are counted in ``stats``.
        """
        bound = (s is not None, p is not None, o is not None)
        if bound[target]:
            raise ValueError("target position is bound")
        if bound == (False, False, False):
            return (self._spo, self._pos, self._osp)[target].first
        if bound == (True, True, False):
            return self._spo.third.get((s, p), _EMPTY)
        if bound == (False, True, True):
            return self._pos.third.get((p, o), _EMPTY)
        if bound == (True, False, True):
            return self._osp.third.get((o, s), _EMPTY)
        if bound == (True, False, False):
            if target == P:
                return self._spo.second.get(s, _EMPTY)
            return self._merge(self._spo, s, stats)
        if bound == (False, True, False):
            if target == O:
                return self._pos.second.get(p, _EMPTY)
            return self._merge(self._pos, p, stats)
        # only o bound
        if target == S:
            return self._osp.second.get(o, _EMPTY)
        return self._merge(self._osp, o, stats)

    @staticmethod
    def _merge(ordering: _Ordering, a: int, stats: Optional[IndexStats]) -> Sequence[int]:
        values = set()
        for b in ordering.second.get(a, _EMPTY):
            values.update(ordering.third[(a, b)])
        out = sorted(values)
        if stats is not None:
            stats.materialized_rows += len(out)
        return out

    def slice(self, pattern: Sequence, stats: Optional[IndexStats] = None) -> "Relation":
        """Relation for a pattern of three slots, each an int id or a variable.

        Any non-int slot is a variable; equal variables in two slots must bind
        to the same id.
        """
        if len(pattern) != 3:
            raise ValueError("a pattern has exactly three slots")
        slots = []
        labels = []
        for slot in pattern:
            if isinstance(slot, int) and not isinstance(slot, bool):
                slots.append(slot)
                labels.append(None)
            else:
                slots.append(None)
                labels.append(slot)
        return Relation(self, tuple(slots), tuple(labels), stats)


class Relation:
    """Bindings of a triple pattern over an index, sliced lazily."""

    __slots__ = ("index", "slots", "labels", "stats", "_empty")

    def __init__(self, index: TripleIndex, slots: tuple, labels: tuple, stats: Optional[IndexStats] = None):
        self.index = index
        self.slots = slots
        self.labels = labels
        self.stats = stats
        self._empty: Optional[bool] = None

    @property
    def variables(self) -> tuple:
        seen = []
        for label in self.labels:
            if label is not None and label not in seen:
                seen.append(label)
        return tuple(seen)

    def _unknown(self) -> bool:
        n = len(self.index.dictionary)
        return any(v is not None and not 0 <= v < n for v in self.slots)

    def _repeats(self) -> bool:
        named = [lab for lab in self.labels if lab is not None]
        return len(set(named)) < len(named)

    def is_empty(self) -> bool:
        if self._empty is None:
            if self._unknown():
                self._empty = True
            elif self._repeats():
                self._empty = not self._repeated_rows()
            else:
                self._empty = self.index.is_empty(*self.slots)
        return self._empty

    def column(self, label: Hashable) -> Sequence[int]:
        positions = [i for i, lab in enumerate(self.labels) if lab == label]
        if not positions:
            raise KeyError(label)
        if self._unknown():
            return _EMPTY
        if not self._repeats():
            return self.index.column(*self.slots, positions[0], self.stats)
        out = sorted({row[positions[0]] for row in self._repeated_rows()})
        if self.stats is not None:
            self.stats.materialized_rows += len(out)
        return out

    def _repeated_rows(self) -> list[tuple[int, int, int]]:
        # patterns such as <?x p ?x>: scan with one variable per position, then filter
        relaxed = Relation(self.index, self.slots,
                           tuple(None if lab is None else i for i, lab in enumerate(self.labels)))
        free = [i for i, lab in enumerate(self.labels) if lab is not None]
        rows = []
        for values in relaxed:
            row = list(self.slots)
            for i, v in zip(free, values):
                row[i] = v
            if all(row[i] == row[j] for i in free for j in free if self.labels[i] == self.labels[j]):
                rows.append(tuple(row))
        return rows

    def bind(self, label: Hashable, value: int) -> "Relation":
        slots = list(self.slots)
        labels = list(self.labels)
        for i, lab in enumerate(labels):
            if lab == label:
                slots[i] = value
                labels[i] = None
        return Relation(self.index, tuple(slots), tuple(labels), self.stats)

    def estimate(self, label: Hashable) -> int:
        return len(self.column(label))

    def __iter__(self):
        """Iterate full solution tuples, ordered by variable first occurrence."""
        variables = self.variables
        if not variables:
            if not self.is_empty():
                yield ()
            return
        head, rest = variables[0], variables[1:]
        for value in self.column(head):
            sub = self.bind(head, value)
            if not rest:
                yield (value,)
            else:
                for tail in sub:
                    yield (value,) + tail


class UnitRelation:
    """A single-variable relation holding exactly one id."""

    __slots__ = ("label", "value", "bound")

    def __init__(self, label: Hashable, value: int, bound: bool = False):
        self.label = label
        self.value = value
        self.bound = bound

    @property
    def labels(self) -> tuple:
        return () if self.bound else (self.label,)

    @property
    def variables(self) -> tuple:
        return self.labels

    def is_empty(self) -> bool:
        return False

    def column(self, label: Hashable) -> Sequence[int]:
        if self.bound or label != self.label:
            raise KeyError(label)
        return (self.value,)

    def bind(self, label: Hashable, value: int):
        if label != self.label or self.bound:
            return self
        if value != self.value:
            return _EMPTY_RELATION
        return UnitRelation(self.label, self.value, True)

    def estimate(self, label: Hashable) -> int:
        return 1


class _EmptyRelation:
    labels = ()
    variables = ()

    def is_empty(self) -> bool:
        return True

    def column(self, label):
        return _EMPTY

    def bind(self, label, value):
        return self

    def estimate(self, label) -> int:
        return 0


_EMPTY_RELATION = _EmptyRelation()


def load_graph(triples: Iterable[tuple[Term, Term, Term]]) -> TripleIndex:
    dictionary = Dictionary()
    encoded = []
    for s, p, o in triples:
        if not s.is_iri or not p.is_iri:
            raise ValueError("subjects and predicates must be IRIs")
        encoded.append((dictionary.encode(s), dictionary.encode(p), dictionary.encode(o)))
    return TripleIndex(dictionary, encoded)


def load_ntriples_file(path) -> TripleIndex:
    with open(path, encoding="utf-8") as fh:
        return load_graph(parse_ntriples(fh))
