"""Immutable multisets in canonical (sorted element -> positive count) form."""

from __future__ import annotations

import math
from collections import Counter
from typing import Hashable, Iterable, Iterator, Mapping

INF = math.inf


def sort_key(x):
    # node sets order by their sorted members; numbers (incl. INF) order naturally
    if isinstance(x, frozenset):
        return (1, len(x), tuple(sorted(x)))
    return (0, x)


class Multiset:
    """A finite multiset with structural equality.

    Entries with count zero are never stored, so two multisets holding the
    same occurrences compare (and hash) equal regardless of how they were
    built.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, elems: Iterable[Hashable] | Mapping[Hashable, int] = ()):
        if isinstance(elems, Mapping):
            counts = {}
            for k, c in elems.items():
                if not isinstance(c, int) or c < 0:
                    raise ValueError(f"multiset count must be a natural, got {c!r}")
                if c:
                    counts[k] = c
        else:
            counts = Counter(elems)
        self._items = tuple(sorted(counts.items(), key=lambda kv: sort_key(kv[0])))
        self._hash = hash(self._items)

    @classmethod
    def _from_counter(cls, counts: Counter) -> "Multiset":
        return cls({k: c for k, c in counts.items() if c > 0})

    def counts(self) -> dict:
        return dict(self._items)

    def items(self):
        return self._items

    def count(self, x) -> int:
        for k, c in self._items:
            if k == x:
                return c
        return 0

    def elements(self) -> Iterator:
        for k, c in self._items:
            for _ in range(c):
                yield k

    def distinct(self) -> tuple:
        return tuple(k for k, _ in self._items)

    def __len__(self) -> int:
        return sum(c for _, c in self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __contains__(self, x) -> bool:
        return any(k == x for k, _ in self._items)

    def __iter__(self):
        return self.elements()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __add__(self, other: "Multiset") -> "Multiset":
        c = Counter(dict(self._items))
        c.update(dict(other._items))
        return Multiset._from_counter(c)

    def difference(self, other: "Multiset") -> "Multiset | None":
        """Return ``self - other`` if ``other`` is a sub-multiset, else None."""
        c = Counter(dict(self._items))
        for k, n in other._items:
            if c[k] < n:
                return None
            c[k] -= n
        return Multiset._from_counter(c)

    def remove_one(self, x) -> "Multiset":
        """Drop one occurrence of ``x``; a no-op when ``x`` is absent."""
        c = Counter(dict(self._items))
        if c[x] > 0:
            c[x] -= 1
        return Multiset._from_counter(c)

    def issubset(self, other: "Multiset") -> bool:
        return other.difference(self) is not None

    def max(self):
        return max((k for k, _ in self._items), default=None)

    def min(self):
        return min((k for k, _ in self._items), default=None)

    def __repr__(self) -> str:
        if not self._items:
            return "{}"
        parts = []
        for k, c in self._items:
            s = _fmt(k)
            parts.extend([s] * c if c <= 3 else [f"{s}x{c}"])
        return "{" + ", ".join(parts) + "}"


def _fmt(x) -> str:
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(map(str, x))) + "}"
    if x == INF:
        return "inf"
    return repr(x)


EMPTY = Multiset()
