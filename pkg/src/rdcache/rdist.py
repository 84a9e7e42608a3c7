"""Reuse-distance profiling of a single application.

The reuse distance of an access is the number of distinct line addresses
touched strictly between it and the previous access to the same line
(``COLD`` for a first touch). The span is the number of accesses, distinct
or not, in that same gap; averaged per distance it gives the r-d table used
by :mod:`rdcache.aggregate`.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .trace import AccessTrace

COLD = None


class Fenwick:
    """Binary indexed tree over positions ``1..size`` holding 0/1 marks."""

    __slots__ = ("size", "tree")

    def __init__(self, size: int):
        self.size = size
        self.tree = [0] * (size + 1)

    def add(self, pos: int, delta: int) -> None:
        tree, n = self.tree, self.size
        while pos <= n:
            tree[pos] += delta
            pos += pos & -pos

    def prefix(self, pos: int) -> int:
        """Sum over positions ``1..pos``."""
        tree = self.tree
        total = 0
        while pos > 0:
            total += tree[pos]
            pos &= pos - 1
        return total


def reuse_distance_sequence(
    trace: AccessTrace | Sequence[int],
) -> tuple[list[int | None], list[int]]:
    """Return per-access ``(distances, spans)`` in O(n log n).

    A Fenwick tree marks, for every address seen so far, the position of its
    most recent access. The reuse distance of the access at position ``t``
    whose previous occurrence is ``p`` is then the number of marks in
    ``(p, t)``.
    """
    seq = trace.accesses if isinstance(trace, AccessTrace) else trace
    n = len(seq)
    marks = Fenwick(n)
    tree = marks.tree
    last: dict[int, int] = {}
    distances: list[int | None] = [COLD] * n
    spans = [0] * n
    live = 0  # number of marks, i.e. distinct addresses seen so far
    for t, addr in enumerate(seq, start=1):
        p = last.get(addr)
        if p is None:
            live += 1
        else:
            # marks in (p, t) = live - marks in [1, p]
            pos, below = p, 0
            while pos > 0:
                below += tree[pos]
                pos &= pos - 1
            distances[t - 1] = live - below
            spans[t - 1] = t - p - 1
            pos = p
            while pos <= n:
                tree[pos] -= 1
                pos += pos & -pos
        pos = t
        while pos <= n:
            tree[pos] += 1
            pos += pos & -pos
        last[addr] = t
    # The mark at t itself is added after the query, so `live - below`
    # counts marks strictly after p and strictly before t.
    return distances, spans


def reuse_distance_sequence_naive(
    trace: AccessTrace | Sequence[int],
) -> tuple[list[int | None], list[int]]:
    """Quadratic reference: count distinct addresses in each gap directly."""
    seq = list(trace.accesses if isinstance(trace, AccessTrace) else trace)
    distances: list[int | None] = []
    spans = []
    last: dict[int, int] = {}
    for t, addr in enumerate(seq):
        p = last.get(addr)
        if p is None:
            distances.append(COLD)
            spans.append(0)
        else:
            distances.append(len(set(seq[p + 1 : t])))
            spans.append(t - p - 1)
        last[addr] = t
    return distances, spans


@dataclass(frozen=True)
class ReuseHistogram:
    """Sparse reuse-distance histogram plus the count of cold (first-touch) accesses."""

    finite: Mapping[int, int] = field(default_factory=dict)
    cold_count: int = 0

    def __post_init__(self):
        cleaned = {}
        for r, c in sorted(self.finite.items()):
            if r < 0 or c < 0:
                raise ValueError(f"negative histogram entry ({r}, {c})")
            if c:
                cleaned[int(r)] = int(c)
        if self.cold_count < 0:
            raise ValueError("negative cold count")
        object.__setattr__(self, "finite", cleaned)

    @property
    def total(self) -> int:
        return self.cold_count + sum(self.finite.values())

    @cached_property
    def _cumulative(self) -> tuple[list[int], list[int]]:
        keys = list(self.finite)
        cum, running = [], 0
        for r in keys:
            running += self.finite[r]
            cum.append(running)
        return keys, cum

    def count_below(self, size: int) -> int:
        """Number of finite-distance accesses with distance < ``size``."""
        keys, cum = self._cumulative
        i = bisect_left(keys, size)
        return cum[i - 1] if i else 0

    def max_distance(self) -> int | None:
        return max(self.finite) if self.finite else None

    @classmethod
    def from_distances(cls, distances: Iterable[int | None]) -> "ReuseHistogram":
        counts = Counter(distances)
        cold = counts.pop(COLD, 0)
        return cls(dict(counts), cold)

    def __add__(self, other: "ReuseHistogram") -> "ReuseHistogram":
        merged = Counter(self.finite)
        merged.update(other.finite)
        return ReuseHistogram(dict(merged), self.cold_count + other.cold_count)


@dataclass(frozen=True)
class RdTable:
    """Mean span (accesses strictly between the pair) for each finite distance."""

    entries: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "entries", {int(r): float(d) for r, d in sorted(self.entries.items())}
        )

    def __getitem__(self, r: int) -> float:
        return self.entries[r]

    def __len__(self):
        return len(self.entries)

    @cached_property
    def nearest_index(self) -> tuple[list[float], list[int]]:
        """Distinct span values ascending, each paired with the smallest r having it."""
        best: dict[float, int] = {}
        for r, d in self.entries.items():
            if d not in best:  # entries iterate in ascending r
                best[d] = r
        spans = sorted(best)
        return spans, [best[d] for d in spans]

    def nearest_distance(self, target: float) -> int | None:
        """Key r whose span is closest to ``target``; ties go to the smaller r."""
        spans, keys = self.nearest_index
        if not spans:
            return None
        i = bisect_left(spans, target)
        lo, hi = max(i - 1, 0), min(i, len(spans) - 1)
        gap = min(abs(spans[lo] - target), abs(spans[hi] - target))
        # rounded gaps are monotone on each side of target, so ties are contiguous
        while lo > 0 and abs(spans[lo - 1] - target) == gap:
            lo -= 1
        while hi < len(spans) - 1 and abs(spans[hi + 1] - target) == gap:
            hi += 1
        return min(keys[k] for k in range(lo, hi + 1) if abs(spans[k] - target) == gap)


@dataclass(frozen=True)
class AppProfile:
    app_id: str
    histogram: ReuseHistogram
    rd_table: RdTable
    n: int
    footprint: int

    def __post_init__(self):
        if self.n != self.histogram.total:
            raise ValueError(f"n={self.n} disagrees with histogram total {self.histogram.total}")
        if self.footprint != self.histogram.cold_count:
            raise ValueError("footprint must equal the histogram's cold count")
        if set(self.rd_table.entries) != set(self.histogram.finite):
            raise ValueError("r-d table keys must match the histogram's finite distances")


def profile_from_sequences(
    app_id: str, distances: Sequence[int | None], spans: Sequence[int]
) -> AppProfile:
    hist = ReuseHistogram.from_distances(distances)
    span_sum: dict[int, int] = defaultdict(int)
    for r, s in zip(distances, spans):
        if r is not COLD:
            span_sum[r] += s
    table = RdTable({r: span_sum[r] / c for r, c in hist.finite.items()})
    return AppProfile(app_id, hist, table, hist.total, hist.cold_count)


def build_profile(trace: AccessTrace, app_id: str | None = None) -> AppProfile:
    distances, spans = reuse_distance_sequence(trace)
    return profile_from_sequences(app_id or trace.app_id, distances, spans)


def empty_profile(app_id: str = "idle") -> AppProfile:
    return AppProfile(app_id, ReuseHistogram(), RdTable(), 0, 0)
