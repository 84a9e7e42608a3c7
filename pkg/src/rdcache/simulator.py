"""Trace-driven LRU simulation: the ground truth the analytical model is checked against.

Applications run in separate address spaces, so a cache line is identified
by ``(owner, line_address)``; two applications never share a line even if
their line addresses coincide. Set index is ``line_address mod sets``.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ConfigError, UndefinedRatioError
from .missmodel import SHARED, CacheConfig
from .trace import AccessTrace

EVERY_ACCESS = "every_access"
ON_L1_MISS = "on_l1_miss"
LLC_UPDATE_MODES = (EVERY_ACCESS, ON_L1_MISS)


@dataclass(frozen=True)
class MergedTrace:
    """Interleaved stream of several applications; ``owners[t]`` indexes ``app_ids``."""

    app_ids: tuple[str, ...]
    owners: tuple[int, ...]
    lines: tuple[int, ...]

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return zip(self.owners, self.lines)

    def restrict(self, owner: int) -> list[int]:
        return [x for o, x in zip(self.owners, self.lines) if o == owner]

    @classmethod
    def single(cls, trace: AccessTrace) -> "MergedTrace":
        return cls((trace.app_id,), (0,) * len(trace), tuple(trace.accesses))


def _parse_policy(policy: str) -> tuple[int, int] | None:
    if policy == "proportional":
        return None
    parts = policy.removeprefix("round_robin_").removeprefix("round_robin:").split(":")
    try:
        k, m = (int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"interleave policy must be 'proportional' or 'k:m', got {policy!r}") from None
    if k < 1 or m < 1:
        raise ConfigError(f"round-robin burst lengths must be positive, got {policy!r}")
    return k, m


def interleave_traces(
    trace_i: AccessTrace, trace_j: AccessTrace, policy: str = "proportional"
) -> MergedTrace:
    """Merge two traces, keeping each one's internal order.

    ``proportional`` spreads both traces over the whole run: at step ``t`` of
    ``N = n_i + n_j`` the next access comes from *i* while *i* has emitted
    fewer than ``ceil(t * n_i / N)`` accesses, so each prefix stays within
    one access of the global ratio (*i* goes first on ties).
    ``"k:m"`` emits bursts of ``k`` accesses from *i* then ``m`` from *j*,
    appending whatever remains once either trace runs out.
    """
    a, b = trace_i.accesses, trace_j.accesses
    n_i, n_j = len(a), len(b)
    bursts = _parse_policy(policy)
    owners: list[int] = []
    lines: list[int] = []
    if bursts is None:
        total = n_i + n_j
        e_i = e_j = 0
        for t in range(1, total + 1):
            if e_i * total < t * n_i:
                owners.append(0)
                lines.append(a[e_i])
                e_i += 1
            else:
                owners.append(1)
                lines.append(b[e_j])
                e_j += 1
    else:
        k, m = bursts
        e_i = e_j = 0
        while e_i < n_i and e_j < n_j:
            chunk = a[e_i : e_i + k]
            owners.extend([0] * len(chunk))
            lines.extend(chunk)
            e_i += len(chunk)
            chunk = b[e_j : e_j + m]
            owners.extend([1] * len(chunk))
            lines.extend(chunk)
            e_j += len(chunk)
        owners.extend([0] * (n_i - e_i))
        lines.extend(a[e_i:])
        owners.extend([1] * (n_j - e_j))
        lines.extend(b[e_j:])
    return MergedTrace((trace_i.app_id, trace_j.app_id), tuple(owners), tuple(lines))


class LRUCache:
    """Set-associative LRU cache keyed by ``(owner, line)``.

    ``ways=None`` makes it fully associative.
    """

    def __init__(self, size_lines: int, ways: int | None = None):
        if size_lines < 1:
            raise ConfigError(f"cache must hold at least one line, got {size_lines}")
        if ways is None:
            ways = size_lines
        if ways < 1 or size_lines % ways:
            raise ConfigError(f"{size_lines} lines not divisible into {ways}-way sets")
        self.size_lines = size_lines
        self.ways = ways
        self.n_sets = size_lines // ways
        self.sets = [OrderedDict() for _ in range(self.n_sets)]

    def _set(self, key) -> OrderedDict:
        return self.sets[key[1] % self.n_sets]

    def __contains__(self, key) -> bool:
        return key in self._set(key)

    def touch(self, key) -> None:
        self._set(key).move_to_end(key)

    def insert(self, key):
        """Insert as most recent; return the evicted key, if any."""
        s = self._set(key)
        s[key] = None
        if len(s) > self.ways:
            victim, _ = s.popitem(last=False)
            return victim
        return None

    def remove(self, key) -> bool:
        s = self._set(key)
        if key in s:
            del s[key]
            return True
        return False

    def keys(self):
        for s in self.sets:
            yield from s


def simulate_flat_lru(
    trace: AccessTrace | MergedTrace, size_lines: int, ways: int | None = None
) -> tuple[tuple[int, int], ...]:
    """Per-application ``(hits, misses)`` for one LRU cache fed with ``trace``."""
    merged = MergedTrace.single(trace) if isinstance(trace, AccessTrace) else trace
    cache = LRUCache(size_lines, ways)
    hits = [0] * len(merged.app_ids)
    misses = [0] * len(merged.app_ids)
    if cache.n_sets == 1:
        # fully associative fast path
        lru: OrderedDict = cache.sets[0]
        cap = cache.ways
        for key in merged:
            if key in lru:
                lru.move_to_end(key)
                hits[key[0]] += 1
            else:
                misses[key[0]] += 1
                lru[key] = None
                if len(lru) > cap:
                    lru.popitem(last=False)
    else:
        for key in merged:
            if key in cache:
                cache.touch(key)
                hits[key[0]] += 1
            else:
                misses[key[0]] += 1
                cache.insert(key)
    return tuple(zip(hits, misses))


@dataclass(frozen=True)
class SimResult:
    """Per-application, per-level hit and miss counts from the simulator.

    Level ``l`` is accessed exactly ``misses[k][l-1]`` times by application ``k``
    (level 0 by every access).
    """

    app_ids: tuple[str, ...]
    accesses: tuple[int, ...]
    hits: tuple[tuple[int, ...], ...]
    misses: tuple[tuple[int, ...], ...]
    policy: dict = field(default_factory=dict)

    def level_totals(self) -> list[int]:
        return [sum(col) for col in zip(*self.misses)] if self.misses else []


class HierarchySimulator:
    """Inclusive multi-level LRU hierarchy with one private stack per core.

    Lines evicted from a level are back-invalidated from every level above
    it, which keeps each level a superset of the ones it serves.
    """

    def __init__(self, config: CacheConfig, llc_update: str = EVERY_ACCESS):
        if llc_update not in LLC_UPDATE_MODES:
            raise ConfigError(f"llc_update must be one of {LLC_UPDATE_MODES}, got {llc_update!r}")
        self.config = config
        self.llc_update = llc_update
        lines = config.size_lines()
        self.caches: list[list[LRUCache]] = []
        for level, size in zip(config.levels, lines):
            copies = 1 if level.scope == SHARED else config.core_count
            self.caches.append([LRUCache(size, level.ways) for _ in range(copies)])
        n_levels = len(config.levels)
        self.hits = [[0] * n_levels for _ in range(config.core_count)]
        self.misses = [[0] * n_levels for _ in range(config.core_count)]
        self.back_invalidations = 0

    def _cache(self, level: int, core: int) -> LRUCache:
        copies = self.caches[level]
        return copies[0] if len(copies) == 1 else copies[core]

    def access(self, core: int, line: int) -> int:
        """Simulate one reference; return the level that hit (``len(levels)`` for memory)."""
        key = (core, line)
        n_levels = len(self.caches)
        hit_level = n_levels
        for l in range(n_levels):
            if key in self._cache(l, core):
                hit_level = l
                break
        misses = self.misses[core]
        for l in range(hit_level):
            misses[l] += 1
        if hit_level < n_levels:
            self.hits[core][hit_level] += 1
            self._cache(hit_level, core).touch(key)
            if self.llc_update == EVERY_ACCESS:
                for l in range(hit_level + 1, n_levels):
                    self._cache(l, core).touch(key)
        for l in range(hit_level - 1, -1, -1):
            victim = self._cache(l, core).insert(key)
            if victim is not None:
                self._back_invalidate(l, victim)
        return hit_level

    def _back_invalidate(self, level: int, victim) -> None:
        owner = victim[0]
        for upper in range(level):
            if self._cache(upper, owner).remove(victim):
                self.back_invalidations += 1

    def inclusion_violations(self) -> list[tuple[int, int, tuple[int, int]]]:
        """Every ``(level, core, key)`` resident above a level that lacks it."""
        bad = []
        for l in range(len(self.caches) - 1):
            for copy in self.caches[l]:
                for key in copy.keys():
                    if key not in self._cache(l + 1, key[0]):
                        bad.append((l, key[0], key))
        return bad


def simulate_hierarchy(
    traces: Sequence[AccessTrace],
    config: CacheConfig,
    llc_update: str = EVERY_ACCESS,
    interleave: str = "proportional",
    check_inclusion_every: int = 0,
) -> SimResult:
    """Run one trace per core through an inclusive hierarchy.

    With ``check_inclusion_every > 0`` the inclusion property is asserted
    after every that many references (slow; meant for tests).
    """
    if len(traces) != config.core_count:
        raise ConfigError(f"{len(traces)} trace(s) for a {config.core_count}-core configuration")
    if len(traces) == 1:
        merged = MergedTrace.single(traces[0])
    elif len(traces) == 2:
        merged = interleave_traces(traces[0], traces[1], interleave)
    else:
        raise ConfigError("at most two concurrent traces are supported")
    sim = HierarchySimulator(config, llc_update)
    access = sim.access
    for t, (core, line) in enumerate(merged, start=1):
        access(core, line)
        if check_inclusion_every and t % check_inclusion_every == 0:
            bad = sim.inclusion_violations()
            if bad:
                raise AssertionError(f"inclusion violated after {t} references: {bad[:3]}")
    return SimResult(
        merged.app_ids,
        tuple(len(t) for t in traces),
        tuple(tuple(row) for row in sim.hits),
        tuple(tuple(row) for row in sim.misses),
        {
            "source": "simulator",
            "llc_update": llc_update,
            "interleave": interleave if len(traces) == 2 else None,
            "ways": [lv.ways for lv in config.levels],
            "back_invalidations": sim.back_invalidations,
        },
    )


def error_rate(m_s: int, m_r: int) -> float:
    """Signed relative error of a model miss count against the simulated one."""
    if m_s == 0:
        if m_r == 0:
            return 0.0
        raise UndefinedRatioError(f"error rate undefined: simulator saw no misses, model {m_r}")
    return (m_s - m_r) / m_s


def geometric_mean_abs_error(errors: Iterable[float]) -> float:
    """Geometric mean of ``1 + |e|``, minus one.

    Shifting by one keeps a single exact estimate from collapsing the mean
    to zero; for small errors the value is close to the plain mean of ``|e|``.
    """
    vals = [math.log1p(abs(e)) for e in errors]
    if not vals:
        return 0.0
    return math.expm1(sum(vals) / len(vals))
