"""Histogram-based miss counting for single caches and inclusive hierarchies.

For a fully associative LRU cache of ``S`` lines an access hits iff its
reuse distance is below ``S``, so one histogram answers every cache size.
Private levels read the stand-alone histogram of their core's application;
shared levels read the aggregated (shifted) histogram.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .aggregate import AggregatedHistogram
from .errors import ConfigError
from .rdist import AppProfile, ReuseHistogram
from .trace import DEFAULT_LINE_SIZE, check_line_size, is_power_of_two

PRIVATE = "private"
SHARED = "shared"
SCOPES = (PRIVATE, SHARED)

DEFAULT_L1_PENALTY = 10
DEFAULT_LLC_PENALTY = 130


@dataclass(frozen=True)
class CacheLevelSpec:
    size_bytes: int
    ways: int | None = None  # None: fully associative
    scope: str = PRIVATE
    miss_penalty_cycles: int = 0
    unit_cost: float = 0

    def __post_init__(self):
        if not is_power_of_two(self.size_bytes):
            raise ConfigError(f"cache size must be a positive power of 2, got {self.size_bytes!r}")
        if self.ways is not None and (not isinstance(self.ways, int) or self.ways < 1):
            raise ConfigError(f"ways must be a positive integer or FULL, got {self.ways!r}")
        if self.scope not in SCOPES:
            raise ConfigError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        if self.miss_penalty_cycles < 0:
            raise ConfigError("miss penalty must be non-negative")
        if self.unit_cost < 0:
            raise ConfigError("unit cost must be non-negative")

    def lines(self, line_size_bytes: int) -> int:
        return self.size_bytes // line_size_bytes


@dataclass(frozen=True)
class CacheConfig:
    """Inclusive hierarchy, ordered from L1 to the last level."""

    levels: tuple[CacheLevelSpec, ...]
    line_size_bytes: int = DEFAULT_LINE_SIZE
    core_count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        check_line_size(self.line_size_bytes)
        if not self.levels:
            raise ConfigError("a cache configuration needs at least one level")
        if not isinstance(self.core_count, int) or self.core_count < 1:
            raise ConfigError(f"core count must be a positive integer, got {self.core_count!r}")
        for i, level in enumerate(self.levels, start=1):
            if level.size_bytes < self.line_size_bytes:
                raise ConfigError(f"L{i} is smaller than one {self.line_size_bytes}-byte line")
            if level.ways is not None and level.lines(self.line_size_bytes) % level.ways:
                raise ConfigError(
                    f"L{i}: {level.lines(self.line_size_bytes)} lines not divisible by {level.ways} ways"
                )
        for i in range(1, len(self.levels)):
            if self.levels[i].size_bytes <= self.levels[i - 1].size_bytes:
                raise ConfigError("cache sizes must strictly increase from L1 to the last level")
            if self.levels[i - 1].scope == SHARED and self.levels[i].scope == PRIVATE:
                raise ConfigError("a private level cannot sit below a shared level")
        if self.core_count > 1 and self.levels[-1].scope != SHARED:
            raise ConfigError("the last level must be shared when core_count > 1")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(level.size_bytes for level in self.levels)

    def size_lines(self) -> list[int]:
        return [level.lines(self.line_size_bytes) for level in self.levels]

    def instances(self, level: CacheLevelSpec) -> int:
        return self.core_count if level.scope == PRIVATE else 1


def two_level_config(
    l1_bytes: int,
    l2_bytes: int,
    *,
    line_size_bytes: int = DEFAULT_LINE_SIZE,
    core_count: int = 2,
    ways: tuple[int | None, int | None] = (None, None),
    penalties: tuple[int, int] = (DEFAULT_L1_PENALTY, DEFAULT_LLC_PENALTY),
    unit_costs: tuple[float, float] = (1, 1),
) -> CacheConfig:
    """Private L1 per core plus one shared last-level cache."""
    return CacheConfig(
        (
            CacheLevelSpec(l1_bytes, ways[0], PRIVATE, penalties[0], unit_costs[0]),
            CacheLevelSpec(l2_bytes, ways[1], SHARED, penalties[1], unit_costs[1]),
        ),
        line_size_bytes,
        core_count,
    )


def hit_miss_counts(h: ReuseHistogram, size_lines: int) -> tuple[int, int]:
    """``(hits, misses)`` of a fully associative LRU cache holding ``size_lines`` lines."""
    if size_lines < 1:
        raise ConfigError(f"cache must hold at least one line, got {size_lines}")
    hits = h.count_below(size_lines)
    return hits, h.total - hits


@dataclass(frozen=True)
class EvalResult:
    """Per-application, per-level miss counts with the slowdown and cost totals.

    ``misses[k][l]`` is the miss count of application ``k`` at level ``l``.
    """

    app_ids: tuple[str, ...]
    accesses: tuple[int, ...]
    misses: tuple[tuple[int, ...], ...]
    objective_f: float = 0
    cost_g: float = 0
    policy: dict = field(default_factory=dict)

    def level_totals(self) -> list[int]:
        return [sum(col) for col in zip(*self.misses)] if self.misses else []

    def hits(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for n, row in zip(self.accesses, self.misses):
            upstream = (n,) + row[:-1]
            out.append(tuple(a - m for a, m in zip(upstream, row)))
        return tuple(out)


def _check_pair(profiles: Sequence[AppProfile], agg, config: CacheConfig) -> None:
    if len(profiles) != config.core_count:
        raise ConfigError(
            f"{len(profiles)} application profile(s) for a {config.core_count}-core configuration"
        )
    if len(profiles) > 2:
        raise ConfigError("the contention model covers at most two applications")
    if agg is not None and len(agg.per_app) != len(profiles):
        raise ConfigError("aggregated histogram does not match the profile list")


def hierarchy_miss_counts(
    profiles: Sequence[AppProfile],
    agg: AggregatedHistogram | None,
    config: CacheConfig,
    *,
    aggregated_private: bool = False,
) -> tuple[tuple[int, ...], ...]:
    """Miss counts ``M[k][l]`` for each application ``k`` and level ``l``.

    ``agg`` may be ``None`` for a single application. With
    ``aggregated_private`` the shifted histograms are used at private levels
    too (the literal reading of the original model; physically a private
    cache sees no interleaving).

    A level can never miss more often than the level above it, since only
    upstream misses reach it; the count is capped accordingly.
    """
    _check_pair(profiles, agg, config)
    lines = config.size_lines()
    out = []
    for k, profile in enumerate(profiles):
        shifted = agg.per_app[k] if agg is not None else profile.histogram
        row = []
        upstream = profile.n
        for level, size in zip(config.levels, lines):
            use_shifted = level.scope == SHARED or aggregated_private
            _, misses = hit_miss_counts(shifted if use_shifted else profile.histogram, size)
            misses = min(misses, upstream)
            row.append(misses)
            upstream = misses
        out.append(tuple(row))
    return tuple(out)


def slowdown_objective(misses: Sequence[Sequence[int]], config: CacheConfig) -> float:
    """Sum over levels of miss penalty times the level's total miss count."""
    return sum(
        level.miss_penalty_cycles * sum(row[l] for row in misses)
        for l, level in enumerate(config.levels)
    )


def cache_cost(config: CacheConfig) -> float:
    """Sum over levels of unit cost times size, private levels counted once per core."""
    return sum(lv.unit_cost * lv.size_bytes * config.instances(lv) for lv in config.levels)


def evaluate(
    profiles: Sequence[AppProfile],
    agg: AggregatedHistogram | None,
    config: CacheConfig,
    *,
    aggregated_private: bool = False,
) -> EvalResult:
    misses = hierarchy_miss_counts(profiles, agg, config, aggregated_private=aggregated_private)
    return EvalResult(
        tuple(p.app_id for p in profiles),
        tuple(p.n for p in profiles),
        misses,
        slowdown_objective(misses, config),
        cache_cost(config),
        {"source": "model", "private_levels": "aggregated" if aggregated_private else "standalone"},
    )
