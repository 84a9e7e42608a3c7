"""Exhaustive scan over power-of-2 cache sizes.

Two formulations are supported:

* budget: minimize slowdown ``f`` subject to cost ``g <= G``
* slowdown: minimize cost ``g`` subject to ``f <= F``

The aggregated histograms do not depend on cache sizes, so they are built
once and reused for every candidate configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from .aggregate import AggregatedHistogram, aggregate_pair
from .errors import ConfigError
from .missmodel import (
    PRIVATE,
    SCOPES,
    CacheConfig,
    CacheLevelSpec,
    EvalResult,
    evaluate,
)
from .rdist import AppProfile
from .trace import DEFAULT_LINE_SIZE, check_line_size, is_power_of_two

BUDGET = "budget"
SLOWDOWN = "slowdown"


@dataclass(frozen=True)
class LevelRange:
    min_size_bytes: int
    max_size_bytes: int
    ways: int | None = None
    scope: str = PRIVATE
    miss_penalty_cycles: int = 0
    unit_cost: float = 0

    def sizes(self) -> list[int]:
        out, s = [], self.min_size_bytes
        while s <= self.max_size_bytes:
            out.append(s)
            s *= 2
        return out


@dataclass(frozen=True)
class DesignSpace:
    levels: tuple[LevelRange, ...]
    line_size_bytes: int = DEFAULT_LINE_SIZE
    core_count: int = 2

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        check_line_size(self.line_size_bytes)
        if not self.levels:
            raise ConfigError("design space needs at least one level")
        for i, lv in enumerate(self.levels, start=1):
            if not (is_power_of_two(lv.min_size_bytes) and is_power_of_two(lv.max_size_bytes)):
                raise ConfigError(f"L{i} bounds must be powers of 2")
            if lv.min_size_bytes > lv.max_size_bytes:
                raise ConfigError(f"L{i} minimum exceeds maximum")
            if lv.min_size_bytes < self.line_size_bytes:
                raise ConfigError(f"L{i} minimum is smaller than one line")
            if lv.scope not in SCOPES:
                raise ConfigError(f"L{i} scope must be one of {SCOPES}")
            if lv.ways is not None:
                min_lines = lv.min_size_bytes // self.line_size_bytes
                if not is_power_of_two(lv.ways) or min_lines % lv.ways:
                    raise ConfigError(
                        f"L{i}: {lv.ways} ways must be a power of 2 dividing {min_lines} lines"
                    )

    def config(self, sizes: Sequence[int]) -> CacheConfig:
        return CacheConfig(
            tuple(
                CacheLevelSpec(s, lv.ways, lv.scope, lv.miss_penalty_cycles, lv.unit_cost)
                for s, lv in zip(sizes, self.levels)
            ),
            self.line_size_bytes,
            self.core_count,
        )


def enumerate_space(space: DesignSpace) -> Iterator[CacheConfig]:
    """Every strictly increasing size assignment, in ascending lexicographic order."""
    for sizes in product(*(lv.sizes() for lv in space.levels)):
        if all(a < b for a, b in zip(sizes, sizes[1:])):
            yield space.config(sizes)


@dataclass(frozen=True)
class DesignPoint:
    config: CacheConfig
    eval: EvalResult
    feasible: bool

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.config.sizes

    @property
    def f(self) -> float:
        return self.eval.objective_f

    @property
    def g(self) -> float:
        return self.eval.cost_g


@dataclass(frozen=True)
class OptimizationResult:
    mode: str
    limit: float
    winner: DesignPoint | None  # None: no configuration satisfies the constraint
    ranked: tuple[DesignPoint, ...]  # feasible points, best first
    evaluated: tuple[DesignPoint, ...]  # all points in enumeration order

    @property
    def infeasible(self) -> bool:
        return self.winner is None


def rank_key(mode: str):
    if mode == BUDGET:
        return lambda p: (p.f, p.g, p.sizes)
    if mode == SLOWDOWN:
        return lambda p: (p.g, p.f, p.sizes)
    raise ConfigError(f"mode must be {BUDGET!r} or {SLOWDOWN!r}, got {mode!r}")


def is_feasible(mode: str, limit: float, f: float, g: float) -> bool:
    return g <= limit if mode == BUDGET else f <= limit


def optimize(
    profiles: Sequence[AppProfile],
    space: DesignSpace,
    mode: str,
    limit: float = math.inf,
    *,
    agg: AggregatedHistogram | None = None,
    aggregated_private: bool = False,
) -> OptimizationResult:
    """Scan ``space`` and return the best feasible design plus the full ranking.

    Budget mode breaks ties on lower cost, slowdown mode on lower slowdown,
    then both on the lexicographically smaller size tuple.
    """
    key = rank_key(mode)
    if not profiles or all(p.n == 0 for p in profiles):
        raise ConfigError("optimization needs at least one non-empty profile")
    if len(profiles) != space.core_count:
        raise ConfigError(
            f"{len(profiles)} profile(s) for a {space.core_count}-core design space"
        )
    if agg is None and len(profiles) == 2:
        agg = aggregate_pair(profiles[0], profiles[1])
    points = []
    for config in enumerate_space(space):
        ev = evaluate(profiles, agg, config, aggregated_private=aggregated_private)
        points.append(DesignPoint(config, ev, is_feasible(mode, limit, ev.objective_f, ev.cost_g)))
    ranked = sorted((p for p in points if p.feasible), key=key)
    return OptimizationResult(
        mode, limit, ranked[0] if ranked else None, tuple(ranked), tuple(points)
    )


def pareto_front(points: Sequence[DesignPoint]) -> list[DesignPoint]:
    """Points not dominated in (f, g), sorted by cost.

    Identical (f, g) points collapse to the one with the smallest sizes.
    """
    ordered = sorted(points, key=lambda p: (p.g, p.f, p.sizes))
    front: list[DesignPoint] = []
    best_f = math.inf
    for p in ordered:
        # anything earlier has g <= p.g, so p survives only with strictly lower f
        if p.f < best_f:
            front.append(p)
            best_f = p.f
    return front

