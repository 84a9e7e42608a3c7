"""Side-by-side runs of the analytical model and the simulator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .aggregate import aggregate_pair, solo
from .errors import UndefinedRatioError
from .missmodel import CacheConfig, EvalResult, evaluate, hit_miss_counts
from .rdist import build_profile
from .simulator import (
    EVERY_ACCESS,
    SimResult,
    error_rate,
    geometric_mean_abs_error,
    interleave_traces,
    simulate_flat_lru,
    simulate_hierarchy,
)
from .trace import AccessTrace


@dataclass(frozen=True)
class Validation:
    model: EvalResult
    sim: SimResult
    errors: tuple[tuple[float | None, ...], ...]  # [app][level]; None where undefined
    mean_abs_error: float


def validate(
    traces: Sequence[AccessTrace],
    config: CacheConfig,
    *,
    llc_update: str = EVERY_ACCESS,
    interleave: str = "proportional",
    aggregated_private: bool = False,
) -> Validation:
    profiles = [build_profile(t) for t in traces]
    agg = aggregate_pair(*profiles) if len(profiles) == 2 else solo(profiles[0])
    model = evaluate(profiles, agg, config, aggregated_private=aggregated_private)
    sim = simulate_hierarchy(traces, config, llc_update, interleave)
    table = []
    for m_s_row, m_r_row in zip(sim.misses, model.misses):
        row = []
        for m_s, m_r in zip(m_s_row, m_r_row):
            try:
                row.append(error_rate(m_s, m_r))
            except UndefinedRatioError:
                row.append(None)
        table.append(tuple(row))
    defined = [e for row in table for e in row if e is not None]
    return Validation(model, sim, tuple(table), geometric_mean_abs_error(defined))


def shared_cache_errors(
    trace_i: AccessTrace,
    trace_j: AccessTrace,
    sizes_lines: Sequence[int],
    interleave: str = "proportional",
) -> list[float]:
    """Error of the combined shared-cache miss count at each size.

    Single-level, fully associative shared cache; the reference is the
    simulated interleaved stream.
    """
    p_i, p_j = build_profile(trace_i), build_profile(trace_j)
    agg = aggregate_pair(p_i, p_j)
    merged = interleave_traces(trace_i, trace_j, interleave)
    out = []
    for size in sizes_lines:
        m_s = sum(m for _, m in simulate_flat_lru(merged, size))
        m_r = sum(hit_miss_counts(h, size)[1] for h in agg.per_app)
        out.append(error_rate(m_s, m_r))
    return out
