"""Shared-cache miss prediction from per-application reuse-distance profiles."""

from .aggregate import AggregatedHistogram, aggregate_pair, shift_histogram
from .missmodel import CacheConfig, CacheLevelSpec, EvalResult, evaluate, hit_miss_counts, two_level_config
from .optimizer import DesignSpace, LevelRange, optimize, pareto_front
from .rdist import AppProfile, ReuseHistogram, build_profile, reuse_distance_sequence
from .simulator import interleave_traces, simulate_flat_lru, simulate_hierarchy
from .trace import AccessTrace, parse_trace, read_trace, to_line_trace

__version__ = "0.1.0"

__all__ = [
    "AccessTrace",
    "AggregatedHistogram",
    "AppProfile",
    "CacheConfig",
    "CacheLevelSpec",
    "DesignSpace",
    "EvalResult",
    "LevelRange",
    "ReuseHistogram",
    "aggregate_pair",
    "build_profile",
    "evaluate",
    "hit_miss_counts",
    "interleave_traces",
    "optimize",
    "pareto_front",
    "parse_trace",
    "read_trace",
    "reuse_distance_sequence",
    "shift_histogram",
    "simulate_flat_lru",
    "simulate_hierarchy",
    "to_line_trace",
    "two_level_config",
]
