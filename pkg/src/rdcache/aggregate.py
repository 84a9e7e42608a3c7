"""Aggregated reuse-distance model for two concurrently running applications.

Each finite reuse distance ``r`` of application *i* is stretched by the
number of distinct addresses application *j* is expected to touch inside
the same gap. No merged trace is built: the estimate uses only the two
stand-alone profiles.

For distance ``r`` with mean span ``d``::

    ratio = n_j / n_i
    delta = (d + 1) * ratio          # j-accesses landing in the gap
    u     = unique_count_lookup(j, delta)
    r'    = r + u

Cold accesses stay cold.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyInputError, UndefinedRatioError
from .rdist import AppProfile, ReuseHistogram


def access_ratio(profile_i: AppProfile, profile_j: AppProfile) -> Fraction:
    """Concurrent accesses of *j* per access of *i*, as an exact fraction."""
    if profile_i.n == 0:
        raise UndefinedRatioError(
            f"access ratio undefined: {profile_i.app_id!r} has no accesses"
        )
    return Fraction(profile_j.n, profile_i.n)


def interleaved_span(d: float, ratio: Fraction | float) -> float:
    """Expected number of partner accesses falling into a gap of ``d`` accesses.

    A gap of ``d`` accesses offers ``d + 1`` interleaving spots, each taking
    ``ratio`` partner accesses on average.
    """
    return (d + 1) * float(ratio)


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def unique_count_lookup(profile_j: AppProfile, delta: float) -> int:
    """Distinct partner addresses expected among ``delta`` partner accesses.

    Uses the r-d table backwards: the distance whose mean span is nearest to
    ``delta`` (smaller distance on ties). The result never exceeds
    ``ceil(delta)`` nor the partner's footprint.
    """
    if delta <= 0:
        return 0
    r_star = profile_j.rd_table.nearest_distance(delta)
    if r_star is None:
        # no reuse at all in j: every interleaved access is a new address
        return min(round_half_up(delta), profile_j.footprint)
    return min(r_star, math.ceil(delta), profile_j.footprint)


@dataclass(frozen=True)
class Shift:
    """One histogram point moved by the model, kept for inspection and tests."""

    r: int
    count: int
    d: float
    delta: float
    u: int

    @property
    def r_prime(self) -> int:
        return self.r + self.u


def shift_points(profile_i: AppProfile, profile_j: AppProfile) -> list[Shift]:
    if profile_j.n == 0:
        return [
            Shift(r, c, profile_i.rd_table[r], 0.0, 0)
            for r, c in profile_i.histogram.finite.items()
        ]
    ratio = access_ratio(profile_i, profile_j)
    out = []
    for r, c in profile_i.histogram.finite.items():
        d = profile_i.rd_table[r]
        delta = interleaved_span(d, ratio)
        out.append(Shift(r, c, d, delta, unique_count_lookup(profile_j, delta)))
    return out


def shift_histogram(profile_i: AppProfile, profile_j: AppProfile) -> ReuseHistogram:
    """Histogram of *i* as seen in the interleaved stream with *j* (H'_i)."""
    moved: Counter[int] = Counter()
    for s in shift_points(profile_i, profile_j):
        moved[s.r_prime] += s.count
    return ReuseHistogram(dict(moved), profile_i.histogram.cold_count)


@dataclass(frozen=True)
class AggregatedHistogram:
    """Shifted per-application histograms, in pair order, and their pointwise sum."""

    app_ids: tuple[str, ...]
    per_app: tuple[ReuseHistogram, ...]
    combined: ReuseHistogram

    def for_app(self, app_id: str) -> ReuseHistogram:
        return self.per_app[self.app_ids.index(app_id)]


def aggregate_pair(profile_i: AppProfile, profile_j: AppProfile) -> AggregatedHistogram:
    if profile_i.n == 0 and profile_j.n == 0:
        raise EmptyInputError("cannot aggregate two empty profiles")
    h_i = shift_histogram(profile_i, profile_j) if profile_i.n else profile_i.histogram
    h_j = shift_histogram(profile_j, profile_i) if profile_j.n else profile_j.histogram
    return AggregatedHistogram((profile_i.app_id, profile_j.app_id), (h_i, h_j), h_i + h_j)


def solo(profile: AppProfile) -> AggregatedHistogram:
    """Trivial aggregation of a single application running alone."""
    return AggregatedHistogram((profile.app_id,), (profile.histogram,), profile.histogram)
