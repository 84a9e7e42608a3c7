import random

import pytest
from hypothesis import given, settings, strategies as st

from rdcache.rdist import (
    COLD,
    AppProfile,
    RdTable,
    ReuseHistogram,
    build_profile,
    reuse_distance_sequence,
    reuse_distance_sequence_naive,
)
from rdcache.trace import AccessTrace

traces = st.lists(st.integers(0, 40), max_size=300).map(lambda xs: AccessTrace("h", xs))


def test_fig2_distances(fig2):
    distances, _ = reuse_distance_sequence(fig2)
    assert distances == [COLD, COLD, COLD, 2, COLD, 3, 0, 2, 0, 1]


def test_fig2_spans_match_brute_force(fig2):
    # spans frozen from a direct count of accesses strictly between each same-address pair
    seq = list(fig2.accesses)
    brute = []
    for t, a in enumerate(seq):
        prev = [p for p in range(t) if seq[p] == a]
        brute.append(t - prev[-1] - 1 if prev else 0)
    _, spans = reuse_distance_sequence(fig2)
    assert spans == brute
    finite_positions = [k + 1 for k, d in enumerate(reuse_distance_sequence(fig2)[0]) if d is not COLD]
    assert finite_positions == [4, 6, 7, 8, 9, 10]
    assert [spans[k - 1] for k in finite_positions] == [2, 3, 0, 3, 0, 2]


def test_immediate_reuse():
    assert reuse_distance_sequence([7, 7, 7]) == ([COLD, 0, 0], [0, 0, 0])


def test_empty():
    assert reuse_distance_sequence([]) == ([], [])
    p = build_profile(AccessTrace("e", []))
    assert p.histogram.finite == {} and p.histogram.cold_count == 0
    assert p.n == 0 and p.footprint == 0


def test_fig2_profile(fig2):
    p = build_profile(fig2)
    assert p.histogram.finite == {0: 2, 1: 1, 2: 2, 3: 1}
    assert p.histogram.cold_count == 4
    assert p.histogram.total == 10
    assert p.rd_table.entries == {0: 0.0, 1: 2.0, 2: 2.5, 3: 3.0}
    assert (p.n, p.footprint) == (10, 4)


@settings(max_examples=300)
@given(traces)
def test_fast_matches_naive(trace):
    assert reuse_distance_sequence(trace) == reuse_distance_sequence_naive(trace)


def test_fast_matches_naive_long_random():
    rng = random.Random(7)
    for pool in (1, 3, 64, 1024):
        seq = [rng.randrange(pool) for _ in range(3000)]
        assert reuse_distance_sequence(seq) == reuse_distance_sequence_naive(seq)


@given(traces)
def test_profile_invariants(trace):
    p = build_profile(trace)
    assert p.histogram.total == len(trace)
    assert p.histogram.cold_count == len(set(trace.accesses))
    for r, d in p.rd_table.entries.items():
        assert d >= r


@given(traces, st.randoms(use_true_random=False))
def test_relabeling_invariance(trace, rnd):
    labels = list(set(trace.accesses))
    new = rnd.sample(range(10**6), len(labels))
    mapping = dict(zip(labels, new))
    relabeled = [mapping[a] for a in trace.accesses]
    assert reuse_distance_sequence(relabeled) == reuse_distance_sequence(trace)


def test_histogram_drops_zero_counts_and_sums():
    h = ReuseHistogram({3: 0, 1: 2}, 1) + ReuseHistogram({1: 1, 5: 4}, 2)
    assert h.finite == {1: 3, 5: 4}
    assert h.cold_count == 3 and h.total == 10


def test_histogram_rejects_negative():
    with pytest.raises(ValueError):
        ReuseHistogram({1: -1})


def test_profile_invariants_enforced():
    h = ReuseHistogram({0: 1}, 1)
    with pytest.raises(ValueError):
        AppProfile("x", h, RdTable({0: 0.0}), 3, 1)
    with pytest.raises(ValueError):
        AppProfile("x", h, RdTable({1: 0.0}), 2, 1)


def test_nearest_distance_tie_goes_to_smaller_r():
    table = RdTable({0: 0.0, 1: 2.0, 2: 2.5, 3: 3.0})
    assert table.nearest_distance(2.25) == 1  # equidistant from 2.0 and 2.5
    assert table.nearest_distance(2.75) == 2
    assert table.nearest_distance(100.0) == 3
    assert RdTable({4: 5.0, 2: 5.0}).nearest_distance(5.0) == 2
    assert RdTable().nearest_distance(1.0) is None


@given(
    st.dictionaries(st.integers(0, 50), st.floats(0, 200, allow_nan=False), min_size=1),
    st.floats(0, 300, allow_nan=False),
)
def test_nearest_distance_matches_exhaustive_scan(entries, target):
    table = RdTable(entries)
    best = min(table.entries, key=lambda r: (abs(table.entries[r] - target), r))
    assert table.nearest_distance(target) == best
