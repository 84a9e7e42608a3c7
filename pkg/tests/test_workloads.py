import pytest
from hypothesis import given, settings, strategies as st

from rdcache.errors import ConfigError
from rdcache.rdist import COLD, build_profile, reuse_distance_sequence, reuse_distance_sequence_naive
from rdcache.workloads import KINDS, PRESETS, WorkloadSpec, _iroot, generate, preset, zipf_weights


def test_cyclic_sweep():
    t = generate(WorkloadSpec("cyclic_sweep", 4, 12))
    assert list(t.accesses) == [0, 1, 2, 3] * 3
    distances, _ = reuse_distance_sequence(t)
    assert distances[:4] == [COLD] * 4
    assert set(distances[4:]) == {3}


@pytest.mark.parametrize("kind", KINDS)
def test_empty_length(kind):
    assert len(generate(WorkloadSpec(kind, 10, 0))) == 0


def test_zipf_against_quadratic_oracle():
    t = generate(WorkloadSpec("zipf_reuse", 256, 10**4, seed=11))
    fast = build_profile(t)
    distances, _ = reuse_distance_sequence_naive(t)
    finite = [d for d in distances if d is not COLD]
    assert fast.histogram.finite == {r: finite.count(r) for r in set(finite)}
    # skewed popularity: most reuse happens at short distances
    near = sum(c for r, c in fast.histogram.finite.items() if r < 32)
    assert near > 0.5 * sum(fast.histogram.finite.values())


@settings(max_examples=40)
@given(st.sampled_from(KINDS), st.integers(1, 64), st.integers(0, 400), st.integers(0, 2**32))
def test_footprint_bound_and_determinism(kind, footprint, length, seed):
    spec = WorkloadSpec(kind, footprint, length, seed)
    a, b = generate(spec), generate(spec)
    assert a == b
    distinct = len(set(a.accesses))
    assert distinct <= footprint
    if kind in ("cyclic_sweep", "pointer_chase") and length >= footprint:
        assert distinct == footprint


def test_pointer_chase_is_single_cycle():
    t = generate(WorkloadSpec("pointer_chase", 50, 150, seed=3))
    distances, _ = reuse_distance_sequence(t)
    assert set(distances[50:]) == {49}


def test_stride_and_base():
    t = generate(WorkloadSpec("cyclic_sweep", 3, 6, params={"stride": 4, "base": 100}))
    assert list(t.accesses) == [100, 104, 108] * 2


def test_seed_changes_trace():
    a = generate(WorkloadSpec("random_uniform", 100, 200, seed=1))
    b = generate(WorkloadSpec("random_uniform", 100, 200, seed=2))
    assert a != b


def test_known_values_are_stable():
    # frozen output: guards against generator drift across versions
    t = generate(WorkloadSpec("zipf_reuse", 16, 12, seed=5, params={"exponent": 1.0}))
    assert list(t.accesses) == [3, 2, 2, 13, 3, 2, 4, 12, 2, 9, 4, 2]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="nope", footprint_lines=1, length=1),
        dict(kind="cyclic_sweep", footprint_lines=0, length=1),
        dict(kind="cyclic_sweep", footprint_lines=1, length=-1),
        dict(kind="cyclic_sweep", footprint_lines=1, length=1, params={"exponent": 1}),
        dict(kind="zipf_reuse", footprint_lines=1, length=1, params={"exponent": 0}),
        dict(kind="zipf_reuse", footprint_lines=1, length=1, params={"speed": 2}),
        dict(kind="cyclic_sweep", footprint_lines=1, length=1, params={"stride": 0}),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigError):
        WorkloadSpec(**kwargs)


def test_iroot():
    for q in (1, 2, 3, 7):
        for x in (0, 1, 2, 15, 16, 17, 10**30, 2**64 + 1):
            y = _iroot(x, q)
            assert y**q <= x < (y + 1) ** q


def test_zipf_weights_decrease():
    from fractions import Fraction

    w = zipf_weights(100, Fraction(9, 10))
    assert all(a >= b for a, b in zip(w, w[1:]))
    assert w[0] == 2**32


def test_presets():
    labels = {label for label, _ in PRESETS.values()}
    assert labels == {"memory-bound", "cpu-bound-like"}
    spec = preset("zipf-hot", 100, seed=4)
    assert spec.length == 100 and spec.app_id == "zipf-hot"
    with pytest.raises(ConfigError):
        preset("nope", 10)
