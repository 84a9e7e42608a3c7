"""Seeded synthetic trace generators.

Generators use only integer arithmetic on top of :class:`random.Random`, so
a spec produces the same trace on every platform.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import accumulate
from typing import Any, Mapping

from .errors import ConfigError
from .trace import DEFAULT_LINE_SIZE, AccessTrace

KINDS = ("cyclic_sweep", "zipf_reuse", "random_uniform", "pointer_chase")

_ZIPF_SCALE = 1 << 32


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str
    footprint_lines: int
    length: int
    seed: int = 0
    params: Mapping[str, Any] = field(default_factory=dict)
    app_id: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown workload kind {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.footprint_lines, int) or self.footprint_lines < 1:
            raise ConfigError(f"footprint must be a positive integer, got {self.footprint_lines!r}")
        if not isinstance(self.length, int) or self.length < 0:
            raise ConfigError(f"length must be a non-negative integer, got {self.length!r}")
        unknown = set(self.params) - {"stride", "base", "exponent"}
        if unknown:
            raise ConfigError(f"unknown workload parameter(s): {sorted(unknown)}")
        if int(self.params.get("stride", 1)) < 1:
            raise ConfigError("stride must be >= 1")
        if int(self.params.get("base", 0)) < 0:
            raise ConfigError("base must be >= 0")
        if "exponent" in self.params and self.kind != "zipf_reuse":
            raise ConfigError("exponent applies only to zipf_reuse")
        if self.kind == "zipf_reuse" and _exponent(self.params) <= 0:
            raise ConfigError("zipf exponent must be positive")


def _exponent(params) -> Fraction:
    try:
        return Fraction(str(params.get("exponent", 1))).limit_denominator(64)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad zipf exponent {params.get('exponent')!r}") from None


def _iroot(x: int, q: int) -> int:
    """Largest integer y with y**q <= x."""
    if x < 2 or q == 1:
        return x
    y = 1 << -(-x.bit_length() // q)  # upper bound
    while True:
        z = ((q - 1) * y + x // y ** (q - 1)) // q
        if z >= y:
            break
        y = z
    while y**q > x:
        y -= 1
    while (y + 1) ** q <= x:
        y += 1
    return y


def zipf_weights(footprint: int, exponent: Fraction) -> list[int]:
    """Integer popularity weights ``floor(SCALE / k**exponent)`` for ranks 1..footprint."""
    p, q = exponent.numerator, exponent.denominator
    scale_q = _ZIPF_SCALE**q
    return [max(1, _iroot(scale_q // k**p, q)) for k in range(1, footprint + 1)]


def _sattolo_cycle(n: int, rng: random.Random) -> list[int]:
    """Random cyclic permutation: following it from any start visits all ``n`` items."""
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def generate(spec: WorkloadSpec, line_size_bytes: int = DEFAULT_LINE_SIZE) -> AccessTrace:
    rng = random.Random(spec.seed)
    f, n = spec.footprint_lines, spec.length
    stride = int(spec.params.get("stride", 1))
    base = int(spec.params.get("base", 0))

    if spec.kind == "cyclic_sweep":
        slots = [i % f for i in range(n)]
    elif spec.kind == "random_uniform":
        slots = [rng.randrange(f) for _ in range(n)]
    elif spec.kind == "pointer_chase":
        succ = _sattolo_cycle(f, rng)
        slots, cur = [], 0
        for _ in range(n):
            slots.append(cur)
            cur = succ[cur]
    else:  # zipf_reuse
        cum = list(accumulate(zipf_weights(f, _exponent(spec.params))))
        total = cum[-1]
        rank_to_slot = list(range(f))
        rng.shuffle(rank_to_slot)
        slots = [rank_to_slot[bisect_right(cum, rng.randrange(total))] for _ in range(n)]

    app_id = spec.app_id or f"{spec.kind}-{f}"
    return AccessTrace(app_id, tuple(base + s * stride for s in slots), line_size_bytes)


# Named presets for validation suites. "memory-bound" ones overflow the
# 512-2048-line shared caches used in validation; "cpu-bound-like" ones mostly fit.
PRESETS: dict[str, tuple[str, WorkloadSpec]] = {
    "sweep-xl": ("memory-bound", WorkloadSpec("cyclic_sweep", 2900, 0)),
    "sweep-l": ("memory-bound", WorkloadSpec("cyclic_sweep", 1300, 0)),
    "sweep-m": ("cpu-bound-like", WorkloadSpec("cyclic_sweep", 700, 0)),
    "sweep-s": ("cpu-bound-like", WorkloadSpec("cyclic_sweep", 230, 0)),
    "zipf-wide": ("memory-bound", WorkloadSpec("zipf_reuse", 16384, 0, params={"exponent": 0.9})),
    "zipf-mid": ("memory-bound", WorkloadSpec("zipf_reuse", 4096, 0, params={"exponent": 1.0})),
    "zipf-hot": ("cpu-bound-like", WorkloadSpec("zipf_reuse", 2048, 0, params={"exponent": 1.2})),
    "uniform-l": ("memory-bound", WorkloadSpec("random_uniform", 3000, 0)),
    "chase-m": ("cpu-bound-like", WorkloadSpec("pointer_chase", 900, 0)),
}


def preset(name: str, length: int, seed: int = 0, app_id: str | None = None) -> WorkloadSpec:
    try:
        _, template = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(template, length=length, seed=seed, app_id=app_id or name)
