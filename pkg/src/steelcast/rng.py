"""Deterministic pseudo-random numbers for splits, folds and synthetic data.

The generator is SplitMix64 (Steele, Lea & Flood 2014; also the seeding
routine recommended for the xoshiro family). It is fully specified by the
three constants below, so identically seeded runs produce identical bytes on
every platform and library version. numpy's Generator does not promise
stream stability across releases, which is why the toolkit does not use it
for anything reproducibility-critical.

Integer draws use rejection sampling (no modulo bias), shuffling is
Fisher-Yates, and normal deviates come from the Box-Muller transform.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK64
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> list[int]:
        idx = list(range(n))
        self.shuffle(idx)
        return idx

    def normal(self) -> float:
        """Standard normal deviate (Box-Muller, pairs cached)."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        # u1 in (0, 1] so the log is finite
        u1 = 1.0 - self.random()
        u2 = self.random()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)


def derive_seed(seed: int, *streams: int) -> int:
    """Derive an independent child seed, e.g. one per CV repeat."""
    rng = SplitMix64(seed)
    out = rng.next_u64()
    for s in streams:
        out = SplitMix64(out ^ (s & _MASK64)).next_u64()
    return out
