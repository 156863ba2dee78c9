"""Deterministic pseudo-random generator (splitmix64).

Every random draw in this package goes through SplitMix64 so that runs
reproduce bit for bit from a 64-bit seed, on any platform and in any
implementation language that follows the same standard constants.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """splitmix64 stream with the reference constants."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def random(self) -> float:
        """Uniform float in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + int(self.random() * (hi - lo + 1))

    def shuffle(self, items: list) -> None:
        """Fisher-Yates shuffle in place."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]


def derive_seed(root: int, *parts: int) -> int:
    """Stable sub-stream seed from a root seed and integer coordinates.

    Used to give each (trial, n, ...) cell of an experiment its own
    independent stream while staying reproducible from the root seed.
    """
    out = SplitMix64(root).next_u64()
    for p in parts:
        out = SplitMix64(out ^ (p & MASK64)).next_u64()
    return out
