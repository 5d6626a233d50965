"""Portable SplitMix64 generator.

Encoder and decoder must draw identical "random" initial weights, so the
generator is defined by its recurrence rather than delegated to numpy:

    state <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (mod 2**64)
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB      (mod 2**64)
    return z ^ (z >> 31)

Doubles in [0, 1) take the top 53 bits: ``(z >> 11) * 2**-53``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()


def band_frame_seed(band_index: int, frame_index: int) -> int:
    """Seed base for a band's training at a given frame boundary."""
    return mix64(((band_index & 0xFFFF) << 48) ^ (frame_index & 0xFFFFFFFFFFFF) ^ GOLDEN_GAMMA)
