"""Mid-rise uniform quantizer with Jayant one-word-memory step adaptation.

Codes are signed integers in ``[-2**(B-1), 2**(B-1) - 1]`` and map to the
reconstruction level ``(code + 0.5) * step``; code ``c`` and ``-c - 1``
are mirror images with magnitude index ``c`` (for ``c >= 0``). After every
sample the step is multiplied by the factor for that magnitude index and
clamped to ``[STEP_MIN, STEP_MAX]``.

The multiplier tables and step constants are part of the stream format:
changing any of them breaks decoding of existing streams.
"""

from __future__ import annotations

import math
from enum import Enum

from .errors import CorruptStreamError

MULTIPLIERS = {
    2: (0.8, 1.6),
    3: (0.9, 0.9, 1.25, 1.75),
    4: (0.9, 0.9, 0.9, 0.9, 1.2, 1.6, 2.0, 2.4),
    5: (0.9, 0.9, 0.9, 0.9, 0.95, 0.95, 0.95, 0.95,
        1.2, 1.5, 1.8, 2.1, 2.4, 2.7, 3.0, 3.3),
}

STEP_MIN = 1e-6
STEP_MAX = 1.0
STEP_INITIAL = 0.02


class Mode(Enum):
    RATE_32K = 0
    RATE_24K = 1

    @property
    def bits_per_band(self) -> tuple[int, ...]:
        return BIT_ALLOCATION[self]

    @property
    def bits_per_block(self) -> int:
        return sum(self.bits_per_band)

    @property
    def label(self) -> str:
        return "32k" if self is Mode.RATE_32K else "24k"

    @classmethod
    def from_label(cls, label: str) -> Mode:
        for m in cls:
            if m.label == label:
                return m
        raise ValueError(f"unknown mode {label!r} (expected 32k or 24k)")


# the "24k" allocation sums to 50 bits per 16-sample block, i.e. 25 kbit/s
BIT_ALLOCATION = {
    Mode.RATE_32K: (5, 5, 5, 5, 5, 5, 5, 5, 4, 4, 4, 4, 2, 2, 2, 2),
    Mode.RATE_24K: (5, 5, 4, 4, 3, 3, 3, 3, 3, 3, 3, 3, 2, 2, 2, 2),
}


def code_range(bits: int) -> tuple[int, int]:
    half = 1 << (bits - 1)
    return -half, half - 1


class AdaptiveQuantizer:
    """Quantizer state for one subband.

    ``quantize`` (encoder) and ``dequantize`` (decoder) apply the same step
    update, so two instances fed the same code sequence stay in lockstep.
    """

    __slots__ = ("bits", "step", "step_min", "step_max", "multipliers", "_top")

    def __init__(self, bits: int, step: float = STEP_INITIAL,
                 step_min: float = STEP_MIN, step_max: float = STEP_MAX,
                 multipliers=None):
        if multipliers is None:
            if bits not in MULTIPLIERS:
                raise ValueError(f"no multiplier table for {bits} bits")
            multipliers = MULTIPLIERS[bits]
        if len(multipliers) != 1 << (bits - 1):
            raise ValueError(f"{bits}-bit quantizer needs {1 << (bits - 1)} multipliers")
        if not 0 < step_min <= step <= step_max:
            raise ValueError("step must satisfy 0 < step_min <= step <= step_max")
        self.bits = bits
        self.step = float(step)
        self.step_min = float(step_min)
        self.step_max = float(step_max)
        self.multipliers = tuple(float(m) for m in multipliers)
        self._top = (1 << (bits - 1)) - 1

    def copy(self) -> AdaptiveQuantizer:
        return AdaptiveQuantizer(self.bits, self.step, self.step_min,
                                 self.step_max, self.multipliers)

    def level(self, code: int) -> float:
        return (code + 0.5) * self.step

    def _adapt(self, magnitude: int) -> None:
        step = self.step * self.multipliers[magnitude]
        if step < self.step_min:
            step = self.step_min
        elif step > self.step_max:
            step = self.step_max
        self.step = step

    def quantize(self, e: float) -> tuple[int, float]:
        """Return (code, reconstruction level) for ``e``, then adapt the step."""
        mag = int(math.floor(abs(e) / self.step))
        if mag > self._top:
            mag = self._top
        code = mag if e >= 0 else -mag - 1
        level = (code + 0.5) * self.step
        self._adapt(mag)
        return code, level

    def dequantize(self, code: int) -> float:
        """Reconstruction level for ``code``, then adapt the step."""
        if not -self._top - 1 <= code <= self._top:
            raise CorruptStreamError(f"code {code} out of range for {self.bits}-bit band")
        level = (code + 0.5) * self.step
        self._adapt(code if code >= 0 else -code - 1)
        return level
