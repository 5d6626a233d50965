"""Objective quality measures: segmental and global SNR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SEGMENT_LEN = 160
SNR_FLOOR = -10.0
SNR_CEIL = 35.0


@dataclass(frozen=True)
class SegSnrReport:
    segment_snr: tuple[float, ...]
    mean_segsnr: float  # nan when no segment carries reference energy
    global_snr: float
    segment_len: int


def _snr_db(signal_energy: float, noise_energy: float) -> float:
    if noise_energy == 0.0:
        return math.inf
    return 10.0 * math.log10(signal_energy / noise_energy)


def seg_snr(reference, degraded, seg_len: int = SEGMENT_LEN,
            floor: float = SNR_FLOOR, ceil: float = SNR_CEIL) -> SegSnrReport:
    """Mean per-segment SNR in dB.

    Segments with zero reference energy are skipped; the rest are clamped
    to ``[floor, ceil]`` before averaging. A trailing partial segment counts
    as a segment.
    """
    ref = np.asarray(reference, dtype=np.float64)
    deg = np.asarray(degraded, dtype=np.float64)
    if ref.shape != deg.shape or ref.ndim != 1:
        raise ValueError(f"length mismatch: {ref.shape} vs {deg.shape}")
    if seg_len < 1:
        raise ValueError("seg_len must be >= 1")
    noise = ref - deg
    snrs = []
    for start in range(0, ref.size, seg_len):
        s = float(np.sum(ref[start:start + seg_len] ** 2))
        if s == 0.0:
            continue
        v = _snr_db(s, float(np.sum(noise[start:start + seg_len] ** 2)))
        snrs.append(min(max(v, floor), ceil))
    total = float(np.sum(ref ** 2))
    global_snr = _snr_db(total, float(np.sum(noise ** 2))) if total > 0 else math.nan
    mean = float(np.mean(snrs)) if snrs else math.nan
    return SegSnrReport(tuple(snrs), mean, global_snr, seg_len)


def prediction_gain_db(signal, residual) -> float:
    """10 log10 of signal power over residual power."""
    s = float(np.sum(np.square(signal)))
    r = float(np.sum(np.square(residual)))
    return _snr_db(s, r)
