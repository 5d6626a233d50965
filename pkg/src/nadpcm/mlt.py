"""Modulated Lapped Transform (MDCT with a half-sine window), M = 16 bands.

Block ``t`` of the forward transform covers input samples
``[(t - 1) * M, (t + 1) * M)``; the first block sees ``M`` leading zeros.
The inverse overlap-adds ``2M``-sample windowed blocks with hop ``M``, so
the last ``M`` output samples are only complete once a trailing all-zero
flush block has been appended by the caller.

Scaling is orthonormal: every basis vector has unit norm, so the inverse
needs no extra gain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

NUM_BANDS = 16


def sine_window(num_bands: int = NUM_BANDS) -> np.ndarray:
    n = np.arange(2 * num_bands)
    return np.sin((n + 0.5) * np.pi / (2 * num_bands))


@dataclass(frozen=True)
class MltConfig:
    num_bands: int = NUM_BANDS
    window: np.ndarray = field(default_factory=sine_window, repr=False)

    def __post_init__(self):
        if self.num_bands != NUM_BANDS:
            raise ValueError(f"only M={NUM_BANDS} is supported, got {self.num_bands}")
        if self.window.shape != (2 * self.num_bands,):
            raise ValueError("window must have 2M coefficients")


DEFAULT_CONFIG = MltConfig()


def _fold(z: np.ndarray, m: int) -> np.ndarray:
    # z: (..., 2M) windowed blocks -> (..., M) DCT-IV input
    h = m // 2
    a, b, c, d = z[..., :h], z[..., h:m], z[..., m:m + h], z[..., m + h:]
    return np.concatenate([-c[..., ::-1] - d, a - b[..., ::-1]], axis=-1)


def _unfold(u: np.ndarray, m: int) -> np.ndarray:
    h = m // 2
    u1, u2 = u[..., :h], u[..., h:]
    return np.concatenate([u2, -u2[..., ::-1], -u1[..., ::-1], -u1], axis=-1)


def mlt_forward(samples, cfg: MltConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Analyse ``samples`` into an ``(M, L)`` bin matrix, ``L = len(samples) / M``."""
    x = np.asarray(samples, dtype=np.float64)
    m = cfg.num_bands
    if x.ndim != 1 or x.size % m:
        raise ValueError(f"sample count {x.size} is not a multiple of M={m}")
    nblocks = x.size // m
    if nblocks == 0:
        return np.zeros((m, 0))
    padded = np.concatenate([np.zeros(m), x])
    halves = padded.reshape(nblocks + 1, m)
    blocks = np.concatenate([halves[:-1], halves[1:]], axis=1) * cfg.window
    return dct(_fold(blocks, m), type=4, norm="ortho", axis=-1).T


def mlt_inverse(bins, cfg: MltConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Synthesize ``L * M`` samples from an ``(M, L)`` bin matrix by overlap-add."""
    X = np.asarray(bins, dtype=np.float64)
    m = cfg.num_bands
    if X.ndim != 2 or X.shape[0] != m:
        raise ValueError(f"bin matrix must have {m} rows, got shape {X.shape}")
    nblocks = X.shape[1]
    if nblocks == 0:
        return np.zeros(0)
    y = _unfold(dct(X.T, type=4, norm="ortho", axis=-1), m) * cfg.window
    out = np.zeros((nblocks + 1) * m)
    for t in range(nblocks):
        out[t * m:(t + 2) * m] += y[t]
    # out[0:M] belongs to the virtual leading-zero region
    return out[m:]


def mlt_basis(cfg: MltConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Dense ``(M, 2M)`` analysis matrix; row ``k`` is the windowed basis of band ``k``."""
    m = cfg.num_bands
    k = np.arange(m)[:, None]
    n = np.arange(2 * m)[None, :]
    return (np.sqrt(2.0 / m) * cfg.window[None, :]
            * np.cos(np.pi / m * (n + 0.5 + m / 2) * (k + 0.5)))
