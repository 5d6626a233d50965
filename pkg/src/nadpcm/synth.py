"""Synthetic test signals at 8 kHz: speech-like vowels, noise, tones."""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

SAMPLE_RATE = 8000

# (F1, F2, F3) in Hz for a few vowels
VOWELS = {
    "a": (730, 1090, 2440),
    "i": (270, 2290, 3010),
    "u": (300, 870, 2240),
    "e": (530, 1840, 2480),
}


def _resonator(freq, bandwidth, fs):
    r = np.exp(-np.pi * bandwidth / fs)
    a = [1.0, -2.0 * r * np.cos(2 * np.pi * freq / fs), r * r]
    return [1.0 - r], a


def speech_like(duration: float = 2.0, f0: float = 120.0, seed: int = 0,
                level: float = 0.3, fs: int = SAMPLE_RATE) -> np.ndarray:
    """Voiced syllables: jittered pulse train through three formant resonators.

    Each syllable picks a vowel, the pitch glides slightly, and a raised-cosine
    envelope with short pauses gives the signal speech-like dynamics. A little
    aspiration noise is mixed in. Returns int16 samples.
    """
    rng = np.random.default_rng(seed)
    n = int(round(duration * fs))
    out = np.zeros(n)
    pos = 0
    names = sorted(VOWELS)
    while pos < n:
        length = int(fs * rng.uniform(0.15, 0.3))
        pause = int(fs * rng.uniform(0.02, 0.08))
        seg = min(length, n - pos)
        pitch = f0 * rng.uniform(0.85, 1.2) * np.linspace(1.0, rng.uniform(0.9, 1.1), seg)
        phase = np.cumsum(pitch / fs)
        source = np.diff(np.floor(phase), prepend=0.0)
        source += 0.02 * rng.standard_normal(seg)
        voiced = np.zeros(seg)
        for k, f in enumerate(VOWELS[names[rng.integers(len(names))]]):
            b, a = _resonator(f * rng.uniform(0.95, 1.05), 60 + 40 * k, fs)
            voiced += lfilter(b, a, source) / (k + 1)
        env = np.sin(np.pi * np.arange(seg) / seg) ** 2
        out[pos:pos + seg] = voiced * env
        pos += length + pause
    out += 0.003 * rng.standard_normal(n)
    out *= level / max(np.max(np.abs(out)), 1e-12)
    return np.round(out * 32767).astype(np.int16)


def formant_tones(duration: float = 2.0, freqs=(500.0, 1500.0, 2500.0), seed: int = 0,
                  noise: float = 0.01, fs: int = SAMPLE_RATE) -> np.ndarray:
    """Sum of three formant-band sinusoids plus white noise, int16."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(round(duration * fs))) / fs
    x = sum(0.25 / (k + 1) * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi))
            for k, f in enumerate(freqs))
    x = x + noise * rng.standard_normal(t.size)
    return np.round(np.clip(x, -1, 1) * 32767).astype(np.int16)


def white_noise(duration: float, level: float = 0.5, seed: int = 0,
                fs: int = SAMPLE_RATE) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-level, level, int(round(duration * fs)))
    return np.round(x * 32767).astype(np.int16)


def square_wave(duration: float, freq: float = 200.0, fs: int = SAMPLE_RATE) -> np.ndarray:
    t = np.arange(int(round(duration * fs))) / fs
    x = np.where(np.sin(2 * np.pi * freq * t) >= 0, 32767, -32768)
    return x.astype(np.int16)
