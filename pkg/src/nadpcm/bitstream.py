"""Packed stream format and 16-bit mono WAV I/O.

Stream layout (version 1)::

    offset  size  field
    0       4     magic b"NAMT"
    4       1     format version
    5       1     mode (0 = 32k allocation, 1 = 24k allocation)
    6       4     sample count, uint32 little-endian
    10      2     frame length in bins, uint16 little-endian
    12      ...   payload

The payload holds one group of 16 codes per MLT block, band 0 first, each
code written MSB-first in two's complement using its band's bit width.
Blocks follow each other without padding; the final byte is zero-filled.
"""

from __future__ import annotations

import struct
import wave
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, TruncatedStreamError
from .quantizer import Mode

MAGIC = b"NAMT"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sBBIH")
HEADER_SIZE = HEADER.size


@dataclass(frozen=True)
class StreamHeader:
    mode: Mode
    sample_count: int
    frame_len: int
    format_version: int = FORMAT_VERSION

    def to_bytes(self) -> bytes:
        return HEADER.pack(MAGIC, self.format_version, self.mode.value,
                           self.sample_count, self.frame_len)

    @classmethod
    def from_bytes(cls, data: bytes) -> StreamHeader:
        if len(data) < HEADER_SIZE:
            raise FormatError(f"stream is {len(data)} bytes, shorter than the {HEADER_SIZE}-byte header")
        magic, version, mode, count, frame_len = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported format version {version}")
        try:
            mode = Mode(mode)
        except ValueError:
            raise FormatError(f"unknown mode byte {mode}") from None
        return cls(mode, count, frame_len, version)


class BitWriter:
    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, width: int) -> None:
        self._acc = (self._acc << width) | (value & ((1 << width) - 1))
        self._nbits += width
        while self._nbits >= 8:
            self._nbits -= 8
            self._buf.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    @property
    def bit_length(self) -> int:
        return 8 * len(self._buf) + self._nbits

    def getvalue(self) -> bytes:
        if self._nbits:
            return bytes(self._buf) + bytes([(self._acc << (8 - self._nbits)) & 0xFF])
        return bytes(self._buf)


class BitReader:
    def __init__(self, data: bytes):
        self._data = data
        self.pos = 0

    @property
    def remaining(self) -> int:
        return 8 * len(self._data) - self.pos

    def read(self, width: int) -> int:
        if width > self.remaining:
            raise TruncatedStreamError(f"need {width} bits, {self.remaining} left")
        value = 0
        for _ in range(width):
            byte = self._data[self.pos >> 3]
            value = (value << 1) | ((byte >> (7 - (self.pos & 7))) & 1)
            self.pos += 1
        return value


def _to_signed(u: int, width: int) -> int:
    return u - (1 << width) if u >> (width - 1) else u


def pack_codes(codes, widths) -> bytes:
    """Pack an (num_blocks, num_bands) code array, block by block."""
    codes = np.asarray(codes, dtype=np.int64)
    widths = [int(w) for w in widths]
    if codes.ndim != 2 or codes.shape[1] != len(widths):
        raise ValueError(f"codes must have shape (blocks, {len(widths)})")
    lo = np.array([-(1 << (w - 1)) for w in widths])
    hi = np.array([(1 << (w - 1)) - 1 for w in widths])
    bad = (codes < lo) | (codes > hi)
    if bad.any():
        t, k = map(int, np.argwhere(bad)[0])
        raise ValueError(f"code {codes[t, k]} in block {t} does not fit {widths[k]} bits")
    writer = BitWriter()
    for row in codes.tolist():
        for c, w in zip(row, widths):
            writer.write(c, w)
    return writer.getvalue()


def unpack_codes(data: bytes, widths, num_blocks: int) -> np.ndarray:
    widths = [int(w) for w in widths]
    per_block = sum(widths)
    available = 8 * len(data)
    if available < per_block * num_blocks:
        raise TruncatedStreamError(
            f"payload truncated in block {available // per_block}: "
            f"{available} bits for {num_blocks} blocks of {per_block}")
    reader = BitReader(data)
    out = np.empty((num_blocks, len(widths)), dtype=np.int64)
    for t in range(num_blocks):
        for k, w in enumerate(widths):
            out[t, k] = _to_signed(reader.read(w), w)
    return out


def payload_bytes(num_blocks: int, mode: Mode) -> int:
    return (num_blocks * mode.bits_per_block + 7) // 8


# WAV


def read_wav(path) -> tuple[np.ndarray, int]:
    """Read a 16-bit mono PCM WAV file as int16 samples plus its sample rate."""
    try:
        with wave.open(str(path), "rb") as w:
            channels, width, rate, frames = (
                w.getnchannels(), w.getsampwidth(), w.getframerate(), w.getnframes())
            if channels != 1:
                raise FormatError(f"mono required, file has {channels} channels")
            if width != 2:
                raise FormatError(f"16-bit samples required, file has {8 * width}-bit")
            raw = w.readframes(frames)
    except (wave.Error, EOFError) as exc:
        raise FormatError(f"not a PCM WAV file: {exc}") from exc
    return np.frombuffer(raw, dtype="<i2").astype(np.int16), rate


def write_wav(path, samples, sample_rate: int) -> None:
    data = np.asarray(samples)
    if data.size and (data.min() < -32768 or data.max() > 32767):
        raise ValueError("samples exceed the 16-bit range")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(sample_rate))
        w.writeframes(data.astype("<i2").tobytes())
