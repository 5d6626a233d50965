"""Encoder and decoder: PCM -> MLT -> 16 band coders -> packed codes, and back."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .adpcm import FRAME_LEN, MIN_FRAME_LEN, BandCoder
from .bitstream import FORMAT_VERSION, HEADER_SIZE, StreamHeader, pack_codes, unpack_codes
from .errors import CorruptStreamError, FormatError
from .mlt import NUM_BANDS, mlt_forward, mlt_inverse
from .quantizer import Mode

SAMPLE_RATE = 8000
PCM_SCALE = 32768.0
PCM_MAX = 1.0 - 2.0 ** -15


@dataclass(frozen=True)
class CodecParams:
    mode: Mode = Mode.RATE_32K
    frame_len: int = FRAME_LEN
    sample_rate: int = SAMPLE_RATE
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.sample_rate != SAMPLE_RATE:
            raise FormatError(f"unsupported sample rate {self.sample_rate} Hz (need {SAMPLE_RATE})")
        if not MIN_FRAME_LEN <= self.frame_len <= 0xFFFF:
            raise ValueError(f"frame_len must be in {MIN_FRAME_LEN}..65535")
        if self.format_version != FORMAT_VERSION:
            raise ValueError(f"unsupported format version {self.format_version}")


@dataclass
class EncodedStream:
    header: StreamHeader
    codes: np.ndarray  # (num_blocks, 16)

    @property
    def num_blocks(self) -> int:
        return self.codes.shape[0]

    @property
    def payload_bits(self) -> int:
        return self.num_blocks * self.header.mode.bits_per_block

    @property
    def bitrate(self) -> float:
        """Payload bits per second of coded (block-padded) signal."""
        return self.header.mode.bits_per_block * SAMPLE_RATE / NUM_BANDS

    def to_bytes(self) -> bytes:
        return self.header.to_bytes() + pack_codes(self.codes, self.header.mode.bits_per_band)

    @classmethod
    def from_bytes(cls, data: bytes) -> EncodedStream:
        header = StreamHeader.from_bytes(data)
        if header.frame_len < MIN_FRAME_LEN:
            raise FormatError(f"frame length {header.frame_len} below minimum {MIN_FRAME_LEN}")
        nblocks = num_blocks(header.sample_count)
        codes = unpack_codes(data[HEADER_SIZE:], header.mode.bits_per_band, nblocks)
        return cls(header, codes)


@dataclass
class CodecTrace:
    """Optional record of internal state, filled in by encode/decode."""

    # one list of 16 band digests per frame boundary, plus one at stream end
    frame_digests: list = field(default_factory=list)
    decoded_bins: np.ndarray | None = None
    # (band, frame_index, TrainReport) for every retraining
    reports: list = field(default_factory=list)


def num_blocks(sample_count: int) -> int:
    return -(-sample_count // NUM_BANDS)


def _make_coders(mode: Mode, frame_len: int) -> list[BandCoder]:
    return [BandCoder(k, b, frame_len) for k, b in enumerate(mode.bits_per_band)]


def _frame_boundary(coders, trace, is_last):
    if is_last:
        return
    for c in coders:
        report = c.end_frame()
        if trace is not None:
            trace.reports.append((c.band_index, c.frame_index - 1, report))
    if trace is not None:
        trace.frame_digests.append([c.digest() for c in coders])


def encode(pcm, params: CodecParams = CodecParams(), *, sample_rate: int = SAMPLE_RATE,
           trace: CodecTrace | None = None) -> EncodedStream:
    if sample_rate != params.sample_rate:
        raise FormatError(f"unsupported sample rate {sample_rate} Hz (need {params.sample_rate})")
    pcm = np.asarray(pcm)
    if pcm.ndim != 1:
        raise ValueError("mono PCM required")
    if pcm.size == 0:
        raise ValueError("empty input")
    if pcm.size > 0xFFFFFFFF:
        raise ValueError("too many samples for the stream header")
    x = pcm.astype(np.float64) / PCM_SCALE
    nblocks = num_blocks(x.size)
    x = np.concatenate([x, np.zeros(nblocks * NUM_BANDS - x.size)])
    bins = mlt_forward(x).T.tolist()

    coders = _make_coders(params.mode, params.frame_len)
    codes = np.empty((nblocks, NUM_BANDS), dtype=np.int64)
    decoded = np.empty((nblocks, NUM_BANDS)) if trace is not None else None
    for t, block in enumerate(bins):
        codes[t] = [c.encode_bin(b) for c, b in zip(coders, block)]
        if decoded is not None:
            decoded[t] = [c.history[-1] for c in coders]
        if (t + 1) % params.frame_len == 0:
            _frame_boundary(coders, trace, t + 1 == nblocks)
    if trace is not None:
        trace.frame_digests.append([c.digest() for c in coders])
        trace.decoded_bins = decoded.T
    header = StreamHeader(params.mode, int(pcm.size), params.frame_len, params.format_version)
    return EncodedStream(header, codes)


def decode(stream: EncodedStream | bytes, *, trace: CodecTrace | None = None) -> np.ndarray:
    if isinstance(stream, (bytes, bytearray)):
        stream = EncodedStream.from_bytes(bytes(stream))
    header = stream.header
    nblocks = num_blocks(header.sample_count)
    if stream.codes.shape != (nblocks, NUM_BANDS):
        raise CorruptStreamError(
            f"expected {nblocks} blocks of {NUM_BANDS} codes, got {stream.codes.shape}")
    coders = _make_coders(header.mode, header.frame_len)
    decoded = np.empty((nblocks, NUM_BANDS))
    for t, row in enumerate(stream.codes.tolist()):
        decoded[t] = [c.decode_bin(code) for c, code in zip(coders, row)]
        if (t + 1) % header.frame_len == 0:
            _frame_boundary(coders, trace, t + 1 == nblocks)
    if trace is not None:
        trace.frame_digests.append([c.digest() for c in coders])
        trace.decoded_bins = decoded.T
    return synthesize(decoded.T, header.sample_count)


def synthesize(decoded_bins: np.ndarray, sample_count: int) -> np.ndarray:
    """Inverse MLT of decoded bins, clipped and scaled to int16, trimmed to length."""
    y = mlt_inverse(decoded_bins)[:sample_count]
    y = np.clip(y, -1.0, PCM_MAX)
    return np.round(y * PCM_SCALE).astype(np.int16)
