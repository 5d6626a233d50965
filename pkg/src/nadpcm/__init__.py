"""MLT subband speech codec with backward-adaptive neural-network ADPCM per band."""

from .codec import CodecParams, CodecTrace, EncodedStream, decode, encode
from .metrics import seg_snr
from .quantizer import Mode

__all__ = ["CodecParams", "CodecTrace", "EncodedStream", "Mode", "decode", "encode", "seg_snr"]
