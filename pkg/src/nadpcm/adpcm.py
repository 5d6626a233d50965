"""Closed-loop backward nonlinear ADPCM for a single subband.

Everything that drives adaptation (prediction context, quantizer step,
training data) is built from decoded bins only, so a decoder fed the code
sequence rebuilds the encoder state exactly without side information.
"""

from __future__ import annotations

import hashlib
import math
import struct

import numpy as np

from .predictor import ORDER, MlpWeights, TrainingSet, TrainReport, train_frame
from .quantizer import AdaptiveQuantizer
from .rng import band_frame_seed

FRAME_LEN = 64
MIN_FRAME_LEN = 44


class BandCoder:
    """ADPCM state machine for one band; used unchanged by encoder and decoder.

    During the first frame (``frame_index == 0``) the predictor is bypassed
    and the band runs as plain adaptive-step PCM of the bins. From then on
    the MLP trained on the previous decoded frame predicts each bin from the
    last ``ORDER`` decoded bins.
    """

    def __init__(self, band_index: int, bits: int, frame_len: int = FRAME_LEN):
        if frame_len < MIN_FRAME_LEN:
            raise ValueError(f"frame_len must be >= {MIN_FRAME_LEN}")
        self.band_index = band_index
        self.frame_len = frame_len
        self.quantizer = AdaptiveQuantizer(bits)
        self.history = [0.0] * ORDER
        self.frame_buffer: list[float] = []
        self.prev_frame: list[float] | None = None
        self.frame_index = 0
        self.last_report: TrainReport | None = None
        self._set_weights(MlpWeights.zeros())

    def _set_weights(self, w: MlpWeights) -> None:
        self.weights = w
        theta = w.to_vector().tolist()
        self._w0 = theta[0:ORDER]
        self._w1 = theta[ORDER:2 * ORDER]
        self._b0, self._b1, self._v0, self._v1, self._c = theta[20:25]

    def predict(self) -> float:
        if self.frame_index == 0:
            return 0.0
        h = self.history
        a0 = self._b0
        a1 = self._b1
        for i in range(ORDER):
            a0 += self._w0[i] * h[i]
            a1 += self._w1[i] * h[i]
        return self._c + self._v0 * _sig(a0) + self._v1 * _sig(a1)

    def _check_room(self) -> None:
        if len(self.frame_buffer) >= self.frame_len:
            raise RuntimeError("frame is full; end_frame() must be called first")

    def _push(self, xd: float) -> None:
        del self.history[0]
        self.history.append(xd)
        self.frame_buffer.append(xd)

    def encode_bin(self, x: float) -> int:
        self._check_room()
        p = self.predict()
        code, level = self.quantizer.quantize(x - p)
        self._push(p + level)
        return code

    def decode_bin(self, code: int) -> float:
        self._check_room()
        p = self.predict()
        xd = p + self.quantizer.dequantize(code)
        self._push(xd)
        return xd

    def end_frame(self) -> TrainReport:
        """Retrain on the frame just completed and install the result."""
        if len(self.frame_buffer) != self.frame_len:
            raise RuntimeError(
                f"end_frame after {len(self.frame_buffer)} bins, expected {self.frame_len}")
        self.prev_frame = self.frame_buffer
        self.frame_buffer = []
        prev_weights = self.weights if self.frame_index > 0 else None
        report = train_frame(
            TrainingSet.from_track(self.prev_frame), prev_weights,
            band_frame_seed(self.band_index, self.frame_index))
        self._set_weights(report.weights)
        self.last_report = report
        self.frame_index += 1
        return report

    def digest(self) -> str:
        """Hash of the full adaptation state, for lockstep checks."""
        h = hashlib.sha256()
        h.update(struct.pack("<ii", self.band_index, self.frame_index))
        h.update(self.weights.to_vector().tobytes())
        h.update(struct.pack("<d", self.quantizer.step))
        h.update(np.array(self.history).tobytes())
        h.update(np.array(self.frame_buffer).tobytes())
        if self.prev_frame is not None:
            h.update(np.array(self.prev_frame).tobytes())
        return h.hexdigest()


def _sig(z: float) -> float:
    if z < -700.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-z))
