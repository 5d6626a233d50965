"""Acceptance gate: one test per exit criterion, tolerances pinned here.

Every test records a PASS/FAIL line that is printed in the terminal summary
under "acceptance criteria".
"""

import time

import numpy as np

from conftest import ar_track
from nadpcm.adpcm import FRAME_LEN, BandCoder
from nadpcm.codec import CodecParams, CodecTrace, decode, encode
from nadpcm.metrics import prediction_gain_db, seg_snr
from nadpcm.mlt import mlt_forward, mlt_inverse
from nadpcm.predictor import (
    MAX_EPOCHS,
    NUM_PARAMS,
    MlpWeights,
    TrainingSet,
    mlp_jacobian,
    nguyen_widrow_init,
    train_frame,
)
from nadpcm.quantizer import STEP_MAX, STEP_MIN, AdaptiveQuantizer, Mode
from nadpcm.synth import formant_tones, speech_like, square_wave, white_noise
from test_predictor import finite_difference_jacobian


def test_ac1_mlt_perfect_reconstruction(criterion):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        x = rng.uniform(-1, 1, 8000)
        y = mlt_inverse(mlt_forward(x))
        worst = max(worst, float(np.sqrt(np.mean((y[:-16] - x[:-16]) ** 2))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 1.0
    criterion("AC1 MLT perfect reconstruction", ok,
              f"max interior RMS {worst:.2e} (<1e-10), {elapsed:.3f}s (<1s)")
    assert ok


def test_ac2_bitrate_exactness(criterion):
    x = speech_like(2.0, seed=2)
    assert x.size == 16000
    t0 = time.perf_counter()
    bits = {m: encode(x, CodecParams(m)).payload_bits for m in Mode}
    elapsed = time.perf_counter() - t0
    ok = bits[Mode.RATE_32K] == 64000 and bits[Mode.RATE_24K] == 50000 and elapsed < 60
    criterion("AC2 bitrate exactness", ok,
              f"32k: {bits[Mode.RATE_32K]} bits, 24k: {bits[Mode.RATE_24K]} bits "
              f"(24k allocation is 25.0 kbit/s), {elapsed:.1f}s")
    assert ok


def test_ac3_backward_synchrony(criterion):
    fixtures = [white_noise(1.0, level=0.3, seed=s) for s in range(5)]
    fixtures += [speech_like(1.0, seed=100 + s) for s in range(5)]
    mismatches = 0
    boundaries = 0
    for i, x in enumerate(fixtures):
        mode = Mode.RATE_32K if i % 2 == 0 else Mode.RATE_24K
        enc, dec = CodecTrace(), CodecTrace()
        decode(encode(x, CodecParams(mode), trace=enc).to_bytes(), trace=dec)
        boundaries += len(enc.frame_digests)
        mismatches += sum(a != b for a, b in zip(enc.frame_digests, dec.frame_digests))
        mismatches += len(enc.frame_digests) != len(dec.frame_digests)
        mismatches += not np.array_equal(enc.decoded_bins, dec.decoded_bins)
    ok = mismatches == 0 and boundaries >= 10 * 7
    criterion("AC3 backward synchrony", ok,
              f"{boundaries} frame boundaries x 16 bands hashed, {mismatches} mismatches")
    assert ok


def test_ac4_jacobian(criterion):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        theta = rng.normal(0, 1, NUM_PARAMS)
        x = rng.normal(0, 1, (1, 10))
        J = mlp_jacobian(MlpWeights.from_vector(theta), x)
        worst = max(worst, float(np.max(np.abs(J - finite_difference_jacobian(theta, x)))))
    ok = worst <= 1e-6
    criterion("AC4 Jacobian vs central differences", ok, f"max abs dev {worst:.2e} (<=1e-6)")
    assert ok


def test_ac5_training_contracts(criterion):
    rng = np.random.default_rng(5)
    failures = []
    for run in range(100):
        a1 = rng.uniform(-0.95, 0.95)
        track = ar_track(FRAME_LEN, seed=run, coeffs=(a1,), sigma=rng.uniform(0.001, 0.5))
        prev = nguyen_widrow_init(run) if run % 2 else None
        report = train_frame(TrainingSet.from_track(track), prev, seed_base=run * 31)
        all_val = []
        for idx, (tr, va) in enumerate(zip(report.train_curves, report.validation_curves)):
            if len(tr) > MAX_EPOCHS or np.any(np.diff(tr) > 0):
                failures.append((run, "train curve"))
            all_val += [(float(v), e + 1, idx) for e, v in enumerate(va)]
        if report.starts_evaluated != 4:
            failures.append((run, "starts"))
        if not 1 <= report.chosen_epoch <= MAX_EPOCHS:
            failures.append((run, "epoch"))
        if min(all_val) != (report.validation_mse, report.chosen_epoch, report.chosen_init_index):
            failures.append((run, "selection"))
    ok = not failures
    criterion("AC5 training contracts", ok, f"100 runs, failures: {failures[:5]}")
    assert ok


def test_ac6_quality_ordering(criterion):
    fixtures = {f"speech_like[{s}]": speech_like(2.0, seed=s) for s in range(4)}
    fixtures["formant_tones"] = formant_tones(2.0, seed=9, noise=0.02)
    rows = []
    ok = True
    for name, x in fixtures.items():
        s = {m: seg_snr(x, decode(encode(x, CodecParams(m)))).mean_segsnr for m in Mode}
        rows.append(f"{name} {s[Mode.RATE_32K]:.2f}>{s[Mode.RATE_24K]:.2f}")
        ok &= s[Mode.RATE_32K] > s[Mode.RATE_24K]
    criterion("AC6 segSNR 32k > 24k on every fixture", ok, "; ".join(rows))
    assert ok


def test_ac7_prediction_gain(criterion):
    bits = Mode.RATE_32K.bits_per_band
    gains = []
    for k in range(16):
        track = ar_track(5 * FRAME_LEN, seed=700 + k, coeffs=(1.6, -0.8))
        coder = BandCoder(k, bits[k])
        sig, res = [], []
        for t, x in enumerate(track):
            p = coder.predict()
            coder.encode_bin(float(x))
            if t >= FRAME_LEN:
                sig.append(x)
                res.append(x - p)
            if (t + 1) % FRAME_LEN == 0:
                coder.end_frame()
        gains.append(prediction_gain_db(sig, res))
    positive = sum(g > 0 for g in gains)
    ok = positive >= 14
    criterion("AC7 prediction gain > 0 dB", ok,
              f"{positive}/16 bands positive; gains dB {np.round(gains, 1).tolist()}")
    assert ok


def test_ac8_quantizer_properties(criterion):
    worst = -np.inf
    for bits in (2, 3, 4, 5):
        for step in (1e-6, 3.7e-4, 0.02, 0.1, 1.0):
            top = 2 ** (bits - 1)
            slack = 2 * np.spacing(top * step)
            for e in np.linspace(-top * step, top * step, 2001)[1:-1]:
                _, level = AdaptiveQuantizer(bits, step=step).quantize(float(e))
                worst = max(worst, (abs(e - level) - step / 2) / slack)
    granular_ok = worst <= 1.0

    rng = np.random.default_rng(8)
    lo, hi = np.inf, -np.inf
    steps = 0
    for bits in (2, 3, 4, 5):
        q = AdaptiveQuantizer(bits)
        # alternate long saturating bursts and long silent runs, then noise
        seq = np.concatenate([
            np.tile(np.r_[np.full(400, 1e6), np.zeros(400)], 300),
            rng.standard_cauchy(10_000) * 10.0 ** rng.integers(-8, 4, 10_000),
        ])
        for e in seq.tolist():
            q.quantize(e)
            s = q.step
            if s < lo:
                lo = s
            if s > hi:
                hi = s
        steps += seq.size
    bounds_ok = STEP_MIN <= lo and hi <= STEP_MAX and steps >= 1_000_000
    ok = granular_ok and bounds_ok
    criterion("AC8 quantizer properties", ok,
              f"granular overshoot {worst:.2f} of 2-ulp slack; "
              f"{steps} steps, step range [{lo:.1e}, {hi:.1e}]")
    assert ok


def test_ac9_stability(criterion):
    n = 30 * 8000
    signals = {
        "white noise": white_noise(30.0, level=1.0, seed=9),
        "silence": np.zeros(n, dtype=np.int16),
        "square": square_wave(30.0, 200.0),
        "dc": np.full(n, 24000, dtype=np.int16),
    }
    t0 = time.perf_counter()
    rows = []
    ok = True
    for name, x in signals.items():
        enc, dec = CodecTrace(), CodecTrace()
        y = decode(encode(x, trace=enc).to_bytes(), trace=dec)
        finite = bool(np.all(np.isfinite(dec.decoded_bins)))
        peak_bin = float(np.max(np.abs(dec.decoded_bins)))
        ok &= finite and y.size == n and np.array_equal(enc.decoded_bins, dec.decoded_bins)
        ok &= peak_bin < 1e3
        rows.append(f"{name}: peak bin {peak_bin:.2f}, segSNR "
                    f"{seg_snr(x, y).mean_segsnr:.1f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    criterion("AC9 stability", ok, f"{'; '.join(rows)}; {elapsed:.0f}s (<300s)")
    assert ok
