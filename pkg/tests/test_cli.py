import math

import numpy as np
import pytest

from nadpcm.bitstream import read_wav, write_wav
from nadpcm.cli import EXIT_FORMAT, EXIT_IO, EXIT_USAGE, main
from nadpcm.synth import speech_like


@pytest.fixture(scope="module")
def fixture_wav(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "speech.wav"
    write_wav(path, speech_like(2.0, seed=11), 8000)
    return path


def parse(out):
    return dict(line.split("\t", 1) for line in out.strip().splitlines())


def test_encode_decode_metrics(fixture_wav, tmp_path, capsys):
    nam = tmp_path / "s.nam"
    dec = tmp_path / "d.wav"
    dump = tmp_path / "train.tsv"
    assert main(["encode", str(fixture_wav), str(nam), "--dump-training", str(dump)]) == 0
    assert parse(capsys.readouterr().out)["payload_bits"] == "64000"
    lines = dump.read_text().splitlines()
    assert lines[0].split("\t")[:4] == ["band", "frame", "init", "epoch"]
    assert len(lines) == 1 + 16 * 15

    assert main(["decode", str(nam), str(dec)]) == 0
    capsys.readouterr()
    assert read_wav(dec)[0].size == 16000

    assert main(["metrics", str(fixture_wav), str(dec)]) == 0
    captured = capsys.readouterr()
    seg = float(parse(captured.out)["segsnr_db"])
    assert math.isfinite(seg) and seg > 0
    assert "MOS" in captured.err


def test_info_reports_bitrate(tmp_path, capsys):
    wav = tmp_path / "n.wav"
    write_wav(wav, np.random.default_rng(0).integers(-2000, 2000, 16000), 8000)
    nam = tmp_path / "n.nam"
    assert main(["encode", str(wav), str(nam)]) == 0
    capsys.readouterr()
    assert main(["info", str(nam)]) == 0
    info = parse(capsys.readouterr().out)
    assert info["payload_bps"] == "32000.0"
    assert info["mode"] == "32k"
    assert info["sample_count"] == "16000"


def test_24k_mode(fixture_wav, tmp_path, capsys):
    nam = tmp_path / "s24.nam"
    assert main(["encode", str(fixture_wav), str(nam), "--mode", "24k"]) == 0
    assert parse(capsys.readouterr().out)["payload_bits"] == "50000"


def test_missing_input_leaves_no_output(tmp_path, capsys):
    out = tmp_path / "out.nam"
    assert main(["encode", str(tmp_path / "nope.wav"), str(out)]) == EXIT_IO
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["encode"])
    assert exc.value.code == EXIT_USAGE


def test_corrupt_stream_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.nam"
    bad.write_bytes(b"JUNKJUNKJUNKJUNK")
    out = tmp_path / "o.wav"
    assert main(["decode", str(bad), str(out)]) == EXIT_FORMAT
    assert not out.exists()


def test_wrong_sample_rate(tmp_path, capsys):
    wav = tmp_path / "16k.wav"
    write_wav(wav, np.zeros(320, dtype=np.int16), 16000)
    assert main(["encode", str(wav), str(tmp_path / "x.nam")]) == EXIT_FORMAT
    assert "sample rate" in capsys.readouterr().err


def test_cli_deterministic(fixture_wav, tmp_path, capsys):
    a, b = tmp_path / "a.nam", tmp_path / "b.nam"
    assert main(["encode", str(fixture_wav), str(a)]) == main(["encode", str(fixture_wav), str(b)])
    assert a.read_bytes() == b.read_bytes()
