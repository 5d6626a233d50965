"""Command line interface: encode, decode, metrics, info.

Exit codes: 0 success, 1 usage, 2 I/O, 3 format or stream corruption.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from pathlib import Path

from .bitstream import HEADER_SIZE, read_wav, write_wav
from .codec import SAMPLE_RATE, CodecParams, CodecTrace, EncodedStream, decode, encode
from .errors import CodecError
from .metrics import SEGMENT_LEN, SNR_CEIL, SNR_FLOOR, seg_snr
from .quantizer import Mode

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_FORMAT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _atomic_write(path: Path, data: bytes | None = None, writer=None) -> None:
    """Write via a temp file in the target directory so failures leave nothing behind."""
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=".nadpcm-", suffix=path.suffix)
    os.close(fd)
    try:
        if writer is not None:
            writer(tmp)
        else:
            Path(tmp).write_bytes(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _fmt_db(v: float) -> str:
    return "n/a" if math.isnan(v) else f"{v:.2f}"


def cmd_encode(args) -> int:
    pcm, rate = read_wav(args.input)
    trace = CodecTrace() if args.dump_training else None
    stream = encode(pcm, CodecParams(Mode.from_label(args.mode)), sample_rate=rate, trace=trace)
    _atomic_write(Path(args.output), stream.to_bytes())
    if trace is not None:
        lines = ["band\tframe\tinit\tepoch\tval_mse\ttest_mse"]
        lines += [f"{band}\t{frame}\t{r.chosen_init_index}\t{r.chosen_epoch}\t"
                  f"{r.validation_mse:.6e}\t{r.test_mse:.6e}"
                  for band, frame, r in trace.reports]
        _atomic_write(Path(args.dump_training), ("\n".join(lines) + "\n").encode())
    print(f"samples\t{stream.header.sample_count}")
    print(f"payload_bits\t{stream.payload_bits}")
    return EXIT_OK


def cmd_decode(args) -> int:
    stream = EncodedStream.from_bytes(Path(args.input).read_bytes())
    pcm = decode(stream)
    _atomic_write(Path(args.output), writer=lambda p: write_wav(p, pcm, SAMPLE_RATE))
    print(f"samples\t{pcm.size}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    ref, ref_rate = read_wav(args.reference)
    deg, deg_rate = read_wav(args.degraded)
    if ref_rate != deg_rate:
        raise CodecError(f"sample rates differ: {ref_rate} vs {deg_rate}")
    n = min(ref.size, deg.size)
    if ref.size != deg.size:
        print(f"warning: lengths differ ({ref.size} vs {deg.size}), comparing first {n}",
              file=sys.stderr)
    report = seg_snr(ref[:n], deg[:n], args.segment, SNR_FLOOR, SNR_CEIL)
    print(f"segments\t{len(report.segment_snr)}")
    print(f"segment_len\t{report.segment_len}")
    print(f"segsnr_db\t{_fmt_db(report.mean_segsnr)}")
    print(f"snr_db\t{_fmt_db(report.global_snr)}")
    print("note: MOS is a subjective listening score and is not estimated here", file=sys.stderr)
    return EXIT_OK


def cmd_info(args) -> int:
    data = Path(args.input).read_bytes()
    stream = EncodedStream.from_bytes(data)
    h = stream.header
    duration = h.sample_count / SAMPLE_RATE
    print(f"format_version\t{h.format_version}")
    print(f"mode\t{h.mode.label}")
    print(f"sample_count\t{h.sample_count}")
    print(f"frame_len\t{h.frame_len}")
    print(f"blocks\t{stream.num_blocks}")
    print(f"bits_per_block\t{h.mode.bits_per_block}")
    print(f"payload_bits\t{stream.payload_bits}")
    print(f"stream_bytes\t{len(data)} (header {HEADER_SIZE})")
    print(f"payload_bps\t{stream.payload_bits / duration:.1f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nadpcm", description="MLT subband nonlinear ADPCM speech codec")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="encode a 16-bit mono 8 kHz WAV file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mode", choices=["32k", "24k"], default="32k")
    p.add_argument("--dump-training", metavar="FILE",
                   help="write per band/frame training diagnostics as tab-separated text")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a stream to WAV")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("metrics", help="segmental and global SNR of a degraded WAV")
    p.add_argument("reference")
    p.add_argument("degraded")
    p.add_argument("--segment", type=int, default=SEGMENT_LEN, help="segment length in samples")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("info", help="print stream header fields and bitrate")
    p.add_argument("input")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"nadpcm: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CodecError, ValueError) as exc:
        print(f"nadpcm: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
