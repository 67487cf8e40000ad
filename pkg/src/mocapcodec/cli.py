"""Command-line front end: compress, decompress, analyze, sweep, info."""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

import numpy as np

from . import __version__
from .analysis import clip_correlation_spectrum, mean_variation, singular_spectrum, stddev_sum
from .codec import (
    CodecParams,
    compression_ratio,
    crop_to,
    decode_sequence,
    distortion,
    encode_sequence,
    stream_info,
)
from .errors import MocapCodecError
from .sequence import format_from_path, load_sequence, save_sequence


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MocapCodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mocapcodec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(required=True, metavar="command")

    p = sub.add_parser("compress", help="encode a trajectory matrix into a .mtc stream")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--k", type=int, required=True, help="retained spatial components (rate knob)")
    p.add_argument("--L", type=int, default=None, help="equal clip length (default 280)")
    p.add_argument("--cuts", default=None, help="file with one clip end frame per line")
    p.add_argument("--K", type=int, default=1, help="number of bases (database mode when > 1)")
    p.add_argument("--seed", type=int, default=0, help="annealing seed for database mode")
    p.add_argument("--backend", choices=("raw", "arithmetic"), default="arithmetic")
    p.add_argument("--l", type=int, default=None, help="override the automatic DCT truncation")
    p.add_argument("--Q", type=int, default=None, help="override the automatic fractional bits")
    p.add_argument("--format", choices=("txt", "csv"), default=None, help="input format (default: by extension)")
    p.add_argument("--verify", action="store_true", help="decode the stream and report distortion")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode a .mtc stream back to a matrix file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--format", choices=("txt", "csv"), default=None, help="output format (default: by extension)")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("analyze", help="report variation, spread, and singular spectra")
    p.add_argument("input")
    p.add_argument("--J", type=int, default=None, help="clip count for the clip-correlation spectrum")
    p.add_argument("--out", default=None, help="spectrum CSV path (figure lands next to it)")
    p.add_argument("--format", choices=("txt", "csv"), default=None)
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="rate-distortion curve over a list of k values")
    p.add_argument("input")
    p.add_argument("--k", required=True, help="k values: comma list and/or start:stop:step ranges")
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--cuts", default=None)
    p.add_argument("--K", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("raw", "arithmetic"), default="arithmetic")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--format", choices=("txt", "csv"), default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("info", help="print the header of a .mtc stream")
    p.add_argument("input")
    p.set_defaults(func=cmd_info)
    return parser


def _load(args):
    fmt = args.format or format_from_path(args.input)
    return load_sequence(args.input, fmt)


def _read_cuts(path) -> tuple[int, ...]:
    with open(path, "r", encoding="utf-8") as fh:
        return tuple(int(line.strip()) for line in fh if line.strip())


def _parse_k_list(spec: str) -> list[int]:
    values = []
    for item in spec.split(","):
        item = item.strip()
        if ":" in item:
            parts = [int(v) for v in item.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            values.extend(range(start, stop + 1, step))
        elif item:
            values.append(int(item))
    if not values:
        raise ValueError(f"no k values in {spec!r}")
    return values


def _params(args, k: int) -> CodecParams:
    if args.cuts and args.L is not None:
        raise ValueError("--cuts and --L are mutually exclusive")
    cuts = _read_cuts(args.cuts) if args.cuts else None
    L = args.L
    if cuts is None and L is None:
        L = 280
    return CodecParams(
        k=k,
        L=L,
        cuts=cuts,
        K=args.K,
        l=getattr(args, "l", None),
        Q=getattr(args, "Q", None),
        backend=args.backend,
        seed=args.seed,
    )


def cmd_compress(args) -> int:
    seq = _load(args)
    params = _params(args, args.k)
    start = time.perf_counter()
    stream = encode_sequence(seq, params)
    elapsed = time.perf_counter() - start
    with open(args.output, "wb") as fh:
        fh.write(stream)

    info = stream_info(stream)
    dropped = seq.f - info.f_used
    print(f"input:  {args.input} (n={seq.n}, f={seq.f})")
    print(f"clips:  {info.N} (f_used={info.f_used}, {dropped} frames dropped)")
    print(f"stream: {args.output} ({len(stream)} bytes)")
    print(f"CR:     {compression_ratio(seq, stream):.2f}")
    print(f"encode: {elapsed:.3f} s ({info.f_used / elapsed:.0f} frames/s)")
    if args.verify:
        decoded = decode_sequence(stream)
        if decoded.data.shape != (3 * seq.n, info.f_used):
            print("error: decoded shape mismatch", file=sys.stderr)
            return 1
        d = distortion(crop_to(seq, info.f_used), decoded)
        print(f"verify: distortion {d:.4f} cm")
    return 0


def cmd_decompress(args) -> int:
    with open(args.input, "rb") as fh:
        stream = fh.read()
    start = time.perf_counter()
    seq = decode_sequence(stream)
    elapsed = time.perf_counter() - start
    fmt = args.format or format_from_path(args.output)
    save_sequence(seq, args.output, fmt)
    print(f"decoded: {args.output} (n={seq.n}, f={seq.f}, format {fmt})")
    print(f"decode:  {elapsed:.3f} s ({seq.f / elapsed:.0f} frames/s)")
    return 0


def cmd_analyze(args) -> int:
    seq = _load(args)
    print(f"input: {args.input} (n={seq.n}, f={seq.f})")
    v = mean_variation(seq)
    s_sum = stddev_sum(seq)
    print(f"mean variation:        {v:.6g}")
    print(f"stddev sum (3n rows):  {s_sum:.6g}   (population convention)")
    print(f"stddev mean per row:   {s_sum / (3 * seq.n):.6g}")

    spectra = [singular_spectrum(seq.data, subject="full sequence")]
    if args.J is not None:
        spectra.append(clip_correlation_spectrum(seq, args.J))
        print(f"clip-correlation spectrum over J={args.J} clips:")
        head = spectra[-1].normalized_singular_values[: min(8, args.J)]
        print("  " + ", ".join(f"{x:.4g}" for x in head))

    if args.out:
        _write_spectrum_csv(spectra[0], args.out)
        written = [args.out]
        if args.J is not None:
            stem, ext = os.path.splitext(args.out)
            clip_path = f"{stem}_clipcorr{ext or '.csv'}"
            _write_spectrum_csv(spectra[1], clip_path)
            written.append(clip_path)
        if not args.no_plot:
            from .plotting import save_spectrum_figure

            fig_path = os.path.splitext(args.out)[0] + ".png"
            save_spectrum_figure(spectra, fig_path)
            written.append(fig_path)
        print("wrote: " + ", ".join(written))
    return 0


def _write_spectrum_csv(report, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "normalized_value"])
        for i, val in enumerate(report.normalized_singular_values):
            writer.writerow([i, repr(float(val))])


def cmd_sweep(args) -> int:
    seq = _load(args)
    rows = []
    for k in sorted(set(_parse_k_list(args.k))):
        params = _params(args, k)
        start = time.perf_counter()
        stream = encode_sequence(seq, params)
        encode_s = time.perf_counter() - start
        start = time.perf_counter()
        decoded = decode_sequence(stream)
        decode_s = time.perf_counter() - start
        d = distortion(crop_to(seq, decoded.f), decoded)
        info = stream_info(stream)
        l_values = set(info.l_values)
        rows.append(
            {
                "k": k,
                "l": info.l_values[0] if len(l_values) == 1 else round(float(np.mean(info.l_values)), 2),
                "Q": info.Q_values[0],
                "cr": compression_ratio(seq, stream),
                "distortion": d,
                "encode_fps": info.f_used / encode_s,
                "decode_fps": info.f_used / decode_s,
            }
        )
        print(f"k={k}: CR={rows[-1]['cr']:.2f} distortion={d:.4f} cm")

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "l", "Q", "CR", "distortion", "encode_fps", "decode_fps"])
        for r in rows:
            writer.writerow(
                [r["k"], r["l"], r["Q"], repr(r["cr"]), repr(r["distortion"]),
                 f"{r['encode_fps']:.1f}", f"{r['decode_fps']:.1f}"]
            )
    written = [args.out]
    if not args.no_plot:
        from .plotting import save_sweep_figure

        fig_path = os.path.splitext(args.out)[0] + ".png"
        save_sweep_figure(rows, fig_path)
        written.append(fig_path)
    print("wrote: " + ", ".join(written))
    return 0


def cmd_info(args) -> int:
    with open(args.input, "rb") as fh:
        info = stream_info(fh.read())
    rate = f"{info.frame_rate:g}" if info.frame_rate else "unknown"
    print(f"markers:     {info.n}")
    print(f"frames:      {info.f} recorded, {info.f_used} coded")
    print(f"frame rate:  {rate}")
    print(f"clips:       {info.N}")
    print(f"bases:       {info.K} (k={info.k}, {'database' if info.database_mode else 'single-basis'})")
    print(f"backend:     {info.backend}")
    print(f"quantizer:   Q={sorted(set(info.Q_values))}")
    print(f"clip length: {min(info.clip_lengths)}..{max(info.clip_lengths)}")
    print(f"truncation:  l={min(info.l_values)}..{max(info.l_values)}")
    print(f"size:        {info.stream_bytes} bytes (nominal CR {info.nominal_cr:.2f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
