"""Command-line surface: encode, decode, eval, bdrate, synth.

Every subcommand is a thin shell over library calls. Exit codes: 0 on
success, 1 for usage problems, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import synth as synth_mod
from .codec import ExternCodec, MockCodec
from .container import read_stream, stream_bits
from .detector import (
    Detection,
    DiffDetector,
    SidecarDetector,
    dump_sidecar,
    load_sidecar,
    roi_track,
)
from .enhance import make_enhancer
from .errors import RclcError
from .metrics import bd_rate, load_rd_csv, sequence_roi_psnr
from .pipeline import decode_video_timed, encode_video, format_timing_report, timing_report
from .raster import parse_y4m, write_y4m
from .scheduler import BU_BLENDING, GofConfig, RU_BLENDING


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; this tool reserves 2 for runtime errors
    def error(self, message):
        raise _UsageError(message)


def _load_codec(spec: str):
    if spec == "mock":
        return MockCodec()
    if spec.startswith("extern:"):
        path = Path(spec.split(":", 1)[1])
        settings = {}
        for raw in path.read_text().splitlines():
            line = raw.strip()
            # full-line comments only: templates may legitimately contain '#'
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            settings[key.strip()] = value.strip()
        if "encode" not in settings or "decode" not in settings:
            raise _UsageError(f"{path}: template file needs encode= and decode= lines")
        return ExternCodec(settings["encode"], settings["decode"],
                           settings.get("io", "y4m"))
    raise _UsageError(f"unknown codec {spec!r}")


def _load_detector(spec: str):
    if spec == "diff":
        return DiffDetector()
    if spec.startswith("diff:"):
        threshold, min_area = spec.split(":", 1)[1].split(",")
        return DiffDetector(int(threshold), int(min_area))
    if spec.startswith("sidecar:"):
        return SidecarDetector(load_sidecar(Path(spec.split(":", 1)[1]).read_text()))
    raise _UsageError(f"unknown detector {spec!r}")


def _cmd_encode(args) -> int:
    # selections are validated before any input work starts
    cfg = GofConfig(gof_size=args.gof,
                    blend_mode=BU_BLENDING if args.blend == "bu" else RU_BLENDING,
                    qp_roi=args.qp_roi, qp_bg=args.qp_bg,
                    force_bu=tuple(args.force_bu), align_grid=args.grid)
    detector = _load_detector(args.detector)
    backend = _load_codec(args.codec)
    seq = parse_y4m(Path(args.input).read_bytes())
    data, stats = encode_video(seq, cfg, detector, backend,
                               concurrent_bu=args.concurrent)
    Path(args.out).write_bytes(data)
    for fs in stats.frames:
        print(f"frame={fs.index} role={fs.role} roi={fs.roi_box.as_tuple()} "
              f"compressed={fs.compressed_box.as_tuple()} bits={fs.record_bits}")
    print(f"total_bits={stats.total_bits} frames={len(stats.frames)} "
          f"wall_s={stats.wall_s:.3f}")
    print(format_timing_report(timing_report(stats)))
    return 0


def _cmd_decode(args) -> int:
    data = Path(args.input).read_bytes()
    backend = _load_codec(args.codec)
    enhancer = make_enhancer(args.enhancer)
    try:
        seq, _ = decode_video_timed(data, backend, enhancer)
    finally:
        if enhancer is not None:
            enhancer.close()
    Path(args.out).write_bytes(write_y4m(seq))
    return 0


def _cmd_eval(args) -> int:
    reference = parse_y4m(Path(args.ref).read_bytes())
    decoded = parse_y4m(Path(args.dist).read_bytes())
    table = load_sidecar(Path(args.roi).read_text())
    boxes = roi_track(table, len(decoded.frames), decoded.width, decoded.height)
    scores = sequence_roi_psnr(reference, decoded, boxes, args.mode)
    for i, score in enumerate(scores):
        print(f"frame={i} roi_psnr={score:.4f}")
    print(f"mean_roi_psnr={sum(scores) / len(scores):.4f}")
    if args.stream:
        data = Path(args.stream).read_bytes()
        header, _ = read_stream(data)
        fps = header.frame_rate.numerator / header.frame_rate.denominator
        kbps = stream_bits(data) * fps / header.frame_count / 1000.0
        print(f"bitrate_kbps={kbps:.3f}")
    return 0


def _cmd_bdrate(args) -> int:
    anchor = load_rd_csv(Path(args.anchor).read_text())
    test = load_rd_csv(Path(args.test).read_text())
    print(f"bd_rate={bd_rate(anchor, test):.2f}%")
    return 0


def _cmd_synth(args) -> int:
    spec = synth_mod.preset(args.preset, frames=args.frames)
    seq, boxes = synth_mod.generate(spec)
    Path(args.out).write_bytes(write_y4m(seq))
    table = {i: [Detection(box, 1.0)] for i, box in enumerate(boxes)}
    Path(args.roi).write_text(dump_sidecar(table))
    print(f"wrote {len(seq.frames)} frames to {args.out}, boxes to {args.roi}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rclc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="compress a Y4M file into an .rclc container")
    enc.add_argument("--input", required=True)
    enc.add_argument("--out", required=True)
    enc.add_argument("--gof", type=int, default=2,
                     help="frames per background update; 0 sends one BU only")
    enc.add_argument("--blend", choices=["bu", "ru"], default="bu")
    enc.add_argument("--qp-roi", type=int, default=27)
    enc.add_argument("--qp-bg", type=int, default=37)
    enc.add_argument("--detector", default="diff",
                     help="diff | diff:<threshold>,<min_area> | sidecar:<path>")
    enc.add_argument("--codec", default="mock", help="mock | extern:<template-file>")
    enc.add_argument("--grid", type=int, default=16, choices=[1, 2, 4, 8, 16])
    enc.add_argument("--force-bu", type=int, nargs="*", default=[])
    enc.add_argument("--concurrent", action="store_true",
                     help="overlap BU detection and compression")
    enc.set_defaults(func=_cmd_encode)

    dec = sub.add_parser("decode", help="reconstruct a Y4M file from a container")
    dec.add_argument("--input", required=True)
    dec.add_argument("--out", required=True)
    dec.add_argument("--codec", default="mock")
    dec.add_argument("--enhancer", default="none",
                     help="none | feather:<band> | extern:<command>")
    dec.set_defaults(func=_cmd_decode)

    ev = sub.add_parser("eval", help="ROI-PSNR of a decoded file against its source")
    ev.add_argument("--ref", required=True)
    ev.add_argument("--dist", required=True)
    ev.add_argument("--roi", required=True, help="sidecar file of ROI boxes")
    ev.add_argument("--stream", help="container whose bitrate to report")
    ev.add_argument("--mode", choices=["luma", "yuv611"], default="luma")
    ev.set_defaults(func=_cmd_eval)

    bd = sub.add_parser("bdrate", help="BD-rate between two RD csv files")
    bd.add_argument("--anchor", required=True)
    bd.add_argument("--test", required=True)
    bd.set_defaults(func=_cmd_bdrate)

    sy = sub.add_parser("synth", help="generate a synthetic Y4M plus ROI sidecar")
    sy.add_argument("--preset", default="moving-box",
                    choices=sorted(synth_mod.PRESETS))
    sy.add_argument("--frames", type=int)
    sy.add_argument("--out", required=True)
    sy.add_argument("--roi", required=True)
    sy.set_defaults(func=_cmd_synth)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (RclcError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
