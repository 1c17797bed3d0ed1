"""End-to-end encoding and decoding.

The encoder classifies each frame (BU refreshes the whole background at
the coarse qp, RU re-encodes only its enlarged ROI at the fine qp) and
maintains a decoder mirror so RU references are exactly what the decoder
will hold. The decoder pastes RU patches onto their references and keeps
its reference store free of enhancement, so enhancer choice never causes
encoder/decoder drift.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .codec import EncodedRegion
from .container import (
    BLEND_TAGS,
    FrameRecord,
    RECORD_OVERHEAD_BYTES,
    ROLE_BU,
    ROLE_RU,
    StreamHeader,
    pack_codec_tag,
    read_stream,
    stream_bits,
    unpack_codec_tag,
    write_stream,
)
from .detector import DetectorState, resolve_roi
from .errors import MissingReference
from .geometry import BoundingBox, align_box, compressed_area, full_frame_box
from .raster import I420, Raster, VideoSequence, crop, paste
from .scheduler import BU, GofConfig, RU, classify_frame, reference_for

_CLOCK = time.perf_counter


@dataclass
class FrameStats:
    index: int
    role: str
    roi_box: BoundingBox
    compressed_box: BoundingBox
    record_bits: int
    detection_s: float
    roi_calc_s: float
    compression_s: float


@dataclass
class EncodeStats:
    frames: list[FrameStats]
    total_bits: int
    wall_s: float
    reconstruction: VideoSequence | None = None


@dataclass
class DecodeTiming:
    index: int
    role: str
    decompression_s: float
    blending_s: float = 0.0
    smoothing_s: float = 0.0
    enhancement_s: float = 0.0


@dataclass(frozen=True)
class RoleLatency:
    count: int
    mean_s: float

    @property
    def fps(self) -> float:
        return math.inf if self.mean_s == 0.0 else 1.0 / self.mean_s


@dataclass(frozen=True)
class TimingReport:
    encoder: dict[str, RoleLatency]
    decoder: dict[str, RoleLatency]


def _timed(fn, *args):
    t0 = _CLOCK()
    result = fn(*args)
    return result, _CLOCK() - t0


def encode_video(seq: VideoSequence, cfg: GofConfig, detector, backend,
                 keep_reconstruction: bool = False,
                 concurrent_bu: bool = False) -> tuple[bytes, EncodeStats]:
    """Encode a sequence into RCLC container bytes plus per-frame stats.

    detector provides detect(index, frame) and observe_bu(frame);
    backend provides encode/decode. With concurrent_bu, a BU frame's
    detection and compression run in parallel threads (they are
    independent pure stages), matching the latency model's max() rule.

    Args:
        seq: source frames, all one geometry.
        cfg: GOF period, blend mode, qp pair, alignment grid.
        detector: per-frame ROI source.
        backend: region codec.
        keep_reconstruction: retain the decoder-mirror frames on the stats.
        concurrent_bu: overlap detection with BU compression.

    Returns:
        (container bytes, EncodeStats)
    """
    grid = cfg.align_grid
    if seq.color_layout == I420 and grid % 2:
        raise ValueError("I420 content requires an even alignment grid")
    width, height = seq.width, seq.height
    roi_grid = 1 if seq.color_layout != I420 else 2
    state = DetectorState()
    records: list[FrameRecord] = []
    frame_stats: list[FrameStats] = []
    mirror: list[Raster] = []
    pool = ThreadPoolExecutor(max_workers=2) if concurrent_bu else None
    wall0 = _CLOCK()

    def detection_stage(index: int, frame: Raster) -> BoundingBox:
        detections = detector.detect(index, frame)
        roi = resolve_roi(detections, state, width, height)
        if roi_grid > 1:
            roi = align_box(roi, roi_grid, width, height)
        return roi

    try:
        for i, frame in enumerate(seq.frames):
            kind = classify_frame(i, cfg)
            if kind == BU:
                if pool is not None:
                    det_f = pool.submit(_timed, detection_stage, i, frame)
                    enc_f = pool.submit(_timed, backend.encode, frame, cfg.qp_bg)
                    roi, det_s = det_f.result()
                    region, comp_s = enc_f.result()
                else:
                    roi, det_s = _timed(detection_stage, i, frame)
                    region, comp_s = _timed(backend.encode, frame, cfg.qp_bg)
                detector.observe_bu(frame)
                record = FrameRecord(ROLE_BU, cfg.qp_bg, roi, payload=region.payload)
                comp_box = full_frame_box(width, height)
                roi_calc_s = 0.0
                recon = backend.decode(region)
            else:
                roi, det_s = _timed(detection_stage, i, frame)
                t0 = _CLOCK()
                ref_index = reference_for(i, cfg)
                reference_roi = records[ref_index].roi_box
                comp_box = align_box(compressed_area(roi, reference_roi),
                                     grid, width, height)
                roi_calc_s = _CLOCK() - t0
                t0 = _CLOCK()
                region = backend.encode(crop(frame, comp_box), cfg.qp_roi)
                comp_s = _CLOCK() - t0
                record = FrameRecord(ROLE_RU, cfg.qp_roi, roi, comp_box,
                                     ref_index, region.payload)
                recon = paste(mirror[ref_index], backend.decode(region), comp_box)
            records.append(record)
            mirror.append(recon)
            frame_stats.append(FrameStats(
                i, kind, roi, comp_box,
                8 * (RECORD_OVERHEAD_BYTES + len(record.payload)),
                det_s, roi_calc_s, comp_s))
    finally:
        if pool is not None:
            pool.shutdown()

    header = StreamHeader(width, height, seq.frame_rate, cfg.gof_size,
                          BLEND_TAGS[cfg.blend_mode],
                          pack_codec_tag(backend.name, seq.color_layout),
                          len(records))
    data = write_stream(header, records)
    recon_seq = None
    if keep_reconstruction:
        recon_seq = VideoSequence(width, height, seq.frame_rate, mirror,
                                  seq.color_layout)
    stats = EncodeStats(frame_stats, stream_bits(data), _CLOCK() - wall0, recon_seq)
    return data, stats


def decode_video_timed(data: bytes, backend,
                       enhancer=None) -> tuple[VideoSequence, list[DecodeTiming]]:
    """Reconstruct frames from a container, with per-stage durations.

    BU frames decode whole and get their ROI region enhanced; RU frames
    decode their compressed box, paste it onto the referenced
    reconstruction, and get the paste seam smoothed. References always
    come from the un-enhanced store.
    """
    header, records = read_stream(data)
    codec_name, layout = unpack_codec_tag(header.codec_tag)
    refs: list[Raster] = []
    shown: list[Raster] = []
    timings: list[DecodeTiming] = []
    for i, rec in enumerate(records):
        if rec.role == ROLE_BU:
            region = EncodedRegion(rec.payload, rec.qp, header.width,
                                   header.height, layout)
            recon, dec_s = _timed(backend.decode, region)
            refs.append(recon)
            enh_s = 0.0
            out = recon
            if enhancer is not None:
                out, enh_s = _timed(enhancer.enhance_bu_roi, recon, rec.roi_box)
            timings.append(DecodeTiming(i, BU, dec_s, enhancement_s=enh_s))
        else:
            if not 0 <= rec.reference_index < i:
                raise MissingReference(
                    f"record {i} references frame {rec.reference_index}")
            box = rec.compressed_box
            region = EncodedRegion(rec.payload, rec.qp, box.width, box.height, layout)
            patch, dec_s = _timed(backend.decode, region)
            recon, blend_s = _timed(paste, refs[rec.reference_index], patch, box)
            refs.append(recon)
            smooth_s = 0.0
            out = recon
            if enhancer is not None:
                out, smooth_s = _timed(enhancer.smooth_ru_seam, recon, box)
            timings.append(DecodeTiming(i, RU, dec_s, blend_s, smooth_s))
        shown.append(out)
    seq = VideoSequence(header.width, header.height, header.frame_rate, shown, layout)
    return seq, timings


def decode_video(data: bytes, backend, enhancer=None) -> VideoSequence:
    seq, _ = decode_video_timed(data, backend, enhancer)
    return seq


def encoder_frame_latency(fs: FrameStats) -> float:
    """BU stages may overlap, RU stages are a chain."""
    if fs.role == BU:
        return max(fs.detection_s, fs.compression_s)
    return fs.detection_s + fs.roi_calc_s + fs.compression_s


def decoder_frame_latency(dt: DecodeTiming) -> float:
    if dt.role == BU:
        return dt.decompression_s + dt.enhancement_s
    return dt.decompression_s + dt.blending_s + dt.smoothing_s


def _summarize(latencies: dict[str, list[float]]) -> dict[str, RoleLatency]:
    out = {}
    for role, values in latencies.items():
        if values:
            out[role] = RoleLatency(len(values), sum(values) / len(values))
    return out


def timing_report(stats: EncodeStats,
                  decode_timings: list[DecodeTiming] | None = None) -> TimingReport:
    """Per-role mean latencies and the frame rates they support."""
    enc: dict[str, list[float]] = {BU: [], RU: [], "ALL": []}
    for fs in stats.frames:
        latency = encoder_frame_latency(fs)
        enc[fs.role].append(latency)
        enc["ALL"].append(latency)
    dec: dict[str, list[float]] = {BU: [], RU: [], "ALL": []}
    for dt in decode_timings or []:
        latency = decoder_frame_latency(dt)
        dec[dt.role].append(latency)
        dec["ALL"].append(latency)
    return TimingReport(_summarize(enc), _summarize(dec))


def format_timing_report(report: TimingReport) -> str:
    lines = []
    for side, table in (("encoder", report.encoder), ("decoder", report.decoder)):
        for role in (BU, RU, "ALL"):
            if role in table:
                entry = table[role]
                fps = "inf" if math.isinf(entry.fps) else f"{entry.fps:.1f}"
                lines.append(f"{side} {role.lower():>3}: n={entry.count} "
                             f"mean={entry.mean_s * 1e3:.3f} ms fps={fps}")
    return "\n".join(lines)
