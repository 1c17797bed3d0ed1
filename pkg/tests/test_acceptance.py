"""Acceptance suite: one test per release criterion, each printing a
PASS line on success. Run with -s (or look at captured output) for the
per-criterion report: pytest tests/test_acceptance.py -v -s
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from rclc.codec import MockCodec
from rclc.container import FrameRecord, ROLE_BU, ROLE_RU, StreamHeader, read_stream, write_stream
from rclc.detector import Detection, SidecarDetector
from rclc.enhance import FeatherEnhancer
from rclc.geometry import BoundingBox, union_box
from rclc.metrics import RdCurve, RdPoint, bd_rate, build_rd_curve, sequence_roi_psnr
from rclc.pipeline import (
    DecodeTiming,
    EncodeStats,
    FrameStats,
    decode_video,
    encode_video,
    format_timing_report,
    timing_report,
)
from rclc.raster import LUMA_ONLY, Raster, VideoSequence, crop, parse_y4m, write_y4m
from rclc.scheduler import BU, BU_BLENDING, GofConfig, ONE_BU, RU, RU_BLENDING
from rclc.synth import Constant, Noise, SolidFill, SynthSpec, generate, preset

from conftest import random_box


def sidecar_of(boxes):
    return SidecarDetector({i: [Detection(b, 1.0)] for i, b in enumerate(boxes)})


def report(name):
    print(f"[acceptance] {name}: PASS")


def test_lossless_roundtrip():
    """Moving-box at qp_roi 4: bit-exact RU regions, 99 dB ROI-PSNR, < 5 s."""
    t0 = time.monotonic()
    seq, boxes = generate(preset("moving-box"))        # 64x64, 16 frames
    cfg = GofConfig(gof_size=2, blend_mode=BU_BLENDING, qp_roi=4, qp_bg=47)
    data, stats = encode_video(seq, cfg, sidecar_of(boxes), MockCodec())
    decoded = decode_video(data, MockCodec())
    _, records = read_stream(data)
    for i, rec in enumerate(records):
        if rec.role == ROLE_RU:
            assert crop(decoded.frames[i], rec.compressed_box) \
                == crop(seq.frames[i], rec.compressed_box)
    scores = sequence_roi_psnr(seq, decoded, boxes)
    assert all(s == 99.0 for s in scores)
    assert sum(scores) / len(scores) == 99.0
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    report(f"lossless-roundtrip ({elapsed:.2f}s)")


def test_stale_pixel_elimination():
    """No RU keeps the foreground value at an old object position."""
    seq, boxes = generate(preset("moving-box"))
    cfg = GofConfig(gof_size=2, blend_mode=BU_BLENDING, qp_roi=4, qp_bg=47)
    data, _ = encode_video(seq, cfg, sidecar_of(boxes), MockCodec())
    decoded = decode_video(data, MockCodec())
    foreground = 255
    violations = 0
    for i in range(1, len(boxes)):
        cur = boxes[i]
        luma = decoded.frames[i].luma
        for j in range(i):
            old = boxes[j]
            for y in range(old.y0, old.y1):
                for x in range(old.x0, old.x1):
                    if cur.x0 <= x < cur.x1 and cur.y0 <= y < cur.y1:
                        continue
                    if luma[y, x] == foreground:
                        violations += 1
    assert violations == 0
    report("stale-pixel-elimination (0 violations)")


def test_blending_mode_ordering():
    """RU blending never exceeds BU blending's compressed area and wins
    strictly once the reference is more than one frame old; both match
    the (w+|dx|)(h+|dy|) closed form exactly.

    (The first RU after a BU shares its reference frame with both
    modes, so its two areas are necessarily equal; strictness is
    asserted for every later RU in each GOF.)
    """
    spec = SynthSpec(width=128, height=64, frames=16, background=Constant(0),
                     object_size=(16, 16), object_start=(2, 24), velocity=(5, 0),
                     fill=SolidFill(255), layout=LUMA_ONLY)
    seq, boxes = generate(spec)
    w, h = 16, 16
    strict_pairs = 0
    for gof in (4, 8):
        base = dict(gof_size=gof, qp_roi=4, qp_bg=47, align_grid=1)
        _, stats_b = encode_video(seq, GofConfig(blend_mode=BU_BLENDING, **base),
                                  sidecar_of(boxes), MockCodec())
        _, stats_r = encode_video(seq, GofConfig(blend_mode=RU_BLENDING, **base),
                                  sidecar_of(boxes), MockCodec())
        for fb, fr in zip(stats_b.frames, stats_r.frames):
            if fb.role != RU:
                continue
            distance = fb.index % gof
            assert fb.compressed_box.area == (w + 5 * distance) * (h + 0)
            assert fr.compressed_box.area == (w + 5) * (h + 0)
            assert fr.compressed_box.area <= fb.compressed_box.area
            if distance >= 2:
                assert fr.compressed_box.area < fb.compressed_box.area
                strict_pairs += 1
    assert strict_pairs > 0
    report(f"blending-mode-ordering ({strict_pairs} strict comparisons)")


def test_gof_tradeoff_direction():
    """Fixed background: bits fall strictly as GOF grows, ROI quality
    does not fall by more than 0.1 dB."""
    seq, boxes = generate(preset("textured"))
    codec = MockCodec()
    results = []
    for gof in (2, 4, 8, ONE_BU):
        cfg = GofConfig(gof_size=gof, blend_mode=BU_BLENDING, qp_roi=22,
                        qp_bg=47, align_grid=2)
        data, stats = encode_video(seq, cfg, sidecar_of(boxes), codec)
        decoded = decode_video(data, codec)
        scores = sequence_roi_psnr(seq, decoded, boxes)
        results.append((gof, stats.total_bits, sum(scores) / len(scores)))
    for (_, bits_a, psnr_a), (_, bits_b, psnr_b) in zip(results, results[1:]):
        assert bits_b < bits_a
        assert psnr_b >= psnr_a - 0.1
    summary = " -> ".join(f"gof{g or 'one_BU'}:{b}b/{p:.2f}dB" for g, b, p in results)
    report(f"gof-tradeoff ({summary})")


def test_roi_bd_rate_improvement():
    """Dual-qp ladder beats uniform whole-frame coding on ROI quality."""
    seq, boxes = generate(preset("textured"))
    codec = MockCodec()
    test_streams = []
    for qp_roi, qp_bg in [(22, 32), (27, 37), (32, 42), (37, 47)]:
        cfg = GofConfig(gof_size=2, blend_mode=BU_BLENDING, qp_roi=qp_roi,
                        qp_bg=qp_bg, align_grid=2)
        test_streams.append(encode_video(seq, cfg, sidecar_of(boxes), codec)[0])
    anchor_streams = []
    for qp in [32, 37, 42, 47]:
        cfg = GofConfig(gof_size=1, qp_roi=4, qp_bg=qp, align_grid=2)
        anchor_streams.append(encode_video(seq, cfg, sidecar_of(boxes), codec)[0])
    test = build_rd_curve(test_streams, seq, boxes, codec)
    anchor = build_rd_curve(anchor_streams, seq, boxes, codec)
    delta = bd_rate(anchor, test)
    assert delta < 0.0
    report(f"roi-bd-rate-improvement ({delta:.2f}%)")


def test_bd_rate_oracle():
    """Identity, exact-shift and dense-integration agreement."""
    base = RdCurve.from_points([RdPoint(r, q) for r, q in
                                zip([100, 200, 400, 800], [30, 33, 36, 39])])
    assert abs(bd_rate(base, base)) <= 1e-9
    shifted = RdCurve.from_points([RdPoint(r * 0.9, q) for r, q in
                                   zip([100, 200, 400, 800], [30, 33, 36, 39])])
    assert bd_rate(base, shifted) == pytest.approx(-10.0, abs=1e-6)

    rng = np.random.default_rng(42)
    checked = 0
    worst = 0.0
    while checked < 100:
        n_a, n_t = int(rng.integers(4, 8)), int(rng.integers(4, 8))
        anchor = RdCurve.from_points(
            [RdPoint(r, q) for r, q in zip(np.cumsum(rng.uniform(50, 400, n_a)),
                                           25 + np.cumsum(rng.uniform(1, 4, n_a)))])
        test = RdCurve.from_points(
            [RdPoint(r, q) for r, q in zip(np.cumsum(rng.uniform(50, 400, n_t)),
                                           25 + np.cumsum(rng.uniform(1, 4, n_t)))])
        lo = max(anchor.qualities().min(), test.qualities().min())
        hi = min(anchor.qualities().max(), test.qualities().max())
        if hi <= lo:
            continue
        got = bd_rate(anchor, test)
        pa = np.polyfit(anchor.qualities(), np.log10(anchor.rates()), 3)
        pt = np.polyfit(test.qualities(), np.log10(test.rates()), 3)
        xs = np.linspace(lo, hi, 200001)
        gap = np.trapezoid(np.polyval(pt, xs) - np.polyval(pa, xs), xs) / (hi - lo)
        oracle = (10.0 ** gap - 1.0) * 100.0
        worst = max(worst, abs(got - oracle))
        assert got == pytest.approx(oracle, abs=0.1)
        checked += 1
    report(f"bd-rate-oracle (max deviation {worst:.2e} pp over {checked} curves)")


def test_container_roundtrip_randomized():
    """1000 random streams survive write/read bit-exactly."""
    rng = np.random.default_rng(7)
    for trial in range(1000):
        width = int(rng.integers(1, 32)) * 16
        height = int(rng.integers(1, 24)) * 16
        count = int(rng.integers(0, 8))
        header = StreamHeader(width, height,
                              Fraction(int(rng.integers(1, 121)), int(rng.integers(1, 5))),
                              int(rng.integers(0, 10)), int(rng.integers(0, 2)),
                              int(rng.integers(0, 2)), count)
        records = []
        for i in range(count):
            payload = rng.integers(0, 256, size=int(rng.integers(0, 48)),
                                   dtype=np.uint8).tobytes()
            roi = random_box(rng, width, height)
            if i == 0 or rng.random() < 0.5:
                records.append(FrameRecord(ROLE_BU, int(rng.integers(0, 52)),
                                           roi, payload=payload))
            else:
                comp = union_box(roi, random_box(rng, width, height))
                records.append(FrameRecord(ROLE_RU, int(rng.integers(0, 52)),
                                           roi, comp,
                                           reference_index=int(rng.integers(0, i)),
                                           payload=payload))
        data = write_stream(header, records)
        back_header, back_records = read_stream(data)
        assert back_header == header and back_records == records
        assert write_stream(back_header, back_records) == data
    report("container-roundtrip (1000 randomized streams)")


def test_y4m_roundtrip_randomized():
    """1000 random sequences survive write/parse bit-exactly."""
    rng = np.random.default_rng(11)
    for trial in range(1000):
        width = int(rng.integers(1, 17)) * 2
        height = int(rng.integers(1, 17)) * 2
        frames = []
        for _ in range(int(rng.integers(1, 4))):
            planes = [rng.integers(0, 256, (height, width), dtype=np.uint8),
                      rng.integers(0, 256, (height // 2, width // 2), dtype=np.uint8),
                      rng.integers(0, 256, (height // 2, width // 2), dtype=np.uint8)]
            frames.append(Raster(width, height, planes))
        seq = VideoSequence(width, height,
                            Fraction(int(rng.integers(1, 121)), int(rng.integers(1, 5))),
                            frames)
        data = write_y4m(seq)
        back = parse_y4m(data)
        assert back.frames == seq.frames
        assert back.frame_rate == seq.frame_rate
        assert write_y4m(back) == data
    report("y4m-roundtrip (1000 randomized sequences)")


def test_timing_formulas_and_1080p_report():
    """Injected durations reproduce the role formulas exactly; a real
    1080p encode produces a well-formed fps report."""
    frames = [
        FrameStats(0, BU, BoundingBox(0, 0, 8, 8), BoundingBox(0, 0, 8, 8),
                   0, 0.008, 0.0, 0.012),
        FrameStats(1, RU, BoundingBox(0, 0, 8, 8), BoundingBox(0, 0, 8, 8),
                   0, 0.008, 0.001, 0.005),
    ]
    rep = timing_report(EncodeStats(frames, 0, 0.0),
                        [DecodeTiming(0, BU, 0.010, enhancement_s=0.002),
                         DecodeTiming(1, RU, 0.004, 0.002, 0.001)])
    assert rep.encoder[BU].mean_s == 0.012            # max(detection, compression)
    assert rep.encoder[RU].mean_s == pytest.approx(0.014)  # det + roi + comp
    assert rep.decoder[BU].mean_s == pytest.approx(0.012)  # decomp + enhance
    assert rep.decoder[RU].mean_s == pytest.approx(0.007)  # decomp + blend + smooth
    assert rep.encoder[BU].fps == pytest.approx(1 / 0.012)

    spec = SynthSpec(width=1920, height=1080, frames=4, background=Noise(seed=3),
                     object_size=(256, 384), object_start=(600, 300),
                     velocity=(16, 0), fill=SolidFill(235))
    seq, boxes = generate(spec)
    cfg = GofConfig(gof_size=2, qp_roi=22, qp_bg=47)
    data, stats = encode_video(seq, cfg, sidecar_of(boxes), MockCodec(),
                               concurrent_bu=True)
    decoded, timings = None, None
    from rclc.pipeline import decode_video_timed
    decoded, timings = decode_video_timed(data, MockCodec(), FeatherEnhancer(4))
    live = timing_report(stats, timings)
    text = format_timing_report(live)
    assert live.encoder["ALL"].count == 4
    assert live.encoder[BU].mean_s > 0 and live.encoder[RU].mean_s > 0
    assert live.encoder["ALL"].fps > 0
    for side in ("encoder", "decoder"):
        assert any(line.startswith(side) and "fps=" in line
                   for line in text.splitlines())
    encoder_fps = live.encoder["ALL"].fps
    report(f"timing-formulas (1080p mock encode at {encoder_fps:.1f} fps)")
