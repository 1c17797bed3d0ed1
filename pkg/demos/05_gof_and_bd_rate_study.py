"""Rate-distortion studies: GOF size, blending mode, and BD-rate
against uniform whole-frame coding.

Run: python3 demos/05_gof_and_bd_rate_study.py
"""

from rclc import (
    GofConfig,
    MockCodec,
    SidecarDetector,
    bd_rate,
    build_rd_curve,
    decode_video,
    dump_rd_csv,
    encode_video,
    sequence_roi_psnr,
)
from rclc.detector import Detection
from rclc.scheduler import BU_BLENDING, ONE_BU, RU_BLENDING
from rclc.synth import generate, preset

seq, boxes = generate(preset("textured"))
detector = SidecarDetector({i: [Detection(b, 1.0)] for i, b in enumerate(boxes)})
codec = MockCodec()


def measure(cfg):
    data, stats = encode_video(seq, cfg, detector, codec)
    scores = sequence_roi_psnr(seq, decode_video(data, codec), boxes)
    return data, stats.total_bits, sum(scores) / len(scores)


# 1. the background refresh period trades bits against nothing (here the
# background is static, so stretching the GOF is free quality)
print("GOF sweep at qp 22/47:")
for gof in (2, 4, 8, ONE_BU):
    _, bits, quality = measure(GofConfig(gof_size=gof, qp_roi=22, qp_bg=47,
                                         align_grid=2))
    label = "one_BU" if gof == ONE_BU else f"gof={gof}"
    print(f"  {label:>7}: {bits:>7} bits  mean ROI-PSNR {quality:.2f} dB")

# 2. blending against the previous frame keeps the encoded rectangle
# small when the reference would otherwise be many frames old
print("\nblending mode at gof=8 (same qps):")
for mode in (BU_BLENDING, RU_BLENDING):
    _, bits, quality = measure(GofConfig(gof_size=8, blend_mode=mode,
                                         qp_roi=22, qp_bg=47, align_grid=2))
    print(f"  {mode:>2}-blending: {bits:>7} bits  mean ROI-PSNR {quality:.2f} dB")

# 3. four-point ladders: dual-qp ROI coding vs uniform coding
test_streams = [measure(GofConfig(gof_size=2, qp_roi=qr, qp_bg=qb, align_grid=2))[0]
                for qr, qb in [(22, 32), (27, 37), (32, 42), (37, 47)]]
anchor_streams = [measure(GofConfig(gof_size=1, qp_roi=4, qp_bg=qp, align_grid=2))[0]
                  for qp in [32, 37, 42, 47]]
test = build_rd_curve(test_streams, seq, boxes, codec)
anchor = build_rd_curve(anchor_streams, seq, boxes, codec)

print("\nRD points (bitrate kbps, ROI-PSNR dB):")
print("  dual-qp:", [(round(p.bitrate_kbps, 1), round(p.psnr_db, 2))
                     for p in test.points])
print("  uniform:", [(round(p.bitrate_kbps, 1), round(p.psnr_db, 2))
                     for p in anchor.points])
print(f"\nBD-rate of dual-qp vs uniform: {bd_rate(anchor, test):.2f}% "
      "(negative = bits saved at equal ROI quality)")

print("\ncsv export of the dual-qp curve:")
print(dump_rd_csv(test), end="")
