"""Rate and quality measurement: PSNR, RD curves and the Bjontegaard
delta-rate between two curves.

PSNR is luma-only by default (6:1:1 YUV weighting is available), capped
at 99 dB for identical content so curve fitting stays finite. BD-rate
fits cubic polynomials of log10(rate) against quality, integrates their
difference over the shared quality interval and converts the mean gap
back to a percentage; negative means the test curve spends fewer bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFit,
    DimensionMismatch,
    MismatchedLengths,
    NoOverlap,
    OutOfBounds,
)
from .geometry import BoundingBox
from .raster import Raster, VideoSequence

PSNR_CAP_DB = 99.0


def _region_mse(a: np.ndarray, b: np.ndarray,
                box: tuple[int, int, int, int] | None) -> float:
    if box is not None:
        x0, y0, x1, y1 = box
        a = a[y0:y1, x0:x1]
        b = b[y0:y1, x0:x1]
    diff = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(diff * diff))


def _to_db(mse: float) -> float:
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(float(10.0 * np.log10(255.0 ** 2 / mse)), PSNR_CAP_DB)


def psnr(a: Raster, b: Raster, region: BoundingBox | None = None,
         mode: str = "luma") -> float:
    """Peak signal-to-noise ratio in dB, optionally over one region.

    mode "luma" scores plane 0 only; "yuv611" weights per-plane PSNR
    6:1:1 (chroma regions at halved coordinates).
    """
    if (a.width, a.height, len(a.planes)) != (b.width, b.height, len(b.planes)):
        raise DimensionMismatch(
            f"{a.width}x{a.height}/{len(a.planes)}p vs "
            f"{b.width}x{b.height}/{len(b.planes)}p")
    if region is not None and (region.x1 > a.width or region.y1 > a.height):
        raise OutOfBounds(f"region {region.as_tuple()} exceeds frame")
    box = region.as_tuple() if region is not None else None
    luma_db = _to_db(_region_mse(a.planes[0], b.planes[0], box))
    if mode == "luma" or len(a.planes) == 1:
        return luma_db
    if mode != "yuv611":
        raise ValueError(f"unknown psnr mode {mode!r}")
    cbox = None
    if box is not None:
        x0, y0, x1, y1 = box
        cbox = (x0 // 2, y0 // 2, -(-x1 // 2), -(-y1 // 2))
    u_db = _to_db(_region_mse(a.planes[1], b.planes[1], cbox))
    v_db = _to_db(_region_mse(a.planes[2], b.planes[2], cbox))
    return (6.0 * luma_db + u_db + v_db) / 8.0


@dataclass(frozen=True)
class RdPoint:
    bitrate_kbps: float
    psnr_db: float

    def __post_init__(self):
        object.__setattr__(self, "bitrate_kbps", float(self.bitrate_kbps))
        object.__setattr__(self, "psnr_db", float(self.psnr_db))
        if self.bitrate_kbps <= 0.0:
            raise DegenerateFit(f"bitrate {self.bitrate_kbps} must be positive")
        if not np.isfinite(self.psnr_db):
            raise DegenerateFit(f"psnr {self.psnr_db} must be finite")


@dataclass(frozen=True)
class RdCurve:
    points: tuple[RdPoint, ...]

    @classmethod
    def from_points(cls, points) -> "RdCurve":
        ordered = tuple(sorted(points, key=lambda p: p.bitrate_kbps))
        return cls(ordered)

    def rates(self) -> np.ndarray:
        return np.array([p.bitrate_kbps for p in self.points])

    def qualities(self) -> np.ndarray:
        return np.array([p.psnr_db for p in self.points])


def _fit_log_rate(curve: RdCurve, label: str) -> np.ndarray:
    if len(curve.points) < 4:
        raise DegenerateFit(f"{label} curve has {len(curve.points)} points, need >= 4")
    rates = curve.rates()
    quals = curve.qualities()
    if np.any(np.diff(rates) <= 0) or np.any(np.diff(quals) <= 0):
        raise DegenerateFit(f"{label} curve is not strictly monotone")
    return np.polyfit(quals, np.log10(rates), 3)


def bd_rate(anchor: RdCurve, test: RdCurve) -> float:
    """Average rate change (%) of test against anchor at equal quality.

    Cubic log-rate fits are exact interpolants at 4 points and least
    squares beyond; the fits' gap is averaged over the overlapping
    quality interval.
    """
    poly_anchor = _fit_log_rate(anchor, "anchor")
    poly_test = _fit_log_rate(test, "test")
    lo = max(anchor.qualities().min(), test.qualities().min())
    hi = min(anchor.qualities().max(), test.qualities().max())
    if hi <= lo:
        raise NoOverlap(f"quality ranges [{lo:.2f}, {hi:.2f}] do not overlap")
    int_anchor = np.polyint(poly_anchor)
    int_test = np.polyint(poly_test)
    mean_gap = ((np.polyval(int_test, hi) - np.polyval(int_test, lo))
                - (np.polyval(int_anchor, hi) - np.polyval(int_anchor, lo))) / (hi - lo)
    return float((10.0 ** mean_gap - 1.0) * 100.0)


def sequence_roi_psnr(reference: VideoSequence, decoded: VideoSequence,
                      roi_boxes: list[BoundingBox], mode: str = "luma") -> list[float]:
    """Per-frame PSNR restricted to each frame's ROI box."""
    if len(reference.frames) != len(decoded.frames):
        raise MismatchedLengths(
            f"{len(reference.frames)} reference frames vs {len(decoded.frames)} decoded")
    if len(roi_boxes) != len(decoded.frames):
        raise MismatchedLengths(
            f"{len(roi_boxes)} roi boxes vs {len(decoded.frames)} frames")
    return [psnr(ref, dec, box, mode)
            for ref, dec, box in zip(reference.frames, decoded.frames, roi_boxes)]


def build_rd_curve(streams: list[bytes], reference: VideoSequence,
                   roi_boxes: list[BoundingBox], backend,
                   enhancer=None, mode: str = "luma") -> RdCurve:
    """One RD point per container: stream bitrate vs mean ROI-PSNR.

    Bitrate is stream bits times frame rate over frame count, in kbps.
    """
    from .container import read_stream, stream_bits
    from .pipeline import decode_video

    points = []
    for data in streams:
        header, _ = read_stream(data)
        decoded = decode_video(data, backend, enhancer)
        scores = sequence_roi_psnr(reference, decoded, roi_boxes, mode)
        fps = header.frame_rate.numerator / header.frame_rate.denominator
        bitrate = stream_bits(data) * fps / len(decoded.frames) / 1000.0
        points.append(RdPoint(bitrate, sum(scores) / len(scores)))
    return RdCurve.from_points(points)


def load_rd_csv(text: str) -> RdCurve:
    """Parse "bitrate_kbps,psnr_db" lines into a curve."""
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DegenerateFit(f"line {lineno}: expected 'bitrate,psnr'")
        points.append(RdPoint(float(parts[0]), float(parts[1])))
    if not points:
        raise DegenerateFit("no RD points in input")
    return RdCurve.from_points(points)


def dump_rd_csv(curve: RdCurve) -> str:
    return "".join(f"{p.bitrate_kbps!r},{p.psnr_db!r}\n" for p in curve.points)
