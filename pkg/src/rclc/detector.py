"""Per-frame ROI sources: background-difference detection, sidecar files
of precomputed boxes, and the single-box resolution policy.

The built-in detector thresholds the luma difference against a background
frame and reports 4-connected components as boxes. Real detector output
(person boxes etc.) enters through sidecar files instead; both feed the
same resolve_roi policy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, InvalidBox, ParseError
from .geometry import BoundingBox, full_frame_box, union_box
from .raster import Raster

DEFAULT_THRESHOLD = 25
DEFAULT_MIN_AREA = 64

# 4-connectivity structuring element for component labelling.
_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise InvalidBox(f"confidence {self.confidence} outside [0, 1]")


@dataclass
class DetectorState:
    """Per-stream fallback memory owned by the encoder loop."""

    last_roi: BoundingBox | None = None
    background_model: Raster | None = None


def detect_diff(frame: Raster, background: Raster,
                threshold: int = DEFAULT_THRESHOLD,
                min_area: int = DEFAULT_MIN_AREA) -> list[Detection]:
    """Boxes of 4-connected changed regions, smallest-area ones dropped.

    Confidence is the fill ratio: component area over its box area.
    """
    if (frame.width, frame.height) != (background.width, background.height):
        raise DimensionMismatch(
            f"frame {frame.width}x{frame.height} vs background "
            f"{background.width}x{background.height}")
    delta = np.abs(frame.luma.astype(np.int16) - background.luma.astype(np.int16))
    mask = delta > threshold
    labels, count = ndimage.label(mask, structure=_CROSS)
    detections = []
    for lab, slc in enumerate(ndimage.find_objects(labels, count), start=1):
        if slc is None:
            continue
        slice_y, slice_x = slc
        # a component's bounding slice can contain pixels of other labels
        area = int(np.count_nonzero(labels[slice_y, slice_x] == lab))
        if area < min_area:
            continue
        box = BoundingBox(slice_x.start, slice_y.start, slice_x.stop, slice_y.stop)
        detections.append(Detection(box, area / box.area))
    detections.sort(key=lambda d: d.box.as_tuple())
    return detections


def resolve_roi(detections: list[Detection], state: DetectorState,
                frame_w: int, frame_h: int) -> BoundingBox:
    """Reduce detections to the single ROI box driving compression.

    Union of all boxes when anything was detected; otherwise the last
    known ROI; otherwise the conservative full frame. Updates state.
    """
    if detections:
        roi = detections[0].box
        for det in detections[1:]:
            roi = union_box(roi, det.box)
    elif state.last_roi is not None:
        roi = state.last_roi
    else:
        roi = full_frame_box(frame_w, frame_h)
    state.last_roi = roi
    return roi


def roi_track(table: dict[int, list[Detection]], frame_count: int,
              frame_w: int, frame_h: int) -> list[BoundingBox]:
    """Resolve a detection map to one ROI box per frame index."""
    state = DetectorState()
    return [resolve_roi(table.get(i, []), state, frame_w, frame_h)
            for i in range(frame_count)]


def load_sidecar(text: str) -> dict[int, list[Detection]]:
    """Parse "index x0 y0 x1 y1 confidence" lines; '#' starts a comment."""
    table: dict[int, list[Detection]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 6:
            raise ParseError(f"line {lineno}: expected 6 fields, got {len(fields)}")
        try:
            index = int(fields[0])
            coords = [int(v) for v in fields[1:5]]
            confidence = float(fields[5])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if index < 0:
            raise ParseError(f"line {lineno}: negative frame index {index}")
        try:
            det = Detection(BoundingBox(*coords), confidence)
        except InvalidBox as exc:
            raise InvalidBox(f"line {lineno}: {exc}") from exc
        table.setdefault(index, []).append(det)
    return table


def dump_sidecar(table: dict[int, list[Detection]]) -> str:
    """Serialize a detection map in load_sidecar's line format."""
    lines = []
    for index in sorted(table):
        for det in table[index]:
            b = det.box
            lines.append(f"{index} {b.x0} {b.y0} {b.x1} {b.y1} {det.confidence!r}")
    return "\n".join(lines) + ("\n" if lines else "")


class SidecarDetector:
    """Replays precomputed per-frame detections (e.g. person boxes)."""

    def __init__(self, table: dict[int, list[Detection]]):
        self.table = table

    def detect(self, index: int, frame: Raster) -> list[Detection]:
        return list(self.table.get(index, []))

    def observe_bu(self, frame: Raster) -> None:
        pass


class DiffDetector:
    """Background-difference detector keyed to the most recent BU frame."""

    def __init__(self, threshold: int = DEFAULT_THRESHOLD,
                 min_area: int = DEFAULT_MIN_AREA):
        self.threshold = threshold
        self.min_area = min_area
        self.background: Raster | None = None

    def detect(self, index: int, frame: Raster) -> list[Detection]:
        if self.background is None:
            return []
        return detect_diff(frame, self.background, self.threshold, self.min_area)

    def observe_bu(self, frame: Raster) -> None:
        self.background = frame
