"""Axis-aligned bounding boxes and the compressed-area calculation.

Boxes use half-open pixel coordinates: (x0, y0) inclusive, (x1, y1)
exclusive, so width = x1 - x0 and height = y1 - y0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyIntersection, InvalidBox


@dataclass(frozen=True, order=True)
class BoundingBox:
    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (0 <= self.x0 < self.x1 and 0 <= self.y0 < self.y1):
            raise InvalidBox(f"degenerate box {(self.x0, self.y0, self.x1, self.y1)}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains(self, other: "BoundingBox") -> bool:
        return (self.x0 <= other.x0 and self.y0 <= other.y0
                and self.x1 >= other.x1 and self.y1 >= other.y1)

    def intersects(self, other: "BoundingBox") -> bool:
        return (self.x0 < other.x1 and other.x0 < self.x1
                and self.y0 < other.y1 and other.y0 < self.y1)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.x1, self.y1)


def full_frame_box(width: int, height: int) -> BoundingBox:
    return BoundingBox(0, 0, width, height)


def union_box(a: BoundingBox, b: BoundingBox) -> BoundingBox:
    """Minimal box containing both a and b."""
    return BoundingBox(min(a.x0, b.x0), min(a.y0, b.y0),
                       max(a.x1, b.x1), max(a.y1, b.y1))


def compressed_area(current_roi: BoundingBox, reference_roi: BoundingBox) -> BoundingBox:
    """Region an RU frame must re-encode so the decoder can overwrite
    every stale pixel: the new ROI plus the ROI still present in the
    reference frame. Equals the bounding-box union of the two.
    """
    return union_box(current_roi, reference_roi)


def align_box(b: BoundingBox, grid: int, frame_w: int, frame_h: int) -> BoundingBox:
    """Expand b outward to the given pixel grid, clipped to the frame.

    grid 1 is the identity (no alignment); even grids keep coordinates
    chroma-safe for 4:2:0 content. The result always contains the
    intersection of b with the frame.
    """
    if grid not in (1, 2, 4, 8, 16):
        raise ValueError(f"unsupported alignment grid {grid}")
    if b.x0 >= frame_w or b.y0 >= frame_h:
        raise EmptyIntersection(f"box {b.as_tuple()} outside {frame_w}x{frame_h} frame")
    x0 = (b.x0 // grid) * grid
    y0 = (b.y0 // grid) * grid
    x1 = -(-b.x1 // grid) * grid
    y1 = -(-b.y1 // grid) * grid
    return BoundingBox(max(x0, 0), max(y0, 0), min(x1, frame_w), min(y1, frame_h))
