"""Planar 8-bit images, Y4M / raw-I420 sequence I/O, and region crop/paste.

A Raster is one luma plane plus, for I420 content, two quarter-resolution
chroma planes. All pixel operations in the package act on Rasters; they
are value types and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionMismatch,
    MalformedHeader,
    OddCoordinateWithChroma,
    OutOfBounds,
    TruncatedFrame,
    UnsupportedColorSpace,
)
from .geometry import BoundingBox

LUMA_ONLY = "luma"
I420 = "i420"

_Y4M_SIGNATURE = b"YUV4MPEG2"
_FRAME_MARKER = b"FRAME"


def _chroma_dims(width: int, height: int) -> tuple[int, int]:
    return (-(-width // 2), -(-height // 2))


@dataclass
class Raster:
    """One video frame: list of uint8 planes (1 = luma only, 3 = I420)."""

    width: int
    height: int
    planes: list[np.ndarray]
    bit_depth: int = 8

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise DimensionMismatch(f"frame {self.width}x{self.height} too small")
        if len(self.planes) not in (1, 3):
            raise DimensionMismatch(f"expected 1 or 3 planes, got {len(self.planes)}")
        if len(self.planes) == 3 and (self.width % 2 or self.height % 2):
            raise OddCoordinateWithChroma(
                f"I420 frame dimensions must be even, got {self.width}x{self.height}")
        cw, ch = _chroma_dims(self.width, self.height)
        expect = [(self.height, self.width)] + [(ch, cw)] * (len(self.planes) - 1)
        for i, (plane, shape) in enumerate(zip(self.planes, expect)):
            if plane.shape != shape:
                raise DimensionMismatch(f"plane {i} shape {plane.shape}, expected {shape}")
            if plane.dtype != np.uint8:
                raise DimensionMismatch(f"plane {i} dtype {plane.dtype}, expected uint8")

    @property
    def layout(self) -> str:
        return I420 if len(self.planes) == 3 else LUMA_ONLY

    @property
    def luma(self) -> np.ndarray:
        return self.planes[0]

    def copy(self) -> "Raster":
        return Raster(self.width, self.height, [p.copy() for p in self.planes])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and len(self.planes) == len(other.planes)
                and all(np.array_equal(a, b) for a, b in zip(self.planes, other.planes)))

    @classmethod
    def blank(cls, width: int, height: int, layout: str = LUMA_ONLY,
              luma: int = 0, chroma: int = 128) -> "Raster":
        planes = [np.full((height, width), luma, dtype=np.uint8)]
        if layout == I420:
            cw, ch = _chroma_dims(width, height)
            planes += [np.full((ch, cw), chroma, dtype=np.uint8) for _ in range(2)]
        return cls(width, height, planes)


@dataclass
class VideoSequence:
    """Ordered frames sharing one geometry and plane layout."""

    width: int
    height: int
    frame_rate: Fraction
    frames: list[Raster]
    color_layout: str = I420
    # Y4M header tokens carried beyond W/H/F, preserved for byte-exact
    # re-serialization of parsed streams.
    y4m_extras: tuple[str, ...] = ("C420",)

    def __post_init__(self):
        if not self.frames:
            raise DimensionMismatch("sequence must contain at least one frame")
        for i, f in enumerate(self.frames):
            if (f.width, f.height, f.layout) != (self.width, self.height, self.color_layout):
                raise DimensionMismatch(
                    f"frame {i} is {f.width}x{f.height}/{f.layout}, sequence is "
                    f"{self.width}x{self.height}/{self.color_layout}")

    def __len__(self) -> int:
        return len(self.frames)


def _frame_bytes(width: int, height: int, layout: str) -> int:
    if layout == LUMA_ONLY:
        return width * height
    cw, ch = _chroma_dims(width, height)
    return width * height + 2 * cw * ch


def parse_y4m(data: bytes) -> VideoSequence:
    """Decode a Y4M byte stream (4:2:0 only).

    A conforming stream (signature line with W/H/F tokens, bare FRAME
    delimiters, full payloads) re-serializes byte-identically through
    write_y4m.
    """
    nl = data.find(b"\n")
    if nl < 0:
        raise MalformedHeader("no header line terminator")
    tokens = data[:nl].split(b" ")
    if tokens[0] != _Y4M_SIGNATURE:
        raise MalformedHeader(f"bad signature {tokens[0]!r}")
    width = height = None
    rate = None
    extras: list[str] = []
    for tok in tokens[1:]:
        if not tok:
            raise MalformedHeader("empty header token")
        key, rest = tok[:1], tok[1:]
        try:
            if key == b"W":
                width = int(rest)
            elif key == b"H":
                height = int(rest)
            elif key == b"F":
                num, den = rest.split(b":")
                rate = Fraction(int(num), int(den))
            elif key == b"C":
                if not rest.startswith(b"420"):
                    raise UnsupportedColorSpace(f"colorspace {tok.decode()!r} is not 4:2:0")
                extras.append(tok.decode("ascii"))
            else:
                extras.append(tok.decode("ascii"))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedHeader(f"bad header token {tok!r}") from exc
    if width is None or height is None or rate is None:
        raise MalformedHeader("header must carry W, H and F tokens")
    if width < 2 or height < 2 or width % 2 or height % 2:
        raise MalformedHeader(f"unsupported 4:2:0 dimensions {width}x{height}")

    size = _frame_bytes(width, height, I420)
    cw, ch = _chroma_dims(width, height)
    frames = []
    pos = nl + 1
    while pos < len(data):
        marker_end = data.find(b"\n", pos)
        if marker_end < 0 or not data[pos:marker_end].startswith(_FRAME_MARKER):
            raise TruncatedFrame(f"expected FRAME marker at byte {pos}")
        pos = marker_end + 1
        payload = data[pos:pos + size]
        if len(payload) < size:
            raise TruncatedFrame(
                f"frame {len(frames)}: got {len(payload)} payload bytes, need {size}")
        buf = np.frombuffer(payload, dtype=np.uint8)
        y = buf[:width * height].reshape(height, width).copy()
        u = buf[width * height:width * height + cw * ch].reshape(ch, cw).copy()
        v = buf[width * height + cw * ch:].reshape(ch, cw).copy()
        frames.append(Raster(width, height, [y, u, v]))
        pos += size
    if not frames:
        raise TruncatedFrame("stream carries no frames")
    return VideoSequence(width, height, rate, frames, I420, tuple(extras))


def write_y4m(seq: VideoSequence) -> bytes:
    """Serialize a sequence as Y4M. I420 layouts only."""
    if seq.color_layout != I420:
        raise UnsupportedColorSpace("Y4M output requires I420 sequences")
    header = f"YUV4MPEG2 W{seq.width} H{seq.height} " \
             f"F{seq.frame_rate.numerator}:{seq.frame_rate.denominator}"
    for tok in seq.y4m_extras:
        header += " " + tok
    out = [header.encode("ascii") + b"\n"]
    for frame in seq.frames:
        out.append(_FRAME_MARKER + b"\n")
        for plane in frame.planes:
            out.append(plane.tobytes())
    return b"".join(out)


def parse_raw_i420(data: bytes, width: int, height: int,
                   frame_rate: Fraction = Fraction(30, 1)) -> VideoSequence:
    """Decode tightly packed header-less I420 planes (fallback format)."""
    if width < 2 or height < 2 or width % 2 or height % 2:
        raise MalformedHeader(f"unsupported 4:2:0 dimensions {width}x{height}")
    size = _frame_bytes(width, height, I420)
    if not data or len(data) % size:
        raise TruncatedFrame(f"{len(data)} bytes is not a multiple of frame size {size}")
    cw, ch = _chroma_dims(width, height)
    frames = []
    for off in range(0, len(data), size):
        buf = np.frombuffer(data[off:off + size], dtype=np.uint8)
        y = buf[:width * height].reshape(height, width).copy()
        u = buf[width * height:width * height + cw * ch].reshape(ch, cw).copy()
        v = buf[width * height + cw * ch:].reshape(ch, cw).copy()
        frames.append(Raster(width, height, [y, u, v]))
    return VideoSequence(width, height, frame_rate, frames, I420)


def write_raw_i420(seq: VideoSequence) -> bytes:
    if seq.color_layout != I420:
        raise UnsupportedColorSpace("raw I420 output requires I420 sequences")
    return b"".join(p.tobytes() for f in seq.frames for p in f.planes)


def _check_box(frame: Raster, box: BoundingBox) -> None:
    if box.x1 > frame.width or box.y1 > frame.height:
        raise OutOfBounds(f"box {box.as_tuple()} exceeds {frame.width}x{frame.height} frame")
    if frame.layout == I420 and any(c % 2 for c in box.as_tuple()):
        raise OddCoordinateWithChroma(f"box {box.as_tuple()} has odd coordinates on I420")


def crop(frame: Raster, box: BoundingBox) -> Raster:
    """Extract the box region as a new Raster; chroma cropped at halved coords."""
    _check_box(frame, box)
    planes = [frame.planes[0][box.y0:box.y1, box.x0:box.x1].copy()]
    for p in frame.planes[1:]:
        planes.append(p[box.y0 // 2:box.y1 // 2, box.x0 // 2:box.x1 // 2].copy())
    return Raster(box.width, box.height, planes)


def paste(frame: Raster, patch: Raster, box: BoundingBox) -> Raster:
    """Return a copy of frame with the box region replaced by patch."""
    _check_box(frame, box)
    if (patch.width, patch.height) != (box.width, box.height):
        raise DimensionMismatch(
            f"patch {patch.width}x{patch.height} does not fill box "
            f"{box.width}x{box.height}")
    if patch.layout != frame.layout:
        raise DimensionMismatch(f"patch layout {patch.layout} != frame layout {frame.layout}")
    out = frame.copy()
    out.planes[0][box.y0:box.y1, box.x0:box.x1] = patch.planes[0]
    for dst, src in zip(out.planes[1:], patch.planes[1:]):
        dst[box.y0 // 2:box.y1 // 2, box.x0 // 2:box.x1 // 2] = src
    return out
