"""Synthetic test sequences: a moving object over a configurable
background, with exact per-frame ground-truth boxes.

Backgrounds are sampled from world coordinates so a camera pan shifts
the whole field deterministically. Noise uses splitmix64 hashing of
(x, y, seed), giving bit-identical output on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import SpecInvalid
from .geometry import BoundingBox
from .raster import I420, LUMA_ONLY, Raster, VideoSequence


@dataclass(frozen=True)
class Constant:
    value: int = 0


@dataclass(frozen=True)
class Gradient:
    """Horizontal luma ramp over world x, wrapping every 256 steps."""


@dataclass(frozen=True)
class Noise:
    seed: int = 0


@dataclass(frozen=True)
class SolidFill:
    value: int = 255


@dataclass(frozen=True)
class CheckerFill:
    a: int = 90
    b: int = 170
    cell: int = 2


@dataclass(frozen=True)
class TexturedFill:
    """Dense deterministic ramp; many distinct values keep quantization
    error growing smoothly with step size."""
    base: int = 64
    span: int = 128


@dataclass(frozen=True)
class SynthSpec:
    width: int = 64
    height: int = 64
    frames: int = 16
    background: object = field(default_factory=Constant)
    object_size: tuple[int, int] = (16, 16)
    object_start: tuple[int, int] = (8, 8)
    velocity: tuple[int, int] = (4, 0)
    fill: object = field(default_factory=SolidFill)
    camera_pan: tuple[int, int] = (0, 0)
    layout: str = I420
    frame_rate: Fraction = Fraction(30, 1)
    object_chroma: tuple[int, int] = (160, 96)

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise SpecInvalid(f"frame {self.width}x{self.height} too small")
        if self.layout == I420 and (self.width % 2 or self.height % 2):
            raise SpecInvalid("I420 output needs even frame dimensions")
        if self.frames < 1:
            raise SpecInvalid("need at least one frame")
        ow, oh = self.object_size
        if not (0 < ow <= self.width and 0 < oh <= self.height):
            raise SpecInvalid(f"object {ow}x{oh} does not fit {self.width}x{self.height}")
        if self.layout not in (I420, LUMA_ONLY):
            raise SpecInvalid(f"unknown layout {self.layout!r}")


def _splitmix64(keys: np.ndarray) -> np.ndarray:
    z = (keys + np.uint64(0x9E3779B97F4A7C15)).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _background_luma(spec: SynthSpec, frame_index: int) -> np.ndarray:
    pan_x = spec.camera_pan[0] * frame_index
    pan_y = spec.camera_pan[1] * frame_index
    xs = np.arange(spec.width, dtype=np.int64) + pan_x
    ys = np.arange(spec.height, dtype=np.int64) + pan_y
    bg = spec.background
    if isinstance(bg, Constant):
        return np.full((spec.height, spec.width), bg.value, dtype=np.uint8)
    if isinstance(bg, Gradient):
        denom = max(spec.width - 1, 1)
        row = ((xs * 255) // denom) % 256
        return np.broadcast_to(row.astype(np.uint8), (spec.height, spec.width)).copy()
    if isinstance(bg, Noise):
        gx, gy = np.meshgrid(xs.astype(np.uint64), ys.astype(np.uint64))
        keys = (gy << np.uint64(32)) ^ gx ^ (np.uint64(bg.seed) * np.uint64(0x9E3779B1))
        with np.errstate(over="ignore"):
            return (_splitmix64(keys) & np.uint64(0xFF)).astype(np.uint8)
    raise SpecInvalid(f"unknown background {bg!r}")


def _object_patch(spec: SynthSpec) -> np.ndarray:
    ow, oh = spec.object_size
    fill = spec.fill
    if isinstance(fill, SolidFill):
        return np.full((oh, ow), fill.value, dtype=np.uint8)
    if isinstance(fill, CheckerFill):
        ys, xs = np.mgrid[0:oh, 0:ow]
        even = ((xs // fill.cell) + (ys // fill.cell)) % 2 == 0
        return np.where(even, np.uint8(fill.a), np.uint8(fill.b))
    if isinstance(fill, TexturedFill):
        ys, xs = np.mgrid[0:oh, 0:ow]
        return (fill.base + (xs * 7 + ys * 13) % fill.span).astype(np.uint8)
    raise SpecInvalid(f"unknown fill {fill!r}")


def object_box(spec: SynthSpec, frame_index: int) -> BoundingBox:
    """Exact object bounds at a frame, clipped to stay inside the frame."""
    ow, oh = spec.object_size
    x = spec.object_start[0] + spec.velocity[0] * frame_index
    y = spec.object_start[1] + spec.velocity[1] * frame_index
    x = min(max(x, 0), spec.width - ow)
    y = min(max(y, 0), spec.height - oh)
    return BoundingBox(x, y, x + ow, y + oh)


def generate(spec: SynthSpec) -> tuple[VideoSequence, list[BoundingBox]]:
    """Render the sequence and its ground-truth ROI boxes."""
    patch = _object_patch(spec)
    frames = []
    boxes = []
    for i in range(spec.frames):
        luma = _background_luma(spec, i)
        box = object_box(spec, i)
        luma[box.y0:box.y1, box.x0:box.x1] = patch
        planes = [luma]
        if spec.layout == I420:
            cw, ch = spec.width // 2, spec.height // 2
            u = np.full((ch, cw), 128, dtype=np.uint8)
            v = np.full((ch, cw), 128, dtype=np.uint8)
            u[box.y0 // 2:-(-box.y1 // 2), box.x0 // 2:-(-box.x1 // 2)] = spec.object_chroma[0]
            v[box.y0 // 2:-(-box.y1 // 2), box.x0 // 2:-(-box.x1 // 2)] = spec.object_chroma[1]
            planes += [u, v]
        frames.append(Raster(spec.width, spec.height, planes))
        boxes.append(box)
    seq = VideoSequence(spec.width, spec.height, spec.frame_rate, frames, spec.layout)
    return seq, boxes


PRESETS = {
    # flat object on a flat background: luma-lossless at every qp, the
    # canonical fixture for exactness tests
    "moving-box": SynthSpec(),
    # textured object on a ramp background: quality responds to qp,
    # suits RD and GOF sweeps
    "textured": SynthSpec(width=128, height=128, frames=16,
                          background=Gradient(), object_size=(8, 8),
                          object_start=(16, 60), velocity=(2, 0),
                          fill=TexturedFill()),
    # moving camera: the background itself changes every frame
    "panning": SynthSpec(width=96, height=96, frames=12,
                         background=Noise(seed=7), object_size=(16, 16),
                         object_start=(40, 40), velocity=(0, 0),
                         fill=SolidFill(255), camera_pan=(2, 0)),
    # meeting-style framing: a large textured subject, slow drift; long
    # paste seams make it the enhancer-training workhorse
    "portrait": SynthSpec(width=96, height=96, frames=24,
                          background=Gradient(), object_size=(32, 32),
                          object_start=(28, 30), velocity=(1, 0),
                          fill=TexturedFill()),
}


def preset(name: str, frames: int | None = None) -> SynthSpec:
    if name not in PRESETS:
        raise SpecInvalid(f"unknown preset {name!r}; have {sorted(PRESETS)}")
    spec = PRESETS[name]
    if frames is not None:
        spec = replace(spec, frames=frames)
    return spec
