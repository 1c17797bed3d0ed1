"""Frame role assignment: background-updating vs ROI-updating frames.

A group of frames (GOF) starts with one BU frame that refreshes the
decoder's background; every other frame is an RU that re-encodes only
its (enlarged) ROI. gof_size == ONE_BU sends the background exactly
once, at frame 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CalledOnBu

# gof_size sentinel: a single background update for the whole sequence.
ONE_BU = 0

BU_BLENDING = "bu"
RU_BLENDING = "ru"

BU = "BU"
RU = "RU"


@dataclass(frozen=True)
class GofConfig:
    """Encoder control surface: GOF period, blending mode and QP pair."""

    gof_size: int = 2
    blend_mode: str = BU_BLENDING
    qp_roi: int = 27
    qp_bg: int = 37
    # Scene-change style overrides: frame indices forced to BU mid-stream.
    force_bu: tuple[int, ...] = ()
    # Codec block grid for compressed boxes; 1 disables alignment and is
    # only valid for luma-only content.
    align_grid: int = 16

    def __post_init__(self):
        if self.gof_size < 0:
            raise ValueError(f"gof_size must be >= 1 or ONE_BU (0), got {self.gof_size}")
        if self.blend_mode not in (BU_BLENDING, RU_BLENDING):
            raise ValueError(f"unknown blend mode {self.blend_mode!r}")
        for qp in (self.qp_roi, self.qp_bg):
            if not 0 <= qp <= 51:
                raise ValueError(f"qp {qp} outside 0..51")
        if self.qp_roi > self.qp_bg:
            raise ValueError(
                f"qp_roi ({self.qp_roi}) must not exceed qp_bg ({self.qp_bg}); "
                "the ROI is the high-quality region")
        if self.align_grid not in (1, 2, 4, 8, 16):
            raise ValueError(f"align_grid must be one of 1,2,4,8,16, got {self.align_grid}")


@dataclass(frozen=True)
class FrameRole:
    kind: str
    reference_index: int | None = None


def classify_frame(index: int, cfg: GofConfig) -> str:
    """BU at every GOF start (index 0 only under ONE_BU), RU otherwise."""
    if index < 0:
        raise ValueError(f"negative frame index {index}")
    if index in cfg.force_bu:
        return BU
    if cfg.gof_size == ONE_BU:
        return BU if index == 0 else RU
    return BU if index % cfg.gof_size == 0 else RU


def reference_for(index: int, cfg: GofConfig) -> int:
    """Frame the decoder blends this RU against.

    BU blending points at the most recent BU; RU blending points at the
    immediately previous (reconstructed) frame.
    """
    if classify_frame(index, cfg) == BU:
        raise CalledOnBu(f"frame {index} is a BU and has no reference")
    if cfg.blend_mode == RU_BLENDING:
        return index - 1
    return max(i for i in range(index) if classify_frame(i, cfg) == BU)


def role_for(index: int, cfg: GofConfig) -> FrameRole:
    kind = classify_frame(index, cfg)
    if kind == BU:
        return FrameRole(BU)
    return FrameRole(RU, reference_for(index, cfg))
