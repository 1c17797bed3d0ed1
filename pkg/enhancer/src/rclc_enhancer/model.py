"""Recursive residual enhancer.

One input stage, one residual block applied R times with shared weights,
one output stage predicting a residual added to the input luma. The
parameter count is independent of R. The output stage is
zero-initialized, so a fresh model is an exact identity mapping (the
residual is exactly 0.0) while remaining trainable.

Both tasks, seam smoothing (task 1) and BU-ROI enhancement (task 0),
run through the same weights; the task enters as an extra constant
input channel. A third channel marks the pasted region (the position
information the decoder received with the stream and forwards in the
protocol's box field), which pins the seam location for the smoother.
"""

from __future__ import annotations

import torch
from torch import nn

DEFAULT_CHANNELS = 16
DEFAULT_RECURSIONS = 3

TASK_BU_ENHANCE = 0
TASK_RU_SEAM = 1


class ResidualBlock(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.conv1 = nn.Conv2d(channels, channels, 3, padding=1)
        self.conv2 = nn.Conv2d(channels, channels, 3, padding=1)
        self.act = nn.ReLU(inplace=True)

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        return self.conv2(self.act(self.conv1(h)))


class EnhancerModel(nn.Module):
    def __init__(self, channels: int = DEFAULT_CHANNELS,
                 recursions: int = DEFAULT_RECURSIONS):
        super().__init__()
        if recursions < 1:
            raise ValueError(f"recursions must be >= 1, got {recursions}")
        self.channels = channels
        self.recursions = recursions
        self.input_stage = nn.Conv2d(3, channels, 3, padding=1)
        self.block = ResidualBlock(channels)
        self.output_stage = nn.Conv2d(channels, 1, 3, padding=1)
        self.act = nn.ReLU(inplace=True)
        # identity at init: zero residual regardless of earlier stages
        nn.init.zeros_(self.output_stage.weight)
        nn.init.zeros_(self.output_stage.bias)

    def forward(self, luma: torch.Tensor, task: int,
                box_mask: torch.Tensor | None = None) -> torch.Tensor:
        """luma: (B, 1, H, W) in [0, 1]; box_mask 1.0 inside the pasted
        region (all ones when absent). Returns the enhanced luma."""
        task_plane = torch.full_like(luma, float(task))
        if box_mask is None:
            box_mask = torch.ones_like(luma)
        h0 = self.act(self.input_stage(
            torch.cat([luma, task_plane, box_mask], dim=1)))
        h = h0
        for _ in range(self.recursions):
            h = self.act(self.block(h) + h0)
        return luma + self.output_stage(h)

    def frozen_parameter_names(self) -> list[str]:
        """Stages held fixed during the enhancement fine-tuning phase."""
        return [name for name, _ in self.named_parameters()
                if name.startswith(("input_stage.", "block."))]


def box_mask_tensor(box, shape) -> torch.Tensor:
    """(1, 1, H, W) float mask, 1.0 inside the patch-relative box."""
    mask = torch.zeros((1, 1) + tuple(shape))
    x0, y0, x1, y1 = box
    mask[..., y0:y1, x0:x1] = 1.0
    return mask


def enhance_plane(model: EnhancerModel, plane, task: int, box=None):
    """uint8 (H, W) -> uint8 (H, W) through the model, deterministically."""
    import numpy as np

    with torch.no_grad():
        x = torch.from_numpy(plane.astype("float32") / 255.0)[None, None]
        mask = box_mask_tensor(box, plane.shape) if box is not None else None
        y = model(x, task, mask)[0, 0].clamp(0.0, 1.0) * 255.0
        return torch.round(y).to(torch.uint8).numpy()


def save_weights(model: EnhancerModel, path, phase: str) -> None:
    torch.save({"state_dict": model.state_dict(),
                "channels": model.channels,
                "recursions": model.recursions,
                "phase": phase}, path)


def load_weights(path) -> tuple[EnhancerModel, str]:
    blob = torch.load(path, map_location="cpu", weights_only=True)
    model = EnhancerModel(blob["channels"], blob["recursions"])
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model, blob["phase"]
