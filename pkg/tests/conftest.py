"""Shared fixtures and independent oracles used across the suite.

The oracles deliberately re-derive results by brute force (flood fill,
per-pixel loops, rasterized set operations) so they stay independent of
the library code paths they check.
"""

from __future__ import annotations

import sys
from collections import deque

import numpy as np
import pytest

from rclc.geometry import BoundingBox

IDENTITY_ENHANCER_CMD = f"{sys.executable} -m rclc.identity_enhancer"


def flood_fill_boxes(mask: np.ndarray, min_area: int = 1) -> list[tuple[int, int, int, int]]:
    """4-connected component boxes of a boolean mask, BFS implementation."""
    h, w = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    boxes = []
    for sy in range(h):
        for sx in range(w):
            if not mask[sy, sx] or seen[sy, sx]:
                continue
            queue = deque([(sy, sx)])
            seen[sy, sx] = True
            x0, y0, x1, y1 = sx, sy, sx + 1, sy + 1
            area = 0
            while queue:
                y, x = queue.popleft()
                area += 1
                x0, y0 = min(x0, x), min(y0, y)
                x1, y1 = max(x1, x + 1), max(y1, y + 1)
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        queue.append((ny, nx))
            if area >= min_area:
                boxes.append((x0, y0, x1, y1))
    return sorted(boxes)


def naive_quantize(plane: np.ndarray, step: int) -> np.ndarray:
    """Per-pixel reference quantizer (python round, ties to even)."""
    out = np.empty_like(plane)
    for y in range(plane.shape[0]):
        for x in range(plane.shape[1]):
            q = round(int(plane[y, x]) / step) * step
            out[y, x] = min(255, max(0, q))
    return out


def rasterized_union(a: BoundingBox, b: BoundingBox) -> tuple[int, int, int, int]:
    """Bounding box of the painted union of two boxes."""
    w = max(a.x1, b.x1) + 2
    h = max(a.y1, b.y1) + 2
    grid = np.zeros((h, w), dtype=bool)
    for box in (a, b):
        grid[box.y0:box.y1, box.x0:box.x1] = True
    ys, xs = np.nonzero(grid)
    return (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0FFEE)


def random_box(rng: np.random.Generator, frame_w: int, frame_h: int,
               even: bool = False) -> BoundingBox:
    """Random box inside the frame, at least 2 pixels on each side."""
    unit = 2 if even else 1
    x0 = int(rng.integers(0, frame_w - 2) // unit * unit)
    y0 = int(rng.integers(0, frame_h - 2) // unit * unit)
    x1 = int(rng.integers(x0 + 2, frame_w + 1) // unit * unit)
    y1 = int(rng.integers(y0 + 2, frame_h + 1) // unit * unit)
    return BoundingBox(x0, y0, max(x1, x0 + 2), max(y1, y0 + 2))
