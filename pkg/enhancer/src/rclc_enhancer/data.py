"""Training data for the two enhancement tasks.

ENHANCEMENT pairs are (codec-degraded patch, clean patch). SMOOTHING
pairs blend the clean ROI into the degraded background first, so the
input carries the exact seam the decoder produces, and the target is
fully clean. Clean sources and their degraded versions come from the
rclc command line tool (synth, then encode/decode at a given qp); this
module only reads its public file formats (Y4M, ROI sidecars).

Run as a command:
    python -m rclc_enhancer.data --out pairs.npz --phase smoothing --qps 42 47
"""

from __future__ import annotations

import argparse
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import EmptySource

SMOOTHING = "smoothing"
ENHANCEMENT = "enhancement"

DEFAULT_CROP = 32
DEFAULT_QPS = (37, 42, 47)


def read_y4m_luma(data: bytes) -> list[np.ndarray]:
    """Luma planes of a 4:2:0 Y4M stream (chroma skipped)."""
    nl = data.index(b"\n")
    tokens = data[:nl].split(b" ")
    assert tokens[0] == b"YUV4MPEG2", "not a Y4M stream"
    width = height = None
    for tok in tokens[1:]:
        if tok[:1] == b"W":
            width = int(tok[1:])
        elif tok[:1] == b"H":
            height = int(tok[1:])
    frame_size = width * height + 2 * (width // 2) * (height // 2)
    planes = []
    pos = nl + 1
    while pos < len(data):
        pos = data.index(b"\n", pos) + 1  # FRAME marker line
        luma = np.frombuffer(data, np.uint8, width * height, pos)
        planes.append(luma.reshape(height, width).copy())
        pos += frame_size
    return planes


def read_sidecar_boxes(text: str) -> dict[int, tuple[int, int, int, int]]:
    """First box per frame index from an ROI sidecar file."""
    boxes: dict[int, tuple[int, int, int, int]] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        index = int(fields[0])
        boxes.setdefault(index, tuple(int(v) for v in fields[1:5]))
    return boxes


def blend_roi(clean: np.ndarray, degraded: np.ndarray,
              box: tuple[int, int, int, int]) -> np.ndarray:
    """Clean ROI pasted onto the degraded background: the decoder-side
    smoothing input, seam included."""
    x0, y0, x1, y1 = box
    out = degraded.copy()
    out[y0:y1, x0:x1] = clean[y0:y1, x0:x1]
    return out


def tile_positions(extent: int, crop: int, stride: int) -> list[int]:
    if extent < crop:
        return []
    last = extent - crop
    positions = list(range(0, last + 1, stride))
    if positions[-1] != last:
        positions.append(last)
    return positions


def centered_origins(box: tuple[int, int, int, int], crop: int,
                     width: int, height: int) -> list[tuple[int, int]]:
    """ROI-centered crop origin plus four jittered neighbors (deduped)."""
    x0, y0, x1, y1 = box
    cx = (x0 + x1) // 2 - crop // 2
    cy = (y0 + y1) // 2 - crop // 2
    jitter = max(crop // 4, 1)
    origins = []
    for dx, dy in ((0, 0), (jitter, 0), (-jitter, 0), (0, jitter), (0, -jitter)):
        origin = (min(max(cx + dx, 0), width - crop),
                  min(max(cy + dy, 0), height - crop))
        if origin not in origins:
            origins.append(origin)
    return origins


def build_pairs(clean_frames: list[np.ndarray], degraded_frames: list[np.ndarray],
                boxes: dict[int, tuple[int, int, int, int]], phase: str,
                crop: int = DEFAULT_CROP, stride: int | None = None):
    """Tile frames into (input, target, box) patch triples.

    ENHANCEMENT tiles the whole frame; SMOOTHING takes one ROI-centered
    crop per frame so the paste seam sits inside every patch. Returned
    boxes are patch-relative paste rectangles (the full patch for
    enhancement pairs).
    """
    if phase not in (SMOOTHING, ENHANCEMENT):
        raise ValueError(f"unknown phase {phase!r}")
    stride = stride or crop
    inputs, targets, rel_boxes = [], [], []
    for index, (clean, degraded) in enumerate(zip(clean_frames, degraded_frames)):
        height, width = clean.shape
        if phase == ENHANCEMENT:
            for oy in tile_positions(height, crop, stride):
                for ox in tile_positions(width, crop, stride):
                    inputs.append(degraded[oy:oy + crop, ox:ox + crop])
                    targets.append(clean[oy:oy + crop, ox:ox + crop])
                    rel_boxes.append((0, 0, crop, crop))
        else:
            box = boxes.get(index)
            if box is None:
                continue
            blended = blend_roi(clean, degraded, box)
            for ox, oy in centered_origins(box, crop, width, height):
                inputs.append(blended[oy:oy + crop, ox:ox + crop])
                targets.append(clean[oy:oy + crop, ox:ox + crop])
                rel_boxes.append((max(box[0] - ox, 0), max(box[1] - oy, 0),
                                  min(box[2] - ox, crop), min(box[3] - oy, crop)))
    if not inputs:
        raise EmptySource(f"no {phase} pairs could be built")
    return (np.stack(inputs), np.stack(targets),
            np.array(rel_boxes, dtype=np.int64))


def seam_band_mask(box: tuple[int, int, int, int], shape: tuple[int, int],
                   band: int = 2) -> np.ndarray:
    """Ring of +-band pixels straddling the paste rectangle's border."""
    h, w = shape
    x0, y0, x1, y1 = box
    mask = np.zeros(shape, dtype=bool)
    for edge, horizontal in ((y0, True), (y1, True), (x0, False), (x1, False)):
        lo, hi = max(edge - band, 0), min(edge + band, h if horizontal else w)
        if horizontal:
            mask[lo:hi, max(x0 - band, 0):min(x1 + band, w)] = True
        else:
            mask[max(y0 - band, 0):min(y1 + band, h), lo:hi] = True
    return mask


def run_rclc(args: list[str], rclc_cmd: str = "rclc") -> None:
    proc = subprocess.run([rclc_cmd, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise EmptySource(f"rclc {' '.join(args)} failed: {proc.stderr.strip()}")


def degrade_via_rclc(clean_y4m: Path, roi: Path, qp: int, workdir: Path,
                     rclc_cmd: str = "rclc") -> Path:
    """Whole-frame compression at one qp through the rclc CLI."""
    stream = workdir / f"q{qp}.rclc"
    out = workdir / f"q{qp}.y4m"
    run_rclc(["encode", "--input", str(clean_y4m), "--gof", "1",
              "--qp-roi", "4", "--qp-bg", str(qp),
              "--detector", f"sidecar:{roi}", "--codec", "mock",
              "--out", str(stream)], rclc_cmd)
    run_rclc(["decode", "--input", str(stream), "--codec", "mock",
              "--enhancer", "none", "--out", str(out)], rclc_cmd)
    return out


def build_dataset(out_path: Path, phase: str, qps=DEFAULT_QPS,
                  preset: str = "textured", crop: int = DEFAULT_CROP,
                  stride: int | None = None, rclc_cmd: str = "rclc",
                  workdir: Path | None = None) -> dict:
    """Synthesize, degrade and tile; write a self-describing .npz."""
    with tempfile.TemporaryDirectory(prefix="rclc-enh-") as tmp:
        work = workdir or Path(tmp)
        work.mkdir(parents=True, exist_ok=True)
        clean_y4m = work / "clean.y4m"
        roi = work / "clean.roi"
        run_rclc(["synth", "--preset", preset, "--out", str(clean_y4m),
                  "--roi", str(roi)], rclc_cmd)
        clean = read_y4m_luma(clean_y4m.read_bytes())
        boxes = read_sidecar_boxes(roi.read_text())
        all_inputs, all_targets, all_boxes, all_qps = [], [], [], []
        for qp in qps:
            degraded_path = degrade_via_rclc(clean_y4m, roi, qp, work, rclc_cmd)
            degraded = read_y4m_luma(degraded_path.read_bytes())
            inputs, targets, rel_boxes = build_pairs(clean, degraded, boxes,
                                                     phase, crop, stride)
            all_inputs.append(inputs)
            all_targets.append(targets)
            all_boxes.append(rel_boxes)
            all_qps.append(np.full(len(inputs), qp, dtype=np.int64))
    blob = {"inputs": np.concatenate(all_inputs),
            "targets": np.concatenate(all_targets),
            "boxes": np.concatenate(all_boxes),
            "qps": np.concatenate(all_qps),
            "phase": np.array(phase),
            "crop": np.array(crop)}
    np.savez_compressed(out_path, **blob)
    return blob


def load_dataset(path: Path) -> dict:
    with np.load(path) as blob:
        return {key: blob[key] for key in blob.files}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="build enhancer training pairs")
    parser.add_argument("--out", required=True)
    parser.add_argument("--phase", choices=[SMOOTHING, ENHANCEMENT], required=True)
    parser.add_argument("--qps", type=int, nargs="+", default=list(DEFAULT_QPS))
    parser.add_argument("--preset", default="textured")
    parser.add_argument("--crop", type=int, default=DEFAULT_CROP)
    parser.add_argument("--stride", type=int)
    parser.add_argument("--rclc-cmd", default="rclc")
    args = parser.parse_args(argv)
    blob = build_dataset(Path(args.out), args.phase, tuple(args.qps),
                         args.preset, args.crop, args.stride, args.rclc_cmd)
    print(f"wrote {len(blob['inputs'])} {args.phase} pairs to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
