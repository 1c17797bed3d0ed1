"""Region codec backends.

The mock backend quantizes samples in the pixel domain with an
HEVC-shaped step schedule (step doubles every 6 qp) and stores the
quantized planes run-length coded, so rate and distortion both respond
monotonically to qp on smooth content and qp <= 4 is exactly lossless.
The external backend shells out to any encoder/decoder pair described
by command templates.
"""

from __future__ import annotations

import string
import struct
import subprocess
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import BadTemplate, CommandFailed, CorruptPayload, OutputMissing
from .raster import I420, LUMA_ONLY, Raster, VideoSequence, parse_raw_i420, parse_y4m, write_y4m

LOSSLESS_QP_THRESHOLD = 4

_LAYOUT_TAGS = {LUMA_ONLY: 0, I420: 1}
_LAYOUT_NAMES = {v: k for k, v in _LAYOUT_TAGS.items()}


@dataclass(frozen=True)
class EncodedRegion:
    payload: bytes
    qp: int
    width: int
    height: int
    layout: str


def quant_step(qp: int) -> int:
    """Quantizer step size: 1 through qp 4, then doubling every 6 qp."""
    if not 0 <= qp <= 51:
        raise ValueError(f"qp {qp} outside 0..51")
    if qp <= LOSSLESS_QP_THRESHOLD:
        return 1
    return round(2.0 ** ((qp - 4) / 6.0))


def _quantize(plane: np.ndarray, step: int) -> np.ndarray:
    if step == 1:
        return plane.copy()
    q = np.rint(plane.astype(np.float64) / step) * step
    return np.clip(q, 0, 255).astype(np.uint8)


def _rle_encode(plane: np.ndarray) -> bytes:
    """(u16 length, u8 value) runs over the raveled plane, 65535 cap."""
    flat = plane.ravel()
    boundaries = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [flat.size]))
    lengths = ends - starts
    values = flat[starts]
    # split runs longer than the u16 field
    if lengths.max(initial=0) > 0xFFFF:
        full, rem = np.divmod(lengths, 0xFFFF)
        out_len: list[int] = []
        out_val: list[int] = []
        for v, f, r in zip(values, full, rem):
            out_len.extend([0xFFFF] * int(f))
            out_val.extend([int(v)] * int(f))
            if r:
                out_len.append(int(r))
                out_val.append(int(v))
        lengths = np.array(out_len, dtype=np.uint32)
        values = np.array(out_val, dtype=np.uint8)
    runs = np.empty((len(lengths), 3), dtype=np.uint8)
    runs[:, :2] = lengths.astype("<u2")[:, None].view(np.uint8).reshape(-1, 2)
    runs[:, 2] = values
    return struct.pack("<I", len(lengths)) + runs.tobytes()


def _rle_decode(data: bytes, offset: int, shape: tuple[int, int]) -> tuple[np.ndarray, int]:
    if offset + 4 > len(data):
        raise CorruptPayload("payload ends before run count")
    (count,) = struct.unpack_from("<I", data, offset)
    offset += 4
    if offset + 3 * count > len(data):
        raise CorruptPayload("payload ends inside run table")
    runs = np.frombuffer(data, dtype=np.uint8, count=3 * count, offset=offset).reshape(-1, 3)
    offset += 3 * count
    lengths = runs[:, :2].copy().view("<u2").ravel().astype(np.int64)
    values = runs[:, 2]
    total = int(lengths.sum())
    if total != shape[0] * shape[1]:
        raise CorruptPayload(
            f"runs cover {total} samples, plane has {shape[0] * shape[1]}")
    plane = np.repeat(values, lengths).reshape(shape)
    return plane, offset


class MockCodec:
    """Deterministic pixel-domain quantizer with run-length payloads."""

    name = "mock"
    lossless_qp_threshold = LOSSLESS_QP_THRESHOLD

    def encode(self, patch: Raster, qp: int) -> EncodedRegion:
        step = quant_step(qp)
        payload = b"".join(_rle_encode(_quantize(p, step)) for p in patch.planes)
        return EncodedRegion(payload, qp, patch.width, patch.height, patch.layout)

    def decode(self, region: EncodedRegion) -> Raster:
        cw, ch = -(-region.width // 2), -(-region.height // 2)
        shapes = [(region.height, region.width)]
        if region.layout == I420:
            shapes += [(ch, cw)] * 2
        planes = []
        offset = 0
        for shape in shapes:
            plane, offset = _rle_decode(region.payload, offset, shape)
            planes.append(plane)
        if offset != len(region.payload):
            raise CorruptPayload(f"{len(region.payload) - offset} trailing payload bytes")
        return Raster(region.width, region.height, planes)


def _template_fields(template: str) -> set[str]:
    return {name for _, name, _, _ in string.Formatter().parse(template) if name}


def _check_template(template: str, required: set[str], allowed: set[str], label: str) -> None:
    fields = _template_fields(template)
    missing = required - fields
    if missing:
        raise BadTemplate(f"{label} template lacks placeholders {sorted(missing)}")
    unknown = fields - allowed
    if unknown:
        raise BadTemplate(f"{label} template has unknown placeholders {sorted(unknown)}")


class ExternCodec:
    """Adapter around an external encoder/decoder command pair.

    Templates receive {input}, {output}, {qp}, {w}, {h}. Patch handoff
    uses single-frame Y4M files or raw I420 per io_format.
    """

    name = "extern"
    lossless_qp_threshold = -1  # no lossless guarantee from arbitrary encoders

    def __init__(self, encode_template: str, decode_template: str,
                 io_format: str = "y4m"):
        if io_format not in ("y4m", "raw"):
            raise BadTemplate(f"io_format must be y4m or raw, got {io_format!r}")
        allowed = {"input", "output", "qp", "w", "h"}
        need_dims = {"w", "h"} if io_format == "raw" else set()
        _check_template(encode_template, {"input", "output", "qp"} | need_dims,
                        allowed, "encode")
        _check_template(decode_template, {"input", "output"} | need_dims,
                        allowed, "decode")
        self.encode_template = encode_template
        self.decode_template = decode_template
        self.io_format = io_format

    def _run(self, template: str, mapping: dict[str, object]) -> None:
        cmd = template.format(**mapping)
        proc = subprocess.run(cmd, shell=True, capture_output=True, text=True)
        if proc.returncode != 0:
            raise CommandFailed(
                f"command {cmd!r} exited {proc.returncode}: {proc.stderr.strip()}")

    def encode(self, patch: Raster, qp: int) -> EncodedRegion:
        if patch.layout != I420:
            raise BadTemplate("external codecs exchange I420 frames only")
        with tempfile.TemporaryDirectory(prefix="rclc-enc-") as tmp:
            src = Path(tmp) / ("in.y4m" if self.io_format == "y4m" else "in.yuv")
            dst = Path(tmp) / "out.bin"
            seq = VideoSequence(patch.width, patch.height, Fraction(30, 1),
                                [patch], patch.layout)
            if self.io_format == "y4m":
                src.write_bytes(write_y4m(seq))
            else:
                src.write_bytes(b"".join(p.tobytes() for p in patch.planes))
            self._run(self.encode_template,
                      {"input": src, "output": dst, "qp": qp,
                       "w": patch.width, "h": patch.height})
            if not dst.exists():
                raise OutputMissing(f"encoder produced no output at {dst}")
            return EncodedRegion(dst.read_bytes(), qp, patch.width, patch.height,
                                 patch.layout)

    def decode(self, region: EncodedRegion) -> Raster:
        with tempfile.TemporaryDirectory(prefix="rclc-dec-") as tmp:
            src = Path(tmp) / "in.bin"
            dst = Path(tmp) / ("out.y4m" if self.io_format == "y4m" else "out.yuv")
            src.write_bytes(region.payload)
            self._run(self.decode_template,
                      {"input": src, "output": dst, "qp": region.qp,
                       "w": region.width, "h": region.height})
            if not dst.exists():
                raise OutputMissing(f"decoder produced no output at {dst}")
            if self.io_format == "y4m":
                seq = parse_y4m(dst.read_bytes())
            else:
                seq = parse_raw_i420(dst.read_bytes(), region.width, region.height)
            return seq.frames[0]
