"""Decoder-side enhancement: seam feathering and the external enhancer
subprocess protocol.

An enhancer client serves two tasks with one implementation: polishing
the ROI region of a coarsely coded BU frame, and hiding the paste seam
around an RU's compressed box. The classical client feathers seams and
leaves BU regions untouched; the external client ships both tasks to a
child process over a binary stdin/stdout protocol.

Protocol (little-endian):

    request   "RCEN" | task u8 (0 = BU enhance, 1 = RU seam)
              | width u16 | height u16 | planes u8 (1 or 3)
              | box 4 x u16 (pasted region, patch-relative)
              | plane bytes (luma w*h, then 2 x ceil(w/2)*ceil(h/2))
    response  "RCEN" | status u8 (0 = ok, else no payload follows)
              | plane bytes of identical dimensions

One request is in flight per child. A server that reads a bad magic
consumes exactly the 18 header bytes and answers a nonzero status; for
a well-formed header with bad fields it skips the declared payload
first, keeping the stream in sync.
"""

from __future__ import annotations

import shlex
import struct
import subprocess

import numpy as np

from .errors import EnhancerError, OutOfBounds
from .geometry import BoundingBox
from .raster import I420, Raster, crop, paste

PROTOCOL_MAGIC = b"RCEN"
TASK_BU_ENHANCE = 0
TASK_RU_SEAM = 1

REQUEST_HEADER = struct.Struct("<4sBHHB4H")
RESPONSE_HEADER = struct.Struct("<4sB")

# pixels of context sent around the pasted region for seam requests
SEAM_MARGIN = 8


def _blend(own: np.ndarray, cross: np.ndarray, alpha: float) -> np.ndarray:
    mixed = alpha * own.astype(np.float64) + (1.0 - alpha) * cross.astype(np.float64)
    return np.rint(mixed).astype(np.uint8)


def _feather_plane(plane: np.ndarray, box: tuple[int, int, int, int], band: int) -> np.ndarray:
    """Cross-fade a band-wide ring straddling the box border.

    Each ring sample is mixed with its mirror across the border; the
    mix leans toward the sample's own side as distance from the border
    grows, reaching identity just outside the ring. Borders on the
    frame edge are left alone.
    """
    h, w = plane.shape
    x0, y0, x1, y1 = box
    out = plane.copy()

    # horizontal borders (top, bottom) first, then vertical on the result
    src = plane
    for k in range(1, band + 1):
        alpha = 0.5 + (k - 0.5) / (2.0 * band)
        cols = slice(x0, x1)
        if y0 > 0:
            yin, yout = y0 + k - 1, y0 - k
            if yin < y1:
                out[yin, cols] = _blend(src[yin, cols], src[max(yout, 0), cols], alpha)
            if yout >= 0:
                out[yout, cols] = _blend(src[yout, cols], src[min(yin, y1 - 1), cols], alpha)
        if y1 < h:
            yin, yout = y1 - k, y1 + k - 1
            if yin >= y0:
                out[yin, cols] = _blend(src[yin, cols], src[min(yout, h - 1), cols], alpha)
            if yout < h:
                out[yout, cols] = _blend(src[yout, cols], src[max(yin, y0), cols], alpha)
    src = out.copy()
    for k in range(1, band + 1):
        alpha = 0.5 + (k - 0.5) / (2.0 * band)
        rows = slice(y0, y1)
        if x0 > 0:
            xin, xout = x0 + k - 1, x0 - k
            if xin < x1:
                out[rows, xin] = _blend(src[rows, xin], src[rows, max(xout, 0)], alpha)
            if xout >= 0:
                out[rows, xout] = _blend(src[rows, xout], src[rows, min(xin, x1 - 1)], alpha)
        if x1 < w:
            xin, xout = x1 - k, x1 + k - 1
            if xin >= x0:
                out[rows, xin] = _blend(src[rows, xin], src[rows, min(xout, w - 1)], alpha)
            if xout < w:
                out[rows, xout] = _blend(src[rows, xout], src[rows, max(xin, x0)], alpha)
    return out


def feather_seam(frame: Raster, box: BoundingBox, band: int) -> Raster:
    """Linearly cross-fade the paste boundary of box over a band-wide ring.

    Pixels farther than band from the border are untouched; borders
    lying on the frame edge are skipped.
    """
    if band < 1:
        raise ValueError(f"band must be >= 1, got {band}")
    if box.x1 > frame.width or box.y1 > frame.height:
        raise OutOfBounds(f"box {box.as_tuple()} exceeds frame")
    planes = [_feather_plane(frame.planes[0], box.as_tuple(), band)]
    if frame.layout == I420:
        cbox = (box.x0 // 2, box.y0 // 2, -(-box.x1 // 2), -(-box.y1 // 2))
        cband = max(1, band // 2)
        planes += [_feather_plane(p, cbox, cband) for p in frame.planes[1:]]
    return Raster(frame.width, frame.height, planes)


class FeatherEnhancer:
    """Classical enhancer: identity on BU regions, feathered RU seams."""

    def __init__(self, band: int = 4):
        if band < 1:
            raise ValueError(f"band must be >= 1, got {band}")
        self.band = band

    def enhance_bu_roi(self, frame: Raster, roi_box: BoundingBox) -> Raster:
        return frame

    def smooth_ru_seam(self, frame: Raster, compressed_box: BoundingBox) -> Raster:
        return feather_seam(frame, compressed_box, self.band)

    def close(self) -> None:
        pass


def pack_request(task: int, patch: Raster, box: BoundingBox) -> bytes:
    head = REQUEST_HEADER.pack(PROTOCOL_MAGIC, task, patch.width, patch.height,
                               len(patch.planes), *box.as_tuple())
    return head + b"".join(p.tobytes() for p in patch.planes)


def plane_shapes(width: int, height: int, planes: int) -> list[tuple[int, int]]:
    shapes = [(height, width)]
    if planes == 3:
        shapes += [(-(-height // 2), -(-width // 2))] * 2
    return shapes


class ExternalEnhancer:
    """Speaks the enhancer protocol with a long-running child process."""

    def __init__(self, command: str, margin: int = SEAM_MARGIN):
        self.command = command
        self.margin = margin
        self._child: subprocess.Popen | None = None

    def _ensure_child(self) -> subprocess.Popen:
        if self._child is None or self._child.poll() is not None:
            self._child = subprocess.Popen(
                shlex.split(self.command), stdin=subprocess.PIPE,
                stdout=subprocess.PIPE)
        return self._child

    def _read_exact(self, n: int) -> bytes:
        assert self._child is not None and self._child.stdout is not None
        data = self._child.stdout.read(n)
        if data is None or len(data) != n:
            raise EnhancerError(
                f"enhancer {self.command!r} closed its pipe "
                f"(wanted {n} bytes, got {len(data or b'')})")
        return data

    def request(self, task: int, patch: Raster, box: BoundingBox) -> Raster:
        child = self._ensure_child()
        assert child.stdin is not None
        try:
            child.stdin.write(pack_request(task, patch, box))
            child.stdin.flush()
        except BrokenPipeError as exc:
            raise EnhancerError(f"enhancer {self.command!r} is gone") from exc
        magic, status = RESPONSE_HEADER.unpack(self._read_exact(RESPONSE_HEADER.size))
        if magic != PROTOCOL_MAGIC:
            raise EnhancerError(f"bad response magic {magic!r}")
        if status != 0:
            raise EnhancerError(f"enhancer refused request, status {status}")
        planes = []
        for shape in plane_shapes(patch.width, patch.height, len(patch.planes)):
            raw = self._read_exact(shape[0] * shape[1])
            planes.append(np.frombuffer(raw, dtype=np.uint8).reshape(shape).copy())
        return Raster(patch.width, patch.height, planes)

    def enhance_bu_roi(self, frame: Raster, roi_box: BoundingBox) -> Raster:
        patch = crop(frame, roi_box)
        full = BoundingBox(0, 0, patch.width, patch.height)
        return paste(frame, self.request(TASK_BU_ENHANCE, patch, full), roi_box)

    def smooth_ru_seam(self, frame: Raster, compressed_box: BoundingBox) -> Raster:
        m = self.margin
        ctx = BoundingBox(max(compressed_box.x0 - m, 0),
                          max(compressed_box.y0 - m, 0),
                          min(compressed_box.x1 + m, frame.width),
                          min(compressed_box.y1 + m, frame.height))
        rel = BoundingBox(compressed_box.x0 - ctx.x0, compressed_box.y0 - ctx.y0,
                          compressed_box.x1 - ctx.x0, compressed_box.y1 - ctx.y0)
        patch = crop(frame, ctx)
        return paste(frame, self.request(TASK_RU_SEAM, patch, rel), ctx)

    def close(self) -> None:
        if self._child is not None:
            if self._child.stdin is not None:
                self._child.stdin.close()
            self._child.wait(timeout=10)
            self._child = None

    def __enter__(self) -> "ExternalEnhancer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def make_enhancer(spec: str):
    """Build an enhancer client from its textual form.

    none | feather:<band> | extern:<command>
    """
    if spec == "none":
        return None
    if spec.startswith("feather"):
        band = int(spec.split(":", 1)[1]) if ":" in spec else 4
        return FeatherEnhancer(band)
    if spec.startswith("extern:"):
        return ExternalEnhancer(spec.split(":", 1)[1])
    raise ValueError(f"unknown enhancer {spec!r}")


def check_enhancer(command: str) -> list[str]:
    """Protocol conformance probe; returns a list of failure descriptions.

    Exercises shape preservation (several geometries up to 1024x1024),
    determinism for repeated requests, and survival of a malformed
    magic followed by a valid request.
    """
    failures: list[str] = []
    rng = np.random.default_rng(20240601)

    def random_patch(w: int, h: int, planes: int) -> Raster:
        if planes == 3:
            w, h = w - w % 2, h - h % 2
            data = [rng.integers(0, 256, size=(h, w), dtype=np.uint8)]
            data += [rng.integers(0, 256, size=(-(-h // 2), -(-w // 2)), dtype=np.uint8)
                     for _ in range(2)]
            return Raster(w, h, data)
        return Raster(w, h, [rng.integers(0, 256, size=(h, w), dtype=np.uint8)])

    with ExternalEnhancer(command) as client:
        for (w, h, planes) in [(16, 16, 1), (32, 24, 3), (17, 13, 1),
                               (256, 128, 3), (1024, 1024, 1)]:
            patch = random_patch(w, h, planes)
            box = BoundingBox(0, 0, patch.width, patch.height)
            for task in (TASK_BU_ENHANCE, TASK_RU_SEAM):
                try:
                    out = client.request(task, patch, box)
                except EnhancerError as exc:
                    failures.append(f"{w}x{h}/{planes}p task {task}: {exc}")
                    continue
                if (out.width, out.height, len(out.planes)) != \
                        (patch.width, patch.height, len(patch.planes)):
                    failures.append(f"{w}x{h}/{planes}p task {task}: shape changed")

        patch = random_patch(48, 48, 1)
        box = BoundingBox(8, 8, 40, 40)
        first = client.request(TASK_RU_SEAM, patch, box)
        second = client.request(TASK_RU_SEAM, patch, box)
        if first != second:
            failures.append("identical requests produced different responses")

        child = client._ensure_child()
        assert child.stdin is not None and child.stdout is not None
        child.stdin.write(b"XXXX" + bytes(REQUEST_HEADER.size - 4))
        child.stdin.flush()
        magic, status = RESPONSE_HEADER.unpack(
            child.stdout.read(RESPONSE_HEADER.size) or b"\0\0\0\0\0")
        if magic != PROTOCOL_MAGIC or status == 0:
            failures.append(f"malformed magic answered with status {status}")
        try:
            client.request(TASK_BU_ENHANCE, patch, BoundingBox(0, 0, 48, 48))
        except EnhancerError as exc:
            failures.append(f"no recovery after malformed magic: {exc}")
    return failures
