"""The RCLC container: a little-endian binary stream of frame records.

Layout (all integers little-endian):

    header   "RCLC" | version u16 | width u16 | height u16
             | frame_rate_num u32 | frame_rate_den u32
             | gof_size u32 (0 = one BU for the whole stream)
             | blend_mode u8 (0 = BU blending, 1 = RU blending)
             | codec_tag u8 (0 = mock, 1 = extern)
             | frame_count u32
    record   role u8 (0 = BU, 1 = RU) | qp u8
             | roi_box 4 x u16 | compressed_box 4 x u16
             | reference_index u32 (0 on BU)
             | payload_len u32 | payload bytes

The stream's total size in bits is the bitrate numerator used by the
metrics module.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadMagic,
    BoxOutOfFrame,
    InconsistentCount,
    MissingReference,
    Truncated,
    UnsupportedVersion,
)
from .geometry import BoundingBox

MAGIC = b"RCLC"
VERSION = 1

ROLE_BU = 0
ROLE_RU = 1

BLEND_TAGS = {"bu": 0, "ru": 1}
BLEND_NAMES = {v: k for k, v in BLEND_TAGS.items()}

# codec_tag byte: low nibble identifies the codec, bit 4 set means
# luma-only planes (default is I420)
_CODEC_IDS = {"mock": 0, "extern": 1}
_CODEC_NAMES = {v: k for k, v in _CODEC_IDS.items()}
_LUMA_FLAG = 0x10

_HEADER = struct.Struct("<4sHHHIIIBBI")
_RECORD = struct.Struct("<BB4H4HII")

HEADER_BYTES = _HEADER.size
RECORD_OVERHEAD_BYTES = _RECORD.size


def pack_codec_tag(codec_name: str, layout: str) -> int:
    if codec_name not in _CODEC_IDS:
        raise BadMagic(f"unknown codec {codec_name!r}")
    return _CODEC_IDS[codec_name] | (_LUMA_FLAG if layout == "luma" else 0)


def unpack_codec_tag(tag: int) -> tuple[str, str]:
    codec_id = tag & 0x0F
    if codec_id not in _CODEC_NAMES:
        raise BadMagic(f"unknown codec tag {tag:#x}")
    return _CODEC_NAMES[codec_id], ("luma" if tag & _LUMA_FLAG else "i420")


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    frame_rate: Fraction
    gof_size: int
    blend_mode: int
    codec_tag: int
    frame_count: int
    version: int = VERSION

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise BoxOutOfFrame(f"zero-sized stream {self.width}x{self.height}")


@dataclass(frozen=True)
class FrameRecord:
    role: int
    qp: int
    roi_box: BoundingBox
    compressed_box: BoundingBox = None  # type: ignore[assignment]
    reference_index: int | None = None
    payload: bytes = b""

    def __post_init__(self):
        if self.role not in (ROLE_BU, ROLE_RU):
            raise BoxOutOfFrame(f"unknown role {self.role}")
        if self.compressed_box is None:
            # a BU re-encodes the whole frame; its compressed box is its ROI
            object.__setattr__(self, "compressed_box", self.roi_box)
        if self.role == ROLE_RU and self.reference_index is None:
            raise MissingReference("RU record without a reference index")


def _validate_record(index: int, rec: FrameRecord, header: StreamHeader) -> None:
    frame = BoundingBox(0, 0, header.width, header.height)
    for label, box in (("roi_box", rec.roi_box), ("compressed_box", rec.compressed_box)):
        if not frame.contains(box):
            raise BoxOutOfFrame(
                f"record {index}: {label} {box.as_tuple()} outside "
                f"{header.width}x{header.height} frame")
    if rec.role == ROLE_RU:
        if not rec.compressed_box.contains(rec.roi_box):
            raise BoxOutOfFrame(
                f"record {index}: compressed_box {rec.compressed_box.as_tuple()} "
                f"does not cover roi_box {rec.roi_box.as_tuple()}")
        if rec.reference_index is None or not 0 <= rec.reference_index < index:
            raise MissingReference(
                f"record {index}: reference {rec.reference_index} is not an "
                "earlier frame")
    elif rec.compressed_box != rec.roi_box:
        raise BoxOutOfFrame(
            f"record {index}: BU compressed_box must equal roi_box")


def write_stream(header: StreamHeader, records: list[FrameRecord]) -> bytes:
    if len(records) != header.frame_count:
        raise InconsistentCount(
            f"header declares {header.frame_count} frames, got {len(records)} records")
    out = [_HEADER.pack(MAGIC, header.version, header.width, header.height,
                        header.frame_rate.numerator, header.frame_rate.denominator,
                        header.gof_size, header.blend_mode, header.codec_tag,
                        header.frame_count)]
    for index, rec in enumerate(records):
        _validate_record(index, rec, header)
        out.append(_RECORD.pack(
            rec.role, rec.qp, *rec.roi_box.as_tuple(), *rec.compressed_box.as_tuple(),
            rec.reference_index if rec.role == ROLE_RU else 0,
            len(rec.payload)))
        out.append(rec.payload)
    return b"".join(out)


def read_stream(data: bytes) -> tuple[StreamHeader, list[FrameRecord]]:
    """Inverse of write_stream; validates magic, version and causality."""
    if len(data) < 4:
        raise Truncated(f"{len(data)} bytes cannot hold a header")
    if data[:4] != MAGIC:
        raise BadMagic(f"magic {data[:4]!r}, expected {MAGIC!r}")
    if len(data) < _HEADER.size:
        raise Truncated(f"{len(data)} bytes cannot hold a header")
    (_, version, width, height, rate_num, rate_den,
     gof_size, blend_mode, codec_tag, frame_count) = _HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise UnsupportedVersion(f"stream version {version}, supported {VERSION}")
    if rate_den == 0:
        raise Truncated("frame rate denominator is zero")
    header = StreamHeader(width, height, Fraction(rate_num, rate_den),
                          gof_size, blend_mode, codec_tag, frame_count)
    records = []
    pos = _HEADER.size
    for index in range(frame_count):
        if pos + _RECORD.size > len(data):
            raise Truncated(f"record {index} header cut off at byte {pos}")
        (role, qp, rx0, ry0, rx1, ry1, cx0, cy0, cx1, cy1,
         reference, payload_len) = _RECORD.unpack_from(data, pos)
        pos += _RECORD.size
        if pos + payload_len > len(data):
            raise Truncated(f"record {index} payload cut off at byte {pos}")
        payload = data[pos:pos + payload_len]
        pos += payload_len
        rec = FrameRecord(role, qp, BoundingBox(rx0, ry0, rx1, ry1),
                          BoundingBox(cx0, cy0, cx1, cy1),
                          reference if role == ROLE_RU else None, payload)
        _validate_record(index, rec, header)
        records.append(rec)
    if pos != len(data):
        raise Truncated(f"{len(data) - pos} trailing bytes after last record")
    return header, records


def stream_bits(data: bytes) -> int:
    """Total stream size in bits; the rate numerator for RD points."""
    return 8 * len(data)
