"""Protocol server: enhances patches for an rclc decoder over
stdin/stdout.

Wire format (little-endian), one request in flight:

    request   "RCEN" | task u8 | width u16 | height u16 | planes u8
              | box 4 x u16 | plane bytes
    response  "RCEN" | status u8 (0 ok, else no payload)
              | plane bytes, identical dimensions

The model touches luma only; chroma planes pass through unchanged. A
bad magic consumes exactly the 18 header bytes and is answered with
status 1; a well-formed header with bad fields skips the declared
payload and answers status 2, keeping the stream in sync. EOF at a
message boundary is a clean shutdown.

Run: python -m rclc_enhancer.serve --weights w.pt   (or --identity)
"""

from __future__ import annotations

import argparse
import struct
import sys

import numpy as np
import torch

from .model import EnhancerModel, enhance_plane, load_weights

PROTOCOL_MAGIC = b"RCEN"
REQUEST_HEADER = struct.Struct("<4sBHHB4H")
RESPONSE_HEADER = struct.Struct("<4sB")


def _read_exact(stream, n: int) -> bytes | None:
    data = stream.read(n)
    if data is None or len(data) != n:
        return None
    return data


def _plane_sizes(width: int, height: int, planes: int) -> list[int]:
    sizes = [width * height]
    if planes == 3:
        sizes += [(-(-width // 2)) * (-(-height // 2))] * 2
    return sizes


def serve(model: EnhancerModel | None, stdin=None, stdout=None) -> int:
    """Request loop; model None answers every request with its input."""
    stdin = stdin or sys.stdin.buffer
    stdout = stdout or sys.stdout.buffer
    torch.set_num_threads(1)
    while True:
        head = _read_exact(stdin, REQUEST_HEADER.size)
        if head is None:
            return 0
        magic, task, width, height, planes, bx0, by0, bx1, by1 = \
            REQUEST_HEADER.unpack(head)
        if magic != PROTOCOL_MAGIC:
            stdout.write(RESPONSE_HEADER.pack(PROTOCOL_MAGIC, 1))
            stdout.flush()
            continue
        if planes not in (1, 3):
            # payload length is not trustworthy; answer without reading on
            stdout.write(RESPONSE_HEADER.pack(PROTOCOL_MAGIC, 2))
            stdout.flush()
            continue
        sizes = _plane_sizes(width, height, planes)
        body = _read_exact(stdin, sum(sizes))
        if body is None:
            return 0
        bad_fields = (task not in (0, 1) or width == 0 or height == 0
                      or not (bx0 <= bx1 <= width and by0 <= by1 <= height))
        if bad_fields:
            stdout.write(RESPONSE_HEADER.pack(PROTOCOL_MAGIC, 2))
            stdout.flush()
            continue
        luma = np.frombuffer(body, np.uint8, sizes[0]).reshape(height, width)
        if model is None:
            out_luma = luma
        else:
            out_luma = enhance_plane(model, luma, task, (bx0, by0, bx1, by1))
        stdout.write(RESPONSE_HEADER.pack(PROTOCOL_MAGIC, 0))
        stdout.write(out_luma.tobytes())
        stdout.write(body[sizes[0]:])  # chroma passes through
        stdout.flush()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="enhancer protocol server")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--weights", help="trained weights file")
    group.add_argument("--identity", action="store_true",
                       help="answer every request with its input")
    args = parser.parse_args(argv)
    model = None
    if args.weights:
        model, _ = load_weights(args.weights)
    return serve(model)


if __name__ == "__main__":
    sys.exit(main())
