"""Reference enhancer server: answers every request with its input.

Run as ``python -m rclc.identity_enhancer``. Useful for smoke-testing
the external enhancer path and as a minimal model of a conforming
server: one request in flight, bad magic consumes exactly the fixed
header and is answered with status 1, bad header fields skip the
declared payload and answer status 2.
"""

from __future__ import annotations

import sys

from .enhance import PROTOCOL_MAGIC, REQUEST_HEADER, RESPONSE_HEADER


def _read_exact(stream, n: int) -> bytes | None:
    data = stream.read(n)
    if not data and n:
        return None  # clean EOF at a message boundary
    if len(data) != n:
        return None
    return data


def serve(stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin.buffer
    stdout = stdout or sys.stdout.buffer
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
        size = width * height
        if planes == 3:
            size += 2 * (-(-width // 2)) * (-(-height // 2))
        bad_fields = (task not in (0, 1) or planes not in (1, 3)
                      or width == 0 or height == 0
                      or not (bx0 <= bx1 <= width and by0 <= by1 <= height))
        if planes not in (1, 3):
            stdout.write(RESPONSE_HEADER.pack(PROTOCOL_MAGIC, 2))
            stdout.flush()
            continue
        body = _read_exact(stdin, size)
        if body is None:
            return 0
        if bad_fields:
            stdout.write(RESPONSE_HEADER.pack(PROTOCOL_MAGIC, 2))
        else:
            stdout.write(RESPONSE_HEADER.pack(PROTOCOL_MAGIC, 0))
            stdout.write(body)
        stdout.flush()


if __name__ == "__main__":
    sys.exit(serve())
