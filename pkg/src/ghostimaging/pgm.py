"""Minimal portable graymap (PGM) reader and writer.

Supports plain (``P2``) and raw (``P5``) graymaps with 8- or 16-bit samples.
Writing always produces raw 8-bit ``P5`` so output is byte-stable.
"""
from __future__ import annotations

import os
import re

import numpy as np

from .exceptions import PGMFormatError

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*([^\s#]+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    while len(tokens) < count:
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PGMFormatError("truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a graymap.

    Returns:
        ``(pixels, maxval)`` where ``pixels`` has shape ``(height, width)``.

    Raises:
        PGMFormatError: bad magic number, malformed header or truncated data.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PGMFormatError(f"unsupported format {magic!r}; expected P2 or P5")
    try:
        (w, h, maxval), pos = _header_tokens(data[2:], 3)
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise PGMFormatError(f"malformed PGM header: {exc}") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise PGMFormatError(f"invalid PGM dimensions {width}x{height}, maxval {maxval}")
    body = data[2 + pos:]
    n = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates header and raster
        body = body[1:]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(body) < n * dtype.itemsize:
            raise PGMFormatError(
                f"truncated raster: expected {n * dtype.itemsize} bytes, got {len(body)}"
            )
        pixels = np.frombuffer(body, dtype=dtype, count=n).astype(np.int64)
    else:
        fields = body.split()
        if len(fields) < n:
            raise PGMFormatError(f"truncated raster: expected {n} samples, got {len(fields)}")
        try:
            pixels = np.array([int(f) for f in fields[:n]], dtype=np.int64)
        except ValueError:
            raise PGMFormatError("non-integer sample in plain PGM raster") from None
    if pixels.max(initial=0) > maxval:
        raise PGMFormatError("sample exceeds maxval")
    return pixels.reshape(height, width), maxval


def write_pgm(path, pixels, comment: str | None = None) -> str:
    """Write an 8-bit raw graymap and return its path."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ValueError("pixels must be a 2-D array")
    if pixels.min(initial=0) < 0 or pixels.max(initial=0) > 255:
        raise ValueError("pixels must lie in [0, 255]")
    height, width = pixels.shape
    header = b"P5\n"
    if comment:
        header += b"# " + comment.encode("ascii") + b"\n"
    header += f"{width} {height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pixels.astype(np.uint8).tobytes())
    return os.fspath(path)
