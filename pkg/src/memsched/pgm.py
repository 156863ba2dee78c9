"""Reading and writing 8-bit grayscale PGM images (P2 ASCII, P5 binary)."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _tokens(data: bytes):
    """Header tokens with # comments stripped, then the byte offset."""
    pos = 0
    while True:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        yield data[start:pos], pos


def read_pgm(path) -> np.ndarray:
    """Load a P2 or P5 PGM file as an int array of shape (rows, cols)."""
    data = Path(path).read_bytes()
    it = _tokens(data)
    magic, _ = next(it)
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a PGM file (magic {magic!r})")
    (w_tok, _), (h_tok, _), (max_tok, end) = next(it), next(it), next(it)
    width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    if width < 1 or height < 1:
        raise ValueError(f"{path}: bad dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: only 8-bit PGM supported, maxval {maxval}")
    count = width * height
    if magic == b"P5":
        start = end + 1  # single whitespace byte after maxval
        raster = data[start : start + count]
        if len(raster) != count:
            raise ValueError(f"{path}: truncated raster")
        pixels = np.frombuffer(raster, dtype=np.uint8).astype(np.int64)
    else:
        values = data[end:].split()
        if len(values) != count:
            raise ValueError(f"{path}: expected {count} pixels, got {len(values)}")
        pixels = np.array([int(v) for v in values], dtype=np.int64)
    if pixels.max(initial=0) > maxval:
        raise ValueError(f"{path}: pixel exceeds maxval {maxval}")
    return pixels.reshape(height, width)


def write_pgm(path, image, binary: bool = True, maxval: int = 255) -> None:
    """Write an integer array as PGM; P5 when binary else P2."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"image must be 2-D, got shape {arr.shape}")
    if not 0 < maxval <= 255:
        raise ValueError(f"only 8-bit PGM supported, maxval {maxval}")
    if arr.min(initial=0) < 0 or arr.max(initial=0) > maxval:
        raise ValueError("pixel values out of range")
    height, width = arr.shape
    header = f"{'P5' if binary else 'P2'}\n{width} {height}\n{maxval}\n"
    path = Path(path)
    if binary:
        path.write_bytes(header.encode() + arr.astype(np.uint8).tobytes())
    else:
        rows = "\n".join(" ".join(str(int(v)) for v in row) for row in arr)
        path.write_text(header + rows + "\n")
