"""Binary PGM (P5, 8-bit) import and export of :class:`BitGrid`.

The header carries the grid geometry as a comment line
``# bounds=x0,y0,x1,y1 res=R`` so a round trip is exact.  The first image
row is the top of the frame (largest ``y``), as image viewers expect.
"""
from __future__ import annotations

import os
import re
import tempfile

import numpy as np

from .errors import GeometryError
from .grid import BitGrid

_GEOM = re.compile(r"bounds=([^\s]+)\s+res=([^\s]+)")


def to_pgm_bytes(g: BitGrid) -> bytes:
    x0, y0, x1, y1 = g.bounds
    ny, nx = g.shape
    header = (f"P5\n# bounds={x0!r},{y0!r},{x1!r},{y1!r} res={g.resolution!r}\n"
              f"{nx} {ny}\n255\n").encode("ascii")
    pixels = np.where(g.bits[::-1], 255, 0).astype(np.uint8)
    return header + pixels.tobytes()


def write_pgm(g: BitGrid, path) -> None:
    """Write atomically: a temp file in the same directory is renamed on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".pgm")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(to_pgm_bytes(g))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _tokens(data: bytes):
    """Yield (token, end_offset) for header fields, collecting comments."""
    pos = 0
    comments = []
    tokens = []
    while len(tokens) < 4:
        if pos >= len(data):
            raise GeometryError("truncated PGM header")
        c = data[pos:pos + 1]
        if c == b"#":
            end = data.index(b"\n", pos)
            comments.append(data[pos + 1:end].decode("ascii", "replace"))
            pos = end + 1
        elif c.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos].decode("ascii"))
    # exactly one whitespace byte separates maxval from the raster
    return tokens, comments, pos + 1


def from_pgm_bytes(data: bytes, bounds=None, resolution=None) -> BitGrid:
    """Parse a P5 image; pixels >= 128 count as occupied.

    Geometry comes from the header comment when present, otherwise from
    ``bounds``/``resolution``, otherwise the unit-pixel frame ``[0,W]x[0,H]``.
    """
    tokens, comments, offset = _tokens(data)
    magic, w, h, maxval = tokens
    if magic != "P5":
        raise GeometryError(f"not a binary PGM (magic {magic!r})")
    w, h, maxval = int(w), int(h), int(maxval)
    if maxval > 255:
        raise GeometryError("only 8-bit PGM is supported")
    raster = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=offset).reshape(h, w)
    for comment in comments:
        m = _GEOM.search(comment)
        if m and bounds is None:
            bounds = tuple(float(v) for v in m.group(1).split(","))
            resolution = float(m.group(2))
    if bounds is None:
        bounds, resolution = (0.0, 0.0, float(w), float(h)), 1.0
    return BitGrid(bounds, resolution, (raster >= 128)[::-1])


def read_pgm(path, bounds=None, resolution=None) -> BitGrid:
    with open(path, "rb") as fh:
        return from_pgm_bytes(fh.read(), bounds, resolution)
