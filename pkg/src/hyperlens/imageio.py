"""Binary PGM/PPM (P5/P6, maxval 255 or 65535) and PFM image files.

PNM export clips to [0, 1] and rounds half away from zero, i.e.
``floor(x * maxval + 0.5)`` for the clipped non-negative values.  PFM is
written little-endian (scale ``-1.0``) with rows bottom-to-top as the
format requires; samples are stored as float32.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import ImageFormatError
from .grid import ImageGrid

PNM_SUFFIXES = (".pgm", ".ppm", ".pnm")
PFM_SUFFIXES = (".pfm",)


def quantize(samples: np.ndarray, maxval: int) -> np.ndarray:
    clipped = np.clip(samples, 0.0, 1.0)
    return np.floor(clipped * maxval + 0.5).astype(np.uint16 if maxval > 255 else np.uint8)


def encode_pnm(img: ImageGrid, bits: int = 8) -> bytes:
    if bits not in (8, 16):
        raise ValueError(f"bits must be 8 or 16, got {bits}")
    maxval = 255 if bits == 8 else 65535
    magic = b"P5" if img.channels == 1 else b"P6"
    q = quantize(img.samples, maxval)
    # interleave channels: (C, H, W) -> (H, W, C)
    body = np.ascontiguousarray(np.moveaxis(q, 0, -1))
    if bits == 16:
        body = body.astype(">u2")
    header = b"%s\n%d %d\n%d\n" % (magic, img.width, img.height, maxval)
    return header + body.tobytes()


def encode_pfm(img: ImageGrid) -> bytes:
    magic = b"Pf" if img.channels == 1 else b"PF"
    data = np.moveaxis(img.samples, 0, -1)[::-1].astype("<f4")
    header = b"%s\n%d %d\n-1.0\n" % (magic, img.width, img.height)
    return header + np.ascontiguousarray(data).tobytes()


def _tokens(buf: bytes, count: int, pos: int):
    """Read ``count`` whitespace-separated header tokens, skipping '#' comments."""
    out = []
    n = len(buf)
    while len(out) < count:
        while pos < n and buf[pos:pos + 1].isspace():
            pos += 1
        if pos < n and buf[pos:pos + 1] == b"#":
            while pos < n and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not buf[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated image header")
        out.append(buf[start:pos])
    # exactly one whitespace byte separates header from raster
    return out, pos + 1


def decode(buf: bytes) -> ImageGrid:
    magic = buf[:2]
    if magic in (b"P5", b"P6"):
        channels = 1 if magic == b"P5" else 3
        (w, h, maxval), pos = _tokens(buf, 3, 2)
        try:
            w, h, maxval = int(w), int(h), int(maxval)
        except ValueError:
            raise ImageFormatError("non-numeric PNM header field") from None
        if not 0 < maxval < 65536:
            raise ImageFormatError(f"unsupported maxval {maxval}")
        dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
        need = w * h * channels * dtype.itemsize
        raw = buf[pos:pos + need]
        if len(raw) != need:
            raise ImageFormatError("truncated PNM raster")
        arr = np.frombuffer(raw, dtype=dtype).reshape(h, w, channels).astype(np.float64) / maxval
        return ImageGrid(np.moveaxis(arr, -1, 0))
    if magic in (b"Pf", b"PF"):
        channels = 1 if magic == b"Pf" else 3
        (w, h, scale), pos = _tokens(buf, 3, 2)
        try:
            w, h, scale = int(w), int(h), float(scale)
        except ValueError:
            raise ImageFormatError("non-numeric PFM header field") from None
        dtype = np.dtype("<f4") if scale < 0 else np.dtype(">f4")
        need = w * h * channels * 4
        raw = buf[pos:pos + need]
        if len(raw) != need:
            raise ImageFormatError("truncated PFM raster")
        arr = np.frombuffer(raw, dtype=dtype).reshape(h, w, channels)[::-1].astype(np.float64)
        return ImageGrid(np.moveaxis(arr, -1, 0))
    raise ImageFormatError(f"unrecognised image magic {magic!r}")


def read_image(path: str | os.PathLike) -> ImageGrid:
    return decode(Path(path).read_bytes())


def write_image(path: str | os.PathLike, img: ImageGrid, bits: int = 8) -> Path:
    """Write by suffix: ``.pfm`` is float, ``.pgm/.ppm/.pnm`` quantized to ``bits``."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in PFM_SUFFIXES:
        data = encode_pfm(img)
    elif suffix in PNM_SUFFIXES:
        data = encode_pnm(img, bits)
    else:
        raise ImageFormatError(f"unsupported image suffix {path.suffix!r} (use .pgm, .ppm or .pfm)")
    path.write_bytes(data)
    return path
