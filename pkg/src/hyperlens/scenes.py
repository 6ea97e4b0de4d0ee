"""Deterministic synthetic test scenes.

Scene strings use the grammar ``kind[,key=value]*``, for example
``grid_lines,h=500,w=500,pitch=50,width=1``.  Keys ``h`` and ``w`` set the
raster size (default 500); ``margin`` blanks a border of that many pixels
to the background value for every kind.  Remaining keys are per kind:

==================  =====================================================
kind                keys (defaults)
==================  =====================================================
grid_lines          pitch=50, width=1, offset=0 (dark lines on white)
circle              radius=0.3*min(h,w), stroke=2, cy=h/2, cx=w/2,
                    supersample=8 (anti-aliased bright ring on black)
edges               color=1 (RGB when 1), flat shapes with sharp edges
vernier             length=0.3*h, thickness=1, offset=0, gap=0,
                    x=w/2+3 (two bright vertical segments on black)
bandlimited_noise   bandlimit=0.3, seed=0
==================  =====================================================

``bandlimited_noise`` draws white noise from PCG64 (``random_raw`` words
mapped to ``[0, 1)`` as ``(word >> 11) * 2**-53``), keeps only DFT bins
with ``|k| <= bandlimit * N / 2`` on both axes and rescales affinely to
[0, 1], so it stays exactly band-limited.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, InvalidParams, ParseError
from .grid import ImageGrid
from .metrics import mse

SCENE_KINDS = ("grid_lines", "circle", "edges", "vernier", "bandlimited_noise")
MIN_SIZE = 64
DEFAULT_SIZE = 500

_COMMON_KEYS = {"h", "w", "margin"}
_KIND_KEYS = {
    "grid_lines": {"pitch", "width", "offset"},
    "circle": {"radius", "stroke", "cy", "cx", "supersample"},
    "edges": {"color"},
    "vernier": {"length", "thickness", "offset", "gap", "x"},
    "bandlimited_noise": {"bandlimit", "seed"},
}
_BACKGROUND = {
    "grid_lines": 1.0, "circle": 0.0, "edges": 0.15, "vernier": 0.0, "bandlimited_noise": 0.5,
}

# the five scenes the acceptance suite and `hyperlens compare` default to
CORPUS = (
    "grid_lines,h=500,w=500,pitch=50,width=4,offset=23",
    "circle,h=500,w=500,radius=150,stroke=4",
    "edges,h=500,w=500",
    "vernier,h=500,w=500,thickness=2,offset=3",
    "bandlimited_noise,h=500,w=500,bandlimit=0.3,seed=1",
)


@dataclass(frozen=True)
class SceneSpec:
    kind: str
    height: int = DEFAULT_SIZE
    width: int = DEFAULT_SIZE
    params: tuple[tuple[str, float], ...] = ()
    text: str | None = None

    def get(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    def __str__(self):
        if self.text is not None:
            return self.text
        parts = [self.kind, f"h={self.height}", f"w={self.width}"]
        parts += [f"{k}={_fmt(v)}" for k, v in self.params]
        return ",".join(parts)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def parse_scene_spec(text: str) -> SceneSpec:
    """Parse ``kind,key=value,...``; the original text is kept for reporting."""
    tokens = [t.strip() for t in text.split(",")]
    kind = tokens[0]
    if kind not in SCENE_KINDS:
        raise ParseError(f"unknown scene kind {kind!r} (expected one of {SCENE_KINDS})", token=kind)
    allowed = _COMMON_KEYS | _KIND_KEYS[kind]
    values: dict[str, float] = {}
    for tok in tokens[1:]:
        key, sep, raw = tok.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ParseError(f"expected key=value, got {tok!r}", token=tok)
        if key not in allowed:
            raise ParseError(f"unknown key {key!r} for scene kind {kind}", token=tok)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", token=tok)
        try:
            values[key] = float(raw)
        except ValueError:
            raise ParseError(f"value of {key!r} is not a number: {raw!r}", token=tok) from None
        if not math.isfinite(values[key]):
            raise ParseError(f"value of {key!r} must be finite", token=tok)
    h = values.pop("h", DEFAULT_SIZE)
    w = values.pop("w", DEFAULT_SIZE)
    for name, v in (("h", h), ("w", w)):
        if not float(v).is_integer():
            raise ParseError(f"{name} must be an integer, got {v}", token=f"{name}={v}")
    return SceneSpec(kind, int(h), int(w), tuple(values.items()), text=text)


def _grid_lines(spec: SceneSpec) -> np.ndarray:
    pitch = int(spec.get("pitch", 50))
    width = int(spec.get("width", 1))
    offset = int(spec.get("offset", 0))
    if pitch < 1 or width < 1 or width >= pitch or not 0 <= offset < pitch:
        raise InvalidParams("grid_lines needs pitch >= 1, 1 <= width < pitch, 0 <= offset < pitch")
    img = np.ones((spec.height, spec.width))
    rows = (np.arange(spec.height) - offset) % pitch < width
    cols = (np.arange(spec.width) - offset) % pitch < width
    img[rows, :] = 0.0
    img[:, cols] = 0.0
    return img[np.newaxis]


def _circle(spec: SceneSpec) -> np.ndarray:
    h, w = spec.height, spec.width
    radius = spec.get("radius", 0.3 * min(h, w))
    stroke = spec.get("stroke", 2.0)
    cy = spec.get("cy", h / 2)
    cx = spec.get("cx", w / 2)
    ss = int(spec.get("supersample", 8))
    if radius <= 0 or stroke <= 0 or ss < 1 or stroke / 2 > radius:
        raise InvalidParams("circle needs radius > 0, 0 < stroke <= 2*radius, supersample >= 1")
    cov = kernels.annulus_coverage(h, w, float(cy), float(cx), radius - stroke / 2, radius + stroke / 2, ss)
    return cov[np.newaxis]


def _edges(spec: SceneSpec) -> np.ndarray:
    h, w = spec.height, spec.width
    color = int(spec.get("color", 1))
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    fy, fx = yy / h, xx / w
    layers = [
        # (mask, rgb)
        (np.ones((h, w), bool), (0.15, 0.2, 0.25)),
        ((fy >= 0.207) & (fy < 0.593) & (fx >= 0.233) & (fx < 0.767), (0.9, 0.3, 0.2)),
        ((fy - 0.66) ** 2 + (fx - 0.52) ** 2 < 0.18 ** 2, (0.2, 0.7, 0.4)),
        ((fy > fx + 0.083) & (fy < 0.8) & (fx > 0.121), (0.95, 0.9, 0.3)),
        ((fy >= 0.087) & (fy < 0.137) & (fx >= 0.55) & (fx < 0.93), (0.05, 0.1, 0.85)),
    ]
    img = np.zeros((3, h, w))
    for mask, rgb in layers:
        for c in range(3):
            img[c][mask] = rgb[c]
    if not color:
        # luma of the same layout
        img = (0.299 * img[0] + 0.587 * img[1] + 0.114 * img[2])[np.newaxis]
    return img


def _vernier(spec: SceneSpec) -> np.ndarray:
    h, w = spec.height, spec.width
    length = int(round(spec.get("length", 0.3 * h)))
    thick = int(spec.get("thickness", 1))
    offset = int(spec.get("offset", 0))
    gap = int(spec.get("gap", 0))
    x = int(spec.get("x", w // 2 + 3))
    top = (h - 2 * length - gap) // 2
    if length < 1 or thick < 1 or gap < 0 or top < 0:
        raise InvalidParams("vernier segments do not fit: need 2*length + gap <= h")
    if min(x, x + offset) < 0 or max(x, x + offset) + thick > w:
        raise InvalidParams("vernier segments fall outside the image")
    img = np.zeros((h, w))
    img[top:top + length, x:x + thick] = 1.0
    lower = top + length + gap
    img[lower:lower + length, x + offset:x + offset + thick] = 1.0
    return img[np.newaxis]


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """``n`` doubles in [0, 1) from PCG64 seeded via ``SeedSequence(seed)``."""
    words = np.random.PCG64(np.random.SeedSequence(int(seed) & ((1 << 64) - 1))).random_raw(n)
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def _bandlimited_noise(spec: SceneSpec) -> np.ndarray:
    h, w = spec.height, spec.width
    band = spec.get("bandlimit", 0.3)
    seed = int(spec.get("seed", 0))
    if not 0 < band <= 1:
        raise InvalidParams(f"bandlimit must lie in (0, 1], got {band}")
    white = uniform_stream(seed, h * w).reshape(h, w)
    ky = np.abs(np.fft.fftfreq(h) * h)
    kx = np.abs(np.fft.fftfreq(w) * w)
    keep = (ky[:, None] <= band * h / 2) & (kx[None, :] <= band * w / 2)
    bins = np.fft.fft2(white) * keep
    # the mask is symmetric under k -> -k, so only rounding is discarded here
    field = np.fft.ifft2(bins).real
    lo, hi = field.min(), field.max()
    if hi - lo == 0:
        return np.full((1, h, w), 0.5)
    return ((field - lo) / (hi - lo))[np.newaxis]


_GENERATORS = {
    "grid_lines": _grid_lines,
    "circle": _circle,
    "edges": _edges,
    "vernier": _vernier,
    "bandlimited_noise": _bandlimited_noise,
}


def generate(spec: SceneSpec | str) -> ImageGrid:
    """Render a scene; identical specs give bit-identical rasters."""
    if isinstance(spec, str):
        spec = parse_scene_spec(spec)
    if spec.kind not in _GENERATORS:
        raise InvalidParams(f"unknown scene kind {spec.kind!r}")
    if spec.height < MIN_SIZE or spec.width < MIN_SIZE:
        raise InvalidParams(f"scenes must be at least {MIN_SIZE}x{MIN_SIZE}")
    img = _GENERATORS[spec.kind](spec)
    margin = int(spec.get("margin", 0))
    if margin:
        if margin < 0 or 2 * margin >= min(spec.height, spec.width):
            raise InvalidParams(f"margin {margin} leaves no content area")
        bg = _background(spec, img)
        inner = np.zeros(img.shape[1:], bool)
        inner[margin:-margin, margin:-margin] = True
        for c in range(img.shape[0]):
            img[c][~inner] = bg[c]
    return ImageGrid(img)


def _background(spec: SceneSpec, img: np.ndarray) -> tuple[float, ...]:
    if spec.kind == "edges":
        return tuple(img[:, 0, 0])
    return (_BACKGROUND[spec.kind],) * img.shape[0]


def vernier_separability(recon_aligned: ImageGrid, recon_offset: ImageGrid) -> float:
    """Pooled MSE between two reconstructions; larger means the offset is more visible."""
    if recon_aligned.shape != recon_offset.shape:
        raise DimensionMismatch("reconstructions differ in shape")
    per = mse(recon_aligned, recon_offset)
    return sum(per) / len(per)
