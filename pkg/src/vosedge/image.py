"""Raster types, PNG/PPM/PGM I/O, grayscale conversion and 3x3 windowing.

All rasters are row-major numpy arrays indexed ``[y, x]``. Arrays held by the
image types are marked read-only so they can be shared across worker threads.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Union

import numpy as np
from PIL import Image

from .errors import CorruptData, OutOfBounds, UnsupportedFormat

__all__ = [
    "PixelVector",
    "BorderPolicy",
    "ColorImage",
    "GrayImage",
    "ScalarPlane",
    "EdgeMap",
    "pad",
    "load_image",
    "load_edge_map",
    "save_image",
    "to_grayscale",
    "extract_window",
]

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


class PixelVector(NamedTuple):
    r: int
    g: int
    b: int


class BorderPolicy(Enum):
    REPLICATE = "replicate"
    REFLECT = "reflect"
    ZERO = "zero"

    @classmethod
    def parse(cls, value: Union[str, "BorderPolicy"]) -> "BorderPolicy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            choices = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown border policy {value!r} (expected one of {choices})") from None


_PAD_MODES = {
    BorderPolicy.REPLICATE: "edge",
    BorderPolicy.REFLECT: "reflect",
    BorderPolicy.ZERO: "constant",
}


def pad(array: np.ndarray, policy: BorderPolicy, before: int = 1, after: int | None = None) -> np.ndarray:
    """Pad the two spatial axes of ``array`` according to ``policy``.

    Trailing axes (e.g. color channels) are left untouched.
    """
    after = before if after is None else after
    widths = [(before, after), (before, after)] + [(0, 0)] * (array.ndim - 2)
    return np.pad(array, widths, mode=_PAD_MODES[BorderPolicy.parse(policy)])


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.flags.writeable = False
    return array


def _check_shape(name: str, data: np.ndarray, ndim: int) -> None:
    if data.ndim != ndim or data.shape[0] < 1 or data.shape[1] < 1:
        raise ValueError(f"{name} needs a non-empty {ndim}-D array, got shape {data.shape}")


@dataclass(frozen=True, eq=False)
class _Raster:
    data: np.ndarray

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width


@dataclass(frozen=True, eq=False)
class ColorImage(_Raster):
    """8-bit RGB raster; ``data`` has shape ``(height, width, 3)`` and dtype uint8."""

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ValueError(f"ColorImage needs shape (H, W, 3), got {data.shape}")
        _check_shape("ColorImage", data[..., 0], 2)
        if data.dtype != np.uint8:
            if np.issubdtype(data.dtype, np.integer) or np.issubdtype(data.dtype, np.floating):
                if data.size and (data.min() < 0 or data.max() > 255):
                    raise ValueError("ColorImage channels must lie in [0, 255]")
                if np.issubdtype(data.dtype, np.floating) and not np.all(data == np.round(data)):
                    raise ValueError("ColorImage channels must be integral")
            data = data.astype(np.uint8)
        object.__setattr__(self, "data", _frozen(data))

    @classmethod
    def from_pixels(cls, width: int, height: int, pixels) -> "ColorImage":
        arr = np.asarray(list(pixels), dtype=np.int64).reshape(-1, 3)
        if arr.shape[0] != width * height:
            raise ValueError(f"expected {width * height} pixels, got {arr.shape[0]}")
        return cls(arr.reshape(height, width, 3))

    @classmethod
    def filled(cls, width: int, height: int, color) -> "ColorImage":
        return cls(np.broadcast_to(np.asarray(color, dtype=np.uint8), (height, width, 3)).copy())

    def pixel(self, x: int, y: int) -> PixelVector:
        r, g, b = (int(v) for v in self.data[y, x])
        return PixelVector(r, g, b)

    @property
    def pixels(self) -> list[PixelVector]:
        return [PixelVector(*map(int, p)) for p in self.data.reshape(-1, 3)]


@dataclass(frozen=True, eq=False)
class GrayImage(_Raster):
    """Real-valued intensities in [0, 255], shape ``(height, width)``."""

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        _check_shape("GrayImage", data, 2)
        if data.min() < 0 or data.max() > 255:
            raise ValueError("GrayImage values must lie in [0, 255]")
        object.__setattr__(self, "data", _frozen(data))


@dataclass(frozen=True, eq=False)
class ScalarPlane(_Raster):
    """Finite real raster used for intermediate fields."""

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        _check_shape("ScalarPlane", data, 2)
        if not np.all(np.isfinite(data)):
            raise ValueError("ScalarPlane values must be finite")
        object.__setattr__(self, "data", _frozen(data))


@dataclass(frozen=True, eq=False)
class EdgeMap(_Raster):
    """Binary raster, ``True`` marks an edge pixel."""

    def __post_init__(self):
        data = np.asarray(self.data).astype(bool, copy=False)
        _check_shape("EdgeMap", data, 2)
        object.__setattr__(self, "data", _frozen(data))

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.data))


AnyImage = Union[ColorImage, GrayImage, EdgeMap]


# --------------------------------------------------------------------------
# decoding
# --------------------------------------------------------------------------

def _read_netpbm(raw: bytes, path: str) -> np.ndarray:
    magic = raw[:2]
    channels = {b"P6": 3, b"P5": 1}.get(magic)
    if channels is None:
        raise UnsupportedFormat(f"{path}: only binary P6/P5 netpbm files are supported, got {magic!r}")

    tokens: list[bytes] = []
    pos = 2
    while len(tokens) < 3:
        if pos >= len(raw):
            raise CorruptData(f"{path}: truncated header")
        ch = raw[pos:pos + 1]
        if ch == b"#":
            end = raw.find(b"\n", pos)
            pos = len(raw) if end < 0 else end + 1
        elif ch.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(raw) and not raw[pos:pos + 1].isspace() and raw[pos:pos + 1] != b"#":
                pos += 1
            tokens.append(raw[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(raw) or not raw[pos:pos + 1].isspace():
        raise CorruptData(f"{path}: missing header terminator")
    pos += 1

    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptData(f"{path}: non-numeric header field") from None
    if width < 1 or height < 1 or maxval < 1:
        raise CorruptData(f"{path}: invalid header values {width}x{height} maxval={maxval}")
    if maxval > 255:
        raise UnsupportedFormat(f"{path}: 16-bit netpbm (maxval={maxval}) is not supported")

    need = width * height * channels
    payload = raw[pos:pos + need]
    if len(payload) != need:
        raise CorruptData(f"{path}: expected {need} payload bytes, found {len(payload)}")
    data = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    if maxval != 255:
        if data.max() > maxval:
            raise CorruptData(f"{path}: sample exceeds maxval {maxval}")
        data = np.rint(data.astype(np.float64) * (255.0 / maxval)).astype(np.uint8)
    if channels == 1:
        data = np.repeat(data, 3, axis=2)
    return data


def _read_png(raw: bytes, path: str) -> np.ndarray:
    # IHDR is always the first chunk: length(4) type(4) width(4) height(4) depth(1)
    if len(raw) < 33 or raw[12:16] != b"IHDR":
        raise CorruptData(f"{path}: missing IHDR chunk")
    if raw[24] == 16:
        raise UnsupportedFormat(f"{path}: 16-bit PNG is not supported")
    try:
        with Image.open(path) as im:
            im.load()
            rgb = im.convert("RGB")
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptData(f"{path}: {exc}") from exc
    return np.asarray(rgb, dtype=np.uint8)


def _read_raster(path) -> np.ndarray:
    path = os.fspath(path)
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw.startswith(_PNG_SIGNATURE):
        return _read_png(raw, path)
    if raw[:1] == b"P":
        return _read_netpbm(raw, path)
    raise UnsupportedFormat(f"{path}: not a PNG or binary PPM/PGM file")


def load_image(path) -> ColorImage:
    """Decode an 8-bit PNG or binary P6/P5 netpbm file.

    Alpha is dropped and grayscale sources are expanded to three equal
    channels.
    """
    return ColorImage(_read_raster(path))


def load_edge_map(path) -> EdgeMap:
    """Read a binary edge map written by :func:`save_image` (white = edge)."""
    data = _read_raster(path)
    return EdgeMap(data.max(axis=2) >= 128)


# --------------------------------------------------------------------------
# encoding
# --------------------------------------------------------------------------

def _as_bytes(img: AnyImage) -> np.ndarray:
    if isinstance(img, ColorImage):
        return img.data
    if isinstance(img, EdgeMap):
        return np.where(img.data, 255, 0).astype(np.uint8)
    if isinstance(img, GrayImage):
        return np.clip(np.rint(img.data), 0, 255).astype(np.uint8)
    raise TypeError(f"cannot save {type(img).__name__}")


def save_image(img: AnyImage, path) -> None:
    """Write ``img`` as PNG, P6 PPM or P5 PGM, chosen by file extension.

    Edge maps are stored as 0 (background) / 255 (edge) grayscale.
    """
    path = os.fspath(path)
    ext = os.path.splitext(path)[1].lower()
    data = _as_bytes(img)
    if ext == ".png":
        Image.fromarray(np.ascontiguousarray(data)).save(path, format="PNG")
        return
    if ext in (".ppm", ".pnm"):
        if data.ndim == 2:
            data = np.repeat(data[..., None], 3, axis=2)
        magic = b"P6"
    elif ext == ".pgm":
        if data.ndim == 3:
            raise UnsupportedFormat(f"{path}: cannot store a color image as PGM")
        magic = b"P5"
    else:
        raise UnsupportedFormat(f"{path}: unknown output extension {ext!r}")
    h, w = data.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"%s\n%d %d\n255\n" % (magic, w, h))
        fh.write(np.ascontiguousarray(data).tobytes())


# --------------------------------------------------------------------------
# conversions and windows
# --------------------------------------------------------------------------

def to_grayscale(img: ColorImage) -> GrayImage:
    """BT.601 luma, kept real-valued.

    The weighted sum is formed on integers and divided once, so two pixels
    with equal integer luma map to bit-identical gray values.
    """
    rgb = img.data.astype(np.int64)
    luma = 299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]
    return GrayImage(luma / 1000.0)


def extract_window(img: ColorImage, x: int, y: int, policy: BorderPolicy = BorderPolicy.REPLICATE) -> np.ndarray:
    """Return the 3x3 neighbourhood of ``(x, y)`` as a ``(9, 3)`` int array.

    Cells are row-major, the centre pixel is index 4.
    """
    if not (0 <= x < img.width and 0 <= y < img.height):
        raise OutOfBounds(f"({x}, {y}) outside {img.width}x{img.height} image")
    policy = BorderPolicy.parse(policy)
    if 1 <= x < img.width - 1 and 1 <= y < img.height - 1:
        block = img.data[y - 1:y + 2, x - 1:x + 2]
    else:
        # pad only a small neighbourhood around the border pixel
        y0, y1 = max(y - 2, 0), min(y + 3, img.height)
        x0, x1 = max(x - 2, 0), min(x + 3, img.width)
        local = pad(img.data[y0:y1, x0:x1], policy)
        cy, cx = y - y0 + 1, x - x0 + 1
        block = local[cy - 1:cy + 2, cx - 1:cx + 2]
    return block.reshape(9, 3).astype(np.int64)
