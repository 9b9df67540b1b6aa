"""PGM / PFM readers and writers.

Only binary PGM (P5, plus P6 converted to gray) and single channel PFM are
handled. PNG files from the Middlebury archive have to be converted first,
see ``scripts/convert_middlebury.py``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .errors import FormatError, ParameterError

INVALID = -1


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale raster, row-major, shape (height, width)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.uint8)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParameterError(f"GrayImage needs a non-empty 2-D array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class FloatImage:
    """32-bit float raster; non-finite samples mean "unknown"."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParameterError(f"FloatImage needs a non-empty 2-D array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


def as_array(img) -> np.ndarray:
    """Return the pixel array of a GrayImage/FloatImage, or the input itself."""
    if isinstance(img, (GrayImage, FloatImage)):
        return img.data
    return np.asarray(img)


def _read_token(f: BinaryIO, field: str) -> bytes:
    # netpbm tokens are whitespace separated; '#' starts a comment up to end of line
    tok = bytearray()
    while True:
        c = f.read(1)
        if not c:
            raise FormatError(f"unexpected end of file while reading {field}")
        if c == b"#" and not tok:
            while c not in (b"\n", b"\r", b""):
                c = f.read(1)
            continue
        if c.isspace():
            if tok:
                return bytes(tok)
            continue
        tok += c


def _read_int(f: BinaryIO, field: str) -> int:
    tok = _read_token(f, field)
    try:
        value = int(tok)
    except ValueError:
        raise FormatError(f"{field} is not an integer: {tok!r}") from None
    if value <= 0:
        raise FormatError(f"{field} must be positive, got {value}")
    return value


def load_pgm(path) -> GrayImage:
    with open(path, "rb") as f:
        magic = f.read(2)
        if magic not in (b"P5", b"P6"):
            raise FormatError(f"magic: expected P5 or P6, got {magic!r}")
        width = _read_int(f, "width")
        height = _read_int(f, "height")
        maxval = _read_int(f, "maxval")
        if maxval > 255:
            raise FormatError(f"maxval: {maxval} > 255 is not supported")
        channels = 3 if magic == b"P6" else 1
        n = width * height * channels
        payload = f.read(n)
    if len(payload) != n:
        raise FormatError(f"payload: expected {n} bytes, got {len(payload)}")
    pix = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        return GrayImage(pix.reshape(height, width))
    rgb = pix.reshape(height, width, 3).astype(np.uint32)
    gray = (77 * rgb[..., 0] + 150 * rgb[..., 1] + 29 * rgb[..., 2]) >> 8
    return GrayImage(gray.astype(np.uint8))


def save_pgm(img: GrayImage, path) -> None:
    arr = np.ascontiguousarray(as_array(img), dtype=np.uint8)
    h, w = arr.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(arr.tobytes())


def load_pfm(path) -> FloatImage:
    with open(path, "rb") as f:
        magic = _read_token(f, "magic")
        if magic == b"PF":
            raise FormatError("channels: colour PFM ('PF') is not supported")
        if magic != b"Pf":
            raise FormatError(f"magic: expected 'Pf', got {magic!r}")
        width = _read_int(f, "width")
        height = _read_int(f, "height")
        scale_tok = _read_token(f, "scale")
        try:
            scale = float(scale_tok)
        except ValueError:
            raise FormatError(f"scale is not a number: {scale_tok!r}") from None
        if scale == 0 or not np.isfinite(scale):
            raise FormatError(f"scale must be finite and nonzero, got {scale}")
        n = width * height
        payload = f.read(4 * n)
    if len(payload) != 4 * n:
        raise FormatError(f"payload: expected {4 * n} bytes, got {len(payload)}")
    dtype = "<f4" if scale < 0 else ">f4"
    arr = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return FloatImage(np.flipud(arr).astype(np.float32))


def save_pfm(img: FloatImage, path, little_endian: bool = True) -> None:
    arr = np.asarray(as_array(img), dtype=np.float32)
    h, w = arr.shape
    scale = -1.0 if little_endian else 1.0
    dtype = "<f4" if little_endian else ">f4"
    with open(path, "wb") as f:
        f.write(f"Pf\n{w} {h}\n{scale}\n".encode("ascii"))
        f.write(np.flipud(arr).astype(dtype).tobytes())


def save_disparity(disp: np.ndarray, path, scale: int = 1) -> None:
    """Write a disparity map as 8-bit PGM with value ``disparity * scale``.

    INVALID pixels are written as 0.
    """
    disp = np.asarray(disp)
    if scale < 1:
        raise ParameterError(f"scale must be >= 1, got {scale}")
    valid = disp != INVALID
    peak = int(disp[valid].max()) if valid.any() else 0
    if peak * scale > 255:
        raise ParameterError(f"disparity {peak} * scale {scale} overflows 8 bits")
    out = np.where(valid, disp * scale, 0).astype(np.uint8)
    save_pgm(GrayImage(out), path)


def save_disparity16(disp: np.ndarray, path) -> None:
    """Raw little-endian uint16 dump; INVALID becomes 0xFFFF."""
    disp = np.asarray(disp)
    out = np.where(disp == INVALID, 0xFFFF, disp).astype("<u2")
    with open(path, "wb") as f:
        f.write(out.tobytes())


def ensure_parent(path) -> None:
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
