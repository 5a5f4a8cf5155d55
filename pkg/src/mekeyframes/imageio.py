"""Binary PGM/PPM codec plus optional 8-bit PNG input via Pillow."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .core import Frame
from .errors import CorruptHeader, TruncatedPixels, UnsupportedFormat

_WHITESPACE = b" \t\n\r\v\f"


def _read_header(data: bytes):
    """Parse ``P5``/``P6`` header; returns (magic, width, height, maxval, offset)."""
    if len(data) < 2 or data[:2] not in (b"P5", b"P6"):
        raise UnsupportedFormat(f"not a binary PGM/PPM file (magic {data[:2]!r})")
    pos = 2
    fields = []
    while len(fields) < 3:
        # skip whitespace and comments
        while pos < len(data) and (data[pos] in _WHITESPACE or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < len(data) and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        token = data[start:pos]
        if not token:
            raise CorruptHeader("header ended early")
        if not token.isdigit():
            raise CorruptHeader(f"bad header token {token!r}")
        fields.append(int(token))
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise CorruptHeader("missing whitespace after maxval")
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise CorruptHeader(f"bad dimensions {width}x{height}")
    return data[:2], width, height, maxval, pos + 1


def decode_pnm(data: bytes) -> np.ndarray:
    magic, width, height, maxval, offset = _read_header(data)
    if maxval != 255:
        raise UnsupportedFormat(f"only maxval 255 is supported, got {maxval}")
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    payload = data[offset:offset + need]
    if len(payload) < need:
        raise TruncatedPixels(f"expected {need} pixel bytes, found {len(payload)}")
    arr = np.frombuffer(payload, dtype=np.uint8)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return arr.reshape(shape)


def encode_pnm(pixels: np.ndarray) -> bytes:
    px = np.asarray(pixels)
    if px.dtype != np.uint8:
        if not np.array_equal(px, np.round(px)) or px.min() < 0 or px.max() > 255:
            raise ValueError("PNM export needs integer values in [0, 255]")
        px = px.astype(np.uint8)
    if px.ndim == 2:
        magic = b"P5"
    elif px.ndim == 3 and px.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"cannot encode array of shape {px.shape}")
    h, w = px.shape[:2]
    return magic + b"\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(px).tobytes()


def _decode_png(path: Path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        if im.format != "PNG":
            raise UnsupportedFormat(f"{path} is not a PNG file")
        if im.mode not in ("L", "RGB"):
            raise UnsupportedFormat(f"{path}: PNG mode {im.mode} is not 8-bit gray or RGB")
        return np.asarray(im, dtype=np.uint8).copy()


def load_pixels(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".png":
        return _decode_png(path)
    return decode_pnm(path.read_bytes())


def load_frame(path, keep_color: bool = False) -> Frame:
    """Decode an image file into a :class:`Frame`; RGB is converted to luma
    unless ``keep_color`` is set."""
    frame = Frame(load_pixels(path))
    return frame if keep_color else frame.grayscale()


def write_bytes_atomic(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def save_pnm(path, pixels) -> None:
    write_bytes_atomic(path, encode_pnm(pixels))


def resize(pixels: np.ndarray, width: int, height: int, method: str = "nearest") -> np.ndarray:
    """Resample a (H, W[, C]) array with half-pixel-centred sampling."""
    src = np.asarray(pixels, dtype=np.float64)
    h, w = src.shape[:2]
    ys = (np.arange(height) + 0.5) * h / height - 0.5
    xs = (np.arange(width) + 0.5) * w / width - 0.5
    if method == "nearest":
        yi = np.clip(np.floor(ys + 0.5).astype(int), 0, h - 1)
        xi = np.clip(np.floor(xs + 0.5).astype(int), 0, w - 1)
        return src[yi][:, xi]
    if method != "bilinear":
        raise ValueError(f"unknown resize method {method!r}")
    ys = np.clip(ys, 0, h - 1)
    xs = np.clip(xs, 0, w - 1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    if src.ndim == 3:
        wy, wx = wy[..., None], wx[..., None]
    top = src[y0][:, x0] * (1 - wx) + src[y0][:, x1] * wx
    bot = src[y1][:, x0] * (1 - wx) + src[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy
