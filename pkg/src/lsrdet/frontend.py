"""Heatmap/tangent-field sources: image gradients or LSDF files."""

from __future__ import annotations

import os
import struct

import cv2
import numpy as np

from .core import PI, HeatmapField, LineDetectionError

LSDF_MAGIC = b"LSDF1\n"
_HEADER = struct.Struct("<II")
# 2**28 pixels is 2 GiB of payload
MAX_PIXELS = 1 << 28

# Segments found on a gradient field are shifted by this much: the 2x2
# difference at (x, y) estimates the gradient at (x + 0.5, y + 0.5).
GRADIENT_OFFSET = 0.5


class ImageReadError(LineDetectionError, OSError):
    pass


class LSDFError(LineDetectionError, ValueError):
    """Malformed LSDF file. ``code`` identifies the failure."""

    code = "lsdf"


class BadMagicError(LSDFError):
    code = "bad_magic"


class DimensionOverflowError(LSDFError):
    code = "dimension_overflow"


class TruncatedPayloadError(LSDFError):
    code = "truncated"


class TrailingBytesError(LSDFError):
    code = "trailing_bytes"


class MaskRangeError(LSDFError):
    code = "mask_range"


class AngleRangeError(LSDFError):
    code = "angle_range"


def to_gray(img: np.ndarray) -> np.ndarray:
    """Convert an image array to float32 intensities in [0, 1].

    Integer arrays are scaled by 1/255; colour images are reduced to luminance.
    """
    a = np.asarray(img)
    if a.ndim == 3:
        if a.shape[2] == 4:
            a = a[..., :3]
        if a.dtype != np.uint8:
            a = a.astype(np.float32)
        a = cv2.cvtColor(a, cv2.COLOR_BGR2GRAY)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {a.shape}")
    if a.dtype == np.uint8:
        return a.astype(np.float32) * np.float32(1.0 / 255.0)
    out = a.astype(np.float32)
    if out.size and (out.min() < 0.0 or out.max() > 1.0):
        raise ValueError("float intensities must lie in [0, 1]")
    return out


def load_image(path) -> np.ndarray:
    img = cv2.imread(os.fspath(path), cv2.IMREAD_GRAYSCALE)
    if img is None:
        raise ImageReadError(f"cannot read image {path}")
    return to_gray(img)


def resize_to_input(img: np.ndarray, side: int = 288) -> np.ndarray:
    """Bilinear resample to ``side x side`` (half-pixel-center alignment)."""
    if side < 2:
        raise ValueError("side must be >= 2")
    a = np.asarray(img, dtype=np.float32)
    if a.shape == (side, side):
        return a.copy()
    out = cv2.resize(a, (side, side), interpolation=cv2.INTER_LINEAR)
    return np.clip(out, 0.0, 1.0)


def image_gradient(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """2x2 forward-difference gradient ``(gx, gy)`` of shape ``(h-1, w-1)``."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 2 or a.shape[1] < 2:
        raise ValueError("image must be at least 2x2")
    tl, tr = a[:-1, :-1], a[:-1, 1:]
    bl, br = a[1:, :-1], a[1:, 1:]
    com1 = br - tl
    com2 = tr - bl
    return 0.5 * (com1 + com2), 0.5 * (com1 - com2)


def gradient_field(img: np.ndarray) -> HeatmapField:
    """Heatmap from gradient magnitude, tangent field from gradient direction.

    Magnitude is normalised by its image maximum. The level-line angle is
    the gradient direction rotated by pi/2. Pixels with zero gradient get
    angle 0; the last row and column replicate their neighbours.
    """
    gx, gy = image_gradient(img)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    mask = mag / peak if peak > 0 else np.zeros_like(mag)
    angle = np.where(mag > 0, np.arctan2(gy, gx) + 0.5 * PI, 0.0)
    mask = np.pad(mask, ((0, 1), (0, 1)), mode="edge")
    angle = np.pad(angle, ((0, 1), (0, 1)), mode="edge")
    return HeatmapField(np.clip(mask, 0.0, 1.0), angle)


def encode_lsdf(hf: HeatmapField) -> bytes:
    h, w = hf.shape
    return b"".join(
        (
            LSDF_MAGIC,
            _HEADER.pack(w, h),
            hf.mask.astype("<f4").tobytes(),
            hf.field.astype("<f4").tobytes(),
        )
    )


def decode_lsdf(buf: bytes) -> HeatmapField:
    if len(buf) < len(LSDF_MAGIC) or buf[: len(LSDF_MAGIC)] != LSDF_MAGIC:
        raise BadMagicError("not an LSDF file")
    off = len(LSDF_MAGIC)
    if len(buf) < off + _HEADER.size:
        raise TruncatedPayloadError("header truncated")
    w, h = _HEADER.unpack_from(buf, off)
    off += _HEADER.size
    if w < 1 or h < 1 or w * h > MAX_PIXELS:
        raise DimensionOverflowError(f"unsupported dimensions {w}x{h}")
    n = w * h
    expected = off + 8 * n
    if len(buf) < expected:
        raise TruncatedPayloadError(f"payload has {len(buf) - off} bytes, expected {8 * n}")
    if len(buf) > expected:
        raise TrailingBytesError(f"{len(buf) - expected} bytes after payload")
    mask = np.frombuffer(buf, "<f4", n, off).reshape(h, w)
    angle = np.frombuffer(buf, "<f4", n, off + 4 * n).reshape(h, w)
    if not (np.all(mask >= 0.0) and np.all(mask <= 1.0)):
        raise MaskRangeError("mask values outside [0, 1]")
    if not (np.all(angle >= 0.0) and np.all(angle.astype(np.float64) < PI)):
        raise AngleRangeError("angles outside [0, pi)")
    return HeatmapField(mask, angle)


def save_field(hf: HeatmapField, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_lsdf(hf))


def load_field(path) -> HeatmapField:
    with open(path, "rb") as fh:
        return decode_lsdf(fh.read())
