"""Image buffers and 8-bit codecs.

Images travel through the toolkit as float64 numpy arrays in [0, 1]:
shape (H, W) for grayscale, (H, W, 3) for RGB. The 8-bit codec sits at
the file boundary only; PNG is read/write, JPEG read-only.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionMismatch


def check_image(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate buffer conventions; returns the array unchanged."""
    if img.ndim not in (2, 3):
        raise ValueError(f"{name} must be 2-D or 3-D, got shape {img.shape}")
    if img.ndim == 3 and img.shape[2] != 3:
        raise ValueError(f"{name} must have 1 or 3 channels, got {img.shape[2]}")
    return img


def clamp01(img: np.ndarray) -> np.ndarray:
    return np.clip(img, 0.0, 1.0)


def to_uint8(img: np.ndarray) -> np.ndarray:
    """Quantize [0,1] floats to 8-bit, round-half-even like the PNG writer."""
    return np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)


def from_uint8(arr: np.ndarray) -> np.ndarray:
    return arr.astype(np.float64) / 255.0


def load_image(path: str | Path) -> np.ndarray:
    """Decode a PNG or JPEG file to a float buffer (grayscale or RGB)."""
    with Image.open(path) as im:
        if im.mode == "L":
            arr = np.asarray(im, dtype=np.uint8)
        else:
            arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return from_uint8(arr)


def save_png(img: np.ndarray, path: str | Path) -> None:
    """Encode a float buffer as an 8-bit grayscale or RGB PNG."""
    check_image(img)
    arr = to_uint8(img)
    mode = "L" if arr.ndim == 2 else "RGB"
    Image.fromarray(arr, mode=mode).save(path, format="PNG")


def crop(img: np.ndarray, x: int, y: int, w: int, h: int) -> np.ndarray:
    """Cut the (x, y, w, h) window; raises if it leaves the image."""
    height, width = img.shape[:2]
    if x < 0 or y < 0 or x + w > width or y + h > height:
        raise ValueError(
            f"crop ({x},{y},{w},{h}) outside image {width}x{height}"
        )
    return img[y : y + h, x : x + w].copy()


def downscale_box(img: np.ndarray, factor: int) -> np.ndarray:
    """Integer box-filter downscale; trailing rows/cols that do not fill a
    full box are dropped."""
    if factor < 1:
        raise ValueError(f"downscale factor must be >= 1, got {factor}")
    if factor == 1:
        return img
    h, w = img.shape[:2]
    h2, w2 = h // factor, w // factor
    if h2 == 0 or w2 == 0:
        raise ValueError(f"image {w}x{h} too small for downscale factor {factor}")
    trimmed = img[: h2 * factor, : w2 * factor]
    if img.ndim == 2:
        boxes = trimmed.reshape(h2, factor, w2, factor)
        return boxes.mean(axis=(1, 3))
    boxes = trimmed.reshape(h2, factor, w2, factor, img.shape[2])
    return boxes.mean(axis=(1, 3))


def require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
