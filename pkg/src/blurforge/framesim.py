"""Motion blur from high-frame-rate sequences.

A blurred exposure is simulated by averaging a short run of consecutive
sharp frames in approximately linear light: frames are linearized with a
power of gamma, averaged, and re-encoded with the inverse power. The
ground-truth sharp image is the middle frame of the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InsufficientFrames
from .image import clamp01, load_image

DEFAULT_GAMMA = 2.2
DEFAULT_MIN_FRAMES = 5
DEFAULT_MAX_FRAMES = 25

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


@dataclass
class FrameWindow:
    """A run of same-shape frames to be averaged into one exposure."""

    frames: list[np.ndarray] = field(default_factory=list)
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not self.frames:
            raise ValueError("window needs at least one frame")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        shape = self.frames[0].shape
        for i, f in enumerate(self.frames):
            if f.shape != shape:
                raise DimensionMismatch(
                    f"frame {i} has shape {f.shape}, expected {shape}"
                )

    @property
    def middle_index(self) -> int:
        return len(self.frames) // 2


def simulate_frame_blur(window: FrameWindow) -> tuple[np.ndarray, np.ndarray]:
    """Return (blurred, sharp): gamma-linearized mean, and the middle frame."""
    g = window.gamma
    acc = np.zeros_like(window.frames[0])
    for f in window.frames:
        acc += np.power(f, g)
    blurred = np.power(acc / len(window.frames), 1.0 / g)
    sharp = window.frames[window.middle_index]
    return clamp01(blurred), clamp01(sharp.copy())


def sample_window_indices(
    num_frames: int,
    rng: np.random.Generator,
    n_min: int = DEFAULT_MIN_FRAMES,
    n_max: int = DEFAULT_MAX_FRAMES,
) -> tuple[int, int]:
    """Draw (length, offset) for a contiguous window: length uniform on
    {n_min..n_max}, then offset uniform over valid positions."""
    if not 1 <= n_min <= n_max:
        raise ValueError(f"need 1 <= n_min <= n_max, got {n_min}..{n_max}")
    if num_frames < n_max:
        raise InsufficientFrames(f"have {num_frames} frames, need >= {n_max}")
    n = int(rng.integers(n_min, n_max + 1))
    offset = int(rng.integers(0, num_frames - n + 1))
    return n, offset


def sample_window(
    frames,
    rng: np.random.Generator,
    n_min: int = DEFAULT_MIN_FRAMES,
    n_max: int = DEFAULT_MAX_FRAMES,
    gamma: float = DEFAULT_GAMMA,
) -> FrameWindow:
    """Pick a random contiguous window from an indexable frame sequence."""
    n, offset = sample_window_indices(len(frames), rng, n_min, n_max)
    return FrameWindow(frames=[frames[i] for i in range(offset, offset + n)], gamma=gamma)


def list_frame_files(directory: str | Path) -> list[Path]:
    """Image files of a sequence directory in lexicographic order."""
    root = Path(directory)
    return sorted(
        p for p in root.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )


def load_frames(paths: list[Path]) -> list[np.ndarray]:
    return [load_image(p) for p in paths]
