"""Blur kernels rasterized from trajectories.

A kernel is a non-negative, unit-sum weight grid on an odd-sided square
canvas. Rasterization centers the trajectory's bounding box on the canvas
and splats each of the M samples with weight 1/M bilinearly over its four
neighboring pixels: a sample at continuous position (px, py) contributes
(1-fx)(1-fy), fx(1-fy), (1-fx)fy and fx*fy to the pixels around it, where
fx, fy are the fractional coordinates. Bilinear weights always sum to 1,
so the raw deposited mass is exactly 1; a final renormalization absorbs
floating-point drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CanvasTooSmall, MalformedKernelFile
from .image import save_png
from .trajectory import Trajectory

_MAGIC = "KERN1"
_SUM_TOL = 1e-6


@dataclass(frozen=True)
class BlurKernel:
    """Odd-sided, non-negative, unit-sum point-spread function."""

    weights: np.ndarray  # float64, shape (height, width)

    @property
    def height(self) -> int:
        return self.weights.shape[0]

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    def __post_init__(self):
        w = self.weights
        if w.ndim != 2:
            raise ValueError(f"kernel weights must be 2-D, got shape {w.shape}")
        if w.shape[0] % 2 == 0 or w.shape[1] % 2 == 0:
            raise ValueError(f"kernel sides must be odd, got {w.shape}")
        if np.any(w < 0):
            raise ValueError("kernel weights must be non-negative")
        total = float(w.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"kernel weights must sum to 1, got {total}")


def delta_kernel(side: int = 3) -> BlurKernel:
    """Identity kernel: all weight at the canvas center."""
    if side < 1 or side % 2 == 0:
        raise ValueError(f"side must be odd and positive, got {side}")
    w = np.zeros((side, side))
    w[side // 2, side // 2] = 1.0
    return BlurKernel(weights=w)


def auto_canvas(traj: Trajectory) -> int:
    """Smallest odd side fitting the centered trajectory plus a 1px margin."""
    re = traj.samples.real
    im = traj.samples.imag
    extent = max(float(re.max() - re.min()), float(im.max() - im.min()))
    side = math.ceil(extent) + 2
    return side if side % 2 == 1 else side + 1


def rasterize(traj: Trajectory, canvas: int | None = None) -> BlurKernel:
    """Splat a trajectory into a normalized kernel.

    The trajectory is translated so its bounding-box center lands on the
    canvas center; integer translations of the input therefore change
    nothing. With an explicit canvas the centered path must fit with at
    least a 1-pixel margin, else CanvasTooSmall reports the minimum side.
    """
    required = auto_canvas(traj)
    if canvas is None:
        side = required
    else:
        if canvas < 1 or canvas % 2 == 0:
            raise ValueError(f"canvas must be odd and positive, got {canvas}")
        if canvas < required:
            raise CanvasTooSmall(canvas, required)
        side = canvas

    grid = _splat(traj, side)
    grid /= grid.sum()
    return BlurKernel(weights=grid)


def _splat(traj: Trajectory, side: int) -> np.ndarray:
    """Raw bilinear deposit grid, total mass 1 before renormalization."""
    re = traj.samples.real
    im = traj.samples.imag
    center = (side - 1) / 2.0
    px = re - (re.max() + re.min()) / 2.0 + center
    py = im - (im.max() + im.min()) / 2.0 + center

    ix = np.floor(px).astype(np.intp)
    iy = np.floor(py).astype(np.intp)
    fx = px - ix
    fy = py - iy

    w = 1.0 / traj.samples.size
    grid = np.zeros((side, side))
    np.add.at(grid, (iy, ix), w * (1.0 - fx) * (1.0 - fy))
    np.add.at(grid, (iy, ix + 1), w * fx * (1.0 - fy))
    np.add.at(grid, (iy + 1, ix), w * (1.0 - fx) * fy)
    np.add.at(grid, (iy + 1, ix + 1), w * fx * fy)
    return grid


def write_kernel(kernel: BlurKernel, path: str | Path) -> None:
    """Write the text format: magic, "width height", one row per line with
    17-significant-digit weights (lossless for float64)."""
    lines = [_MAGIC, f"{kernel.width} {kernel.height}"]
    for row in kernel.weights:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_kernel(path: str | Path) -> BlurKernel:
    """Parse a kernel file; malformed content raises MalformedKernelFile."""
    try:
        text = Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise MalformedKernelFile(f"{path}: not an ASCII kernel file") from exc
    lines = text.splitlines()
    if not lines or lines[0] != _MAGIC:
        raise MalformedKernelFile(f"{path}: bad magic, expected {_MAGIC!r}")
    if len(lines) < 2:
        raise MalformedKernelFile(f"{path}: missing dimension line")
    try:
        width, height = (int(tok) for tok in lines[1].split())
    except ValueError as exc:
        raise MalformedKernelFile(f"{path}: bad dimension line {lines[1]!r}") from exc
    if width < 1 or height < 1 or width % 2 == 0 or height % 2 == 0:
        raise MalformedKernelFile(f"{path}: sides must be odd, got {width}x{height}")
    rows = lines[2:]
    if len(rows) != height:
        raise MalformedKernelFile(
            f"{path}: expected {height} weight rows, found {len(rows)}"
        )
    weights = np.empty((height, width))
    for j, row in enumerate(rows):
        toks = row.split()
        if len(toks) != width:
            raise MalformedKernelFile(
                f"{path}: row {j} has {len(toks)} values, expected {width}"
            )
        try:
            weights[j] = [float(tok) for tok in toks]
        except ValueError as exc:
            raise MalformedKernelFile(f"{path}: row {j} has a non-numeric value") from exc
    if np.any(weights < 0):
        raise MalformedKernelFile(f"{path}: negative weight")
    total = float(weights.sum())
    if abs(total - 1.0) > _SUM_TOL:
        raise MalformedKernelFile(f"{path}: weights sum to {total}, expected 1")
    return BlurKernel(weights=weights)


def kernel_preview(kernel: BlurKernel, path: str | Path) -> None:
    """Render an 8-bit grayscale PNG with the peak weight mapped to 255."""
    peak = float(kernel.weights.max())
    scaled = kernel.weights / peak if peak > 0 else kernel.weights
    save_png(scaled, path)
