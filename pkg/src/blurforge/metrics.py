"""PSNR and SSIM between image pairs, with dataset-level aggregation.

PSNR is computed over all samples and channels jointly after 8-bit
quantization (peak 255), so in-memory and file-based evaluation agree;
identical images score the documented 100 dB cap. SSIM follows the
canonical windowed definition on BT.601 luma scaled to [0, 255]:
Gaussian 11x11 window with sigma 1.5, C1=(0.01*255)^2, C2=(0.03*255)^2,
averaged over valid (unpadded) window positions.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import signal

from .errors import DimensionMismatch, EmptyDataset, ImageTooSmall, MissingFile
from .image import load_image, require_same_shape, to_uint8

PSNR_CAP_DB = 100.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2

_LUMA = np.array([0.299, 0.587, 0.114])


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB, capped at 100 for (near-)identical
    inputs."""
    require_same_shape(a, b)
    qa = to_uint8(a).astype(np.float64)
    qb = to_uint8(b).astype(np.float64)
    mse = float(np.mean((qa - qb) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * math.log10(255.0**2 / mse), PSNR_CAP_DB)


def _luma255(img: np.ndarray) -> np.ndarray:
    if img.ndim == 2:
        return img * 255.0
    return img @ _LUMA * 255.0


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = size // 2
    ax = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sigma**2))
    return g / g.sum()


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean structural similarity over valid window positions."""
    require_same_shape(a, b)
    if min(a.shape[0], a.shape[1]) < SSIM_WINDOW:
        raise ImageTooSmall(
            f"ssim needs min side >= {SSIM_WINDOW}, got {a.shape[1]}x{a.shape[0]}"
        )
    x = _luma255(a)
    y = _luma255(b)
    w = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)

    def smooth(z):
        return signal.fftconvolve(z, w, mode="valid")

    mu_x = smooth(x)
    mu_y = smooth(y)
    var_x = smooth(x * x) - mu_x * mu_x
    var_y = smooth(y * y) - mu_y * mu_y
    cov = smooth(x * y) - mu_x * mu_y

    num = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (var_x + var_y + SSIM_C2)
    return float(np.mean(num / den))


@dataclass(frozen=True)
class PairMetrics:
    pair_id: str
    psnr_db: float
    ssim: float


@dataclass
class MetricReport:
    """Per-pair metrics plus arithmetic means over the successful pairs."""

    per_pair: list[PairMetrics] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def mean_psnr_db(self) -> float | None:
        if not self.per_pair:
            return None
        return sum(p.psnr_db for p in self.per_pair) / len(self.per_pair)

    @property
    def mean_ssim(self) -> float | None:
        if not self.per_pair:
            return None
        return sum(p.ssim for p in self.per_pair) / len(self.per_pair)

    def to_json_dict(self) -> dict:
        return {
            "pairs": [
                {"pair_id": p.pair_id, "psnr_db": p.psnr_db, "ssim": p.ssim}
                for p in self.per_pair
            ],
            "mean_psnr_db": self.mean_psnr_db,
            "mean_ssim": self.mean_ssim,
            "failures": [{"pair_id": pid, "error": msg} for pid, msg in self.failures],
            "num_pairs": len(self.per_pair),
        }


def evaluate_pair_files(pairs: list[tuple[str, Path, Path]]) -> MetricReport:
    """Score (pair_id, path_a, path_b) triples; failures are recorded and
    the run continues. Pairs are processed in pair-id order."""
    if not pairs:
        raise EmptyDataset("no pairs to evaluate")
    report = MetricReport()
    for pair_id, path_a, path_b in sorted(pairs, key=lambda t: t[0]):
        try:
            if not Path(path_a).is_file():
                raise MissingFile(str(path_a))
            if not Path(path_b).is_file():
                raise MissingFile(str(path_b))
            img_a = load_image(path_a)
            img_b = load_image(path_b)
            report.per_pair.append(
                PairMetrics(pair_id, psnr(img_a, img_b), ssim(img_a, img_b))
            )
        except (MissingFile, DimensionMismatch, ImageTooSmall, OSError) as exc:
            report.failures.append((pair_id, f"{type(exc).__name__}: {exc}"))
    return report


def evaluate_dirs(dir_a: str | Path, dir_b: str | Path) -> MetricReport:
    """Pair images of two directories by filename and score them."""
    dir_a, dir_b = Path(dir_a), Path(dir_b)
    names = sorted(
        p.name for p in dir_a.iterdir()
        if p.is_file() and p.suffix.lower() in {".png", ".jpg", ".jpeg"}
    )
    pairs = [(Path(n).stem, dir_a / n, dir_b / n) for n in names]
    return evaluate_pair_files(pairs)


def write_csv(report: MetricReport, path: str | Path) -> None:
    """pair_id,psnr_db,ssim rows plus a final mean row."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_id", "psnr_db", "ssim"])
        for p in report.per_pair:
            writer.writerow([p.pair_id, f"{p.psnr_db:.6f}", f"{p.ssim:.6f}"])
        mean_p = report.mean_psnr_db
        mean_s = report.mean_ssim
        writer.writerow(
            [
                "mean",
                "" if mean_p is None else f"{mean_p:.6f}",
                "" if mean_s is None else f"{mean_s:.6f}",
            ]
        )


def write_json(report: MetricReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="ascii"
    )
