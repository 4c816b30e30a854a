"""Figure rendering for metric reports.

Renders distribution figures next to the CSV/JSON output so a dataset
evaluation can be eyeballed without loading the numbers elsewhere.
Uses the Agg backend; safe on headless machines.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import MetricReport  # noqa: E402


def render_metric_figures(
    report: MetricReport, out_dir: str | Path, prefix: str = "metrics"
) -> list[Path]:
    """Write PSNR/SSIM histograms and a scatter to ``out_dir``.

    Returns the written paths; an empty report produces no figures.
    """
    if not report.per_pair:
        return []
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    psnrs = [p.psnr_db for p in report.per_pair]
    ssims = [p.ssim for p in report.per_pair]
    written = []

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(psnrs, bins=min(30, max(5, len(psnrs) // 2 + 1)), color="steelblue")
    ax.axvline(report.mean_psnr_db, color="crimson", linestyle="--",
               label=f"mean {report.mean_psnr_db:.2f} dB")
    ax.set_xlabel("PSNR (dB)")
    ax.set_ylabel("pairs")
    ax.set_title("PSNR distribution")
    ax.legend()
    path = out_dir / f"{prefix}_psnr_hist.png"
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(ssims, bins=min(30, max(5, len(ssims) // 2 + 1)), color="seagreen")
    ax.axvline(report.mean_ssim, color="crimson", linestyle="--",
               label=f"mean {report.mean_ssim:.4f}")
    ax.set_xlabel("SSIM")
    ax.set_ylabel("pairs")
    ax.set_title("SSIM distribution")
    ax.legend()
    path = out_dir / f"{prefix}_ssim_hist.png"
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(psnrs, ssims, s=12, alpha=0.7, color="dimgray")
    ax.set_xlabel("PSNR (dB)")
    ax.set_ylabel("SSIM")
    ax.set_title("PSNR vs SSIM per pair")
    path = out_dir / f"{prefix}_psnr_vs_ssim.png"
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    return written
