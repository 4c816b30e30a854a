"""blurforge: synthetic camera-shake blur kernels, paired sharp/blurred
datasets, and PSNR/SSIM evaluation."""

__version__ = "0.1.0"

from .convolve import NoiseSpec, apply_blur, convolve_fast, convolve_spatial
from .framesim import FrameWindow, sample_window, simulate_frame_blur
from .kernel import BlurKernel, auto_canvas, kernel_preview, rasterize, read_kernel, write_kernel
from .metrics import MetricReport, evaluate_dirs, psnr, ssim
from .rng import child_rng, derive_item_seed, make_rng
from .trajectory import Trajectory, TrajectoryParams, generate_trajectory, sample_params

__all__ = [
    "__version__",
    "NoiseSpec",
    "apply_blur",
    "convolve_fast",
    "convolve_spatial",
    "FrameWindow",
    "sample_window",
    "simulate_frame_blur",
    "BlurKernel",
    "auto_canvas",
    "kernel_preview",
    "rasterize",
    "read_kernel",
    "write_kernel",
    "MetricReport",
    "evaluate_dirs",
    "psnr",
    "ssim",
    "child_rng",
    "derive_item_seed",
    "make_rng",
    "Trajectory",
    "TrajectoryParams",
    "generate_trajectory",
    "sample_params",
]
