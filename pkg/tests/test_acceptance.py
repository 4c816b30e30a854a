"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; any failure shows up as a normal pytest failure.
"""

import math
import time

import numpy as np
import pytest

from blurforge.cli import run
from blurforge.convolve import NoiseSpec, apply_blur, convolve_fast
from blurforge.image import save_png
from blurforge.kernel import BlurKernel, delta_kernel, rasterize
from blurforge.framesim import FrameWindow, simulate_frame_blur
from blurforge.image import to_uint8
from blurforge.metrics import PSNR_CAP_DB, psnr, ssim
from blurforge.pipeline import read_manifest, validate_manifest
from blurforge.rng import child_rng, make_rng
from blurforge.trajectory import (
    TrajectoryParams,
    generate_trajectory,
    path_length,
    sample_params,
)

from oracles import conv_reference, is_4connected, psnr_reference, ssim_reference, support_iou


def _report(number: int, text: str) -> None:
    print(f"ACCEPTANCE {number:2d} PASS: {text}")


def _random_trajectory(master: int, index: int):
    rng = child_rng(master, index)
    params = sample_params(rng)
    return generate_trajectory(params, rng)


@pytest.fixture(scope="module")
def dataset_runs(tmp_path_factory):
    """20-image 512x512 input built three ways for criteria 9 and 10."""
    root = tmp_path_factory.mktemp("acceptance_ds")
    inputs = root / "inputs"
    inputs.mkdir()
    rng = np.random.default_rng(20240601)
    for i in range(20):
        save_png(rng.random((512, 512, 3)), inputs / f"img{i:02d}.png")

    elapsed = {}
    outputs = {}
    for label, workers in (("run_a", 1), ("run_b", 1), ("run_c", 4)):
        out = root / label
        t0 = time.perf_counter()
        code = run([
            "dataset", "--input", str(inputs), "--output", str(out),
            "--patch", "256", "--seed", "31337", "--workers", str(workers),
        ])
        elapsed[label] = time.perf_counter() - t0
        assert code == 0
        outputs[label] = out
    return outputs, elapsed


def test_c01_trajectory_conservation():
    t0 = time.perf_counter()
    for index in range(1000):
        traj = _random_trajectory(1001, index)
        assert abs(path_length(traj) - 60.0) <= 60.0 * 1e-9
        assert np.abs(traj.samples).max() <= 60.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    _report(1, f"1000 trajectories conserve length 60 (in {elapsed:.2f}s)")


def test_c02_straight_line_limit():
    for phi in (0.0, 0.3, math.pi / 2, 2.0, 5.5):
        params = TrajectoryParams(impulse_prob=0.0, initial_angle=phi)
        traj = generate_trajectory(params, make_rng(0))
        endpoint = traj.samples[-1]
        assert abs(endpoint - 60.0 * np.exp(1j * phi)) <= 1e-9
        steps = np.abs(np.diff(traj.samples))
        assert np.allclose(steps, 60.0 / 1999, rtol=1e-12)
    _report(2, "unperturbed walks are straight segments of length 60")


def test_c03_kernel_normalization():
    for index in range(1000):
        kernel = rasterize(_random_trajectory(3003, index))
        assert abs(kernel.weights.sum() - 1.0) <= 1e-9
        assert kernel.weights.min() >= 0.0
        assert kernel.width % 2 == 1 and kernel.height % 2 == 1
        assert is_4connected(kernel.weights > 0)
    _report(3, "1000 kernels: unit sum, non-negative, odd, 4-connected")


def test_c04_kernel_diversity():
    kernels = [rasterize(_random_trajectory(4004, i)) for i in range(100)]
    supports = [int(np.count_nonzero(k.weights)) for k in kernels]
    big_enough = sum(1 for s in supports if s >= 30)
    assert big_enough >= 90
    ious = [
        support_iou(kernels[a].weights, kernels[b].weights)
        for a in range(100)
        for b in range(a + 1, 100)
    ]
    median_iou = float(np.median(ious))
    assert median_iou < 0.5
    _report(4, f"{big_enough}/100 supports >= 30 px, median IoU {median_iou:.3f}")


def test_c05_convolution_oracle_equivalence():
    rng = np.random.default_rng(5005)
    t0 = time.perf_counter()
    for _ in range(200):
        h = int(rng.integers(8, 65))
        w = int(rng.integers(8, 65))
        kside = int(rng.choice([1, 3, 5, 9, 15, 21, 31]))
        img = rng.random((h, w))
        kw = rng.random((kside, kside))
        kernel = BlurKernel(weights=kw / kw.sum())
        expected = conv_reference(img, kernel.weights)
        got = convolve_fast(img, kernel)
        assert np.abs(got - expected).max() <= 1e-5
    img = rng.random((32, 48, 3))
    assert np.array_equal(convolve_fast(img, delta_kernel(9)), img)
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _report(5, f"200 cases within 1e-5 of brute-force oracle (in {elapsed:.1f}s)")


def test_c06_noise_standard_deviation():
    img = np.full((1000, 1000), 0.5)
    out = apply_blur(img, delta_kernel(3), NoiseSpec(0.1, 606))
    std = float(out.std())
    assert abs(std - 0.1) <= 0.002
    _report(6, f"sigma=0.1 noise gives sample std {std:.5f} over 1e6 samples")


def test_c07_frame_averaging_closed_form():
    a = np.full((8, 8), 0.2)
    b = np.full((8, 8), 0.8)
    blurred, _ = simulate_frame_blur(FrameWindow(frames=[a, b], gamma=2.2))
    expected = ((0.2**2.2 + 0.8**2.2) / 2.0) ** (1.0 / 2.2)
    assert np.abs(blurred - expected).max() <= 1e-6

    frame = np.random.default_rng(707).random((16, 16, 3))
    blurred1, sharp1 = simulate_frame_blur(FrameWindow(frames=[frame]))
    assert np.array_equal(sharp1, frame)
    delta = np.abs(to_uint8(blurred1).astype(int) - to_uint8(frame).astype(int))
    assert delta.max() <= 1
    _report(7, f"two-frame average hits closed form {expected:.6f}; n=1 is identity")


def test_c08_metric_closed_forms_and_oracles():
    rng = np.random.default_rng(808)

    base = rng.integers(0, 240, size=(48, 48, 3)).astype(np.float64)
    value = psnr(base / 255.0, (base + 16) / 255.0)
    assert abs(value - 24.048) <= 0.001

    mu_a = np.full((16, 16), 100 / 255.0)
    mu_b = np.full((16, 16), 150 / 255.0)
    assert abs(ssim(mu_a, mu_b) - 0.9231) <= 0.0001

    for _ in range(50):
        img = rng.random((24, 24, 3))
        assert psnr(img, img) == PSNR_CAP_DB
        assert ssim(img, img) == 1.0

    for _ in range(50):
        a = rng.random((64, 64, 3))
        b = np.clip(a + rng.normal(0, 0.08, a.shape), 0, 1)
        assert abs(psnr(a, b) - psnr_reference(a, b)) <= 1e-6
        assert abs(ssim(a, b) - ssim_reference(a, b)) <= 1e-6
    _report(8, "PSNR/SSIM closed forms, self-identities, and oracle matches")


def test_c09_pipeline_determinism(dataset_runs):
    outputs, elapsed = dataset_runs

    def contents(root):
        return {
            str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*"))
            if p.is_file()
        }

    run_a = contents(outputs["run_a"])
    assert run_a == contents(outputs["run_b"])
    assert run_a == contents(outputs["run_c"])
    slowest = max(elapsed.values())
    assert slowest < 60.0
    _report(
        9,
        f"3 runs byte-identical across workers 1 and 4 "
        f"(slowest {slowest:.1f}s for 20 x 512^2 inputs)",
    )


def test_c10_manifest_integrity(dataset_runs):
    outputs, _ = dataset_runs
    for label in ("run_a", "run_c"):
        manifest = read_manifest(outputs[label] / "manifest.jsonl")
        assert len(manifest.records) == 20
        problems = validate_manifest(manifest, outputs[label])
        assert problems == []
    _report(10, "generated manifests re-validate with zero problems")
