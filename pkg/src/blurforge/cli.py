"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 runtime failure. All randomness
flows from --seed; the BLURFORGE_SEED environment variable is used as a
fallback when the flag is absent.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .convolve import NoiseSpec, apply_blur
from .errors import BlurforgeError
from .framesim import FrameWindow, list_frame_files, sample_window_indices, simulate_frame_blur
from .image import load_image, save_png
from .kernel import kernel_preview, rasterize, read_kernel, write_kernel
from .metrics import evaluate_dirs, evaluate_pair_files, write_csv, write_json
from .pipeline import (
    DatasetConfig,
    FramesimConfig,
    build_dataset,
    build_framesim_dataset,
    read_manifest,
)
from .rng import make_rng
from .trajectory import (
    DEFAULT_IMPULSE_PROB,
    DEFAULT_ITERATIONS,
    DEFAULT_MAX_LENGTH,
    TrajectoryParams,
    generate_trajectory,
    sample_params,
    save_trajectory,
)

log = logging.getLogger("blurforge")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="blurforge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"blurforge {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="increase log detail"
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("kernel", help="generate a random blur kernel")
    p.add_argument("--seed", type=int, help="RNG seed (or BLURFORGE_SEED)")
    p.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS,
                   help="trajectory samples (default: %(default)s)")
    p.add_argument("--max-length", type=float, default=DEFAULT_MAX_LENGTH,
                   help="total path length in px (default: %(default)s)")
    p.add_argument("--impulse-prob", type=float, default=DEFAULT_IMPULSE_PROB,
                   help="impulsive shake probability (default: %(default)s)")
    p.add_argument("--inertia", type=float, default=None,
                   help="centripetal pull weight (default: sampled from (0,0.7))")
    p.add_argument("--big-shake-prob", type=float, default=None,
                   help="big shake weight (default: sampled from (0,0.2))")
    p.add_argument("--gaussian-shake-prob", type=float, default=None,
                   help="gaussian shake weight (default: sampled from (0,0.7))")
    p.add_argument("--angle", type=float, default=None,
                   help="initial angle in radians (default: sampled from (0,2pi))")
    p.add_argument("--canvas", type=int, default=None,
                   help="odd kernel side (default: auto-sized)")
    p.add_argument("--out", required=True, help="kernel file to write")
    p.add_argument("--preview", default=None, help="grayscale PNG preview path")
    p.add_argument("--trajectory", default=None, help="trajectory text dump path")

    p = sub.add_parser("blur", help="blur an image with a kernel file")
    p.add_argument("--image", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--noise-sigma", type=float, default=0.0,
                   help="additive gaussian noise std (default: %(default)s)")
    p.add_argument("--seed", type=int, help="noise seed (required if sigma > 0)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="average a random frame window into a blurred/sharp pair")
    p.add_argument("--frames", required=True, help="directory of sharp frames")
    p.add_argument("--min-frames", type=int, default=5,
                   help="minimum window length (default: %(default)s)")
    p.add_argument("--max-frames", type=int, default=25,
                   help="maximum window length (default: %(default)s)")
    p.add_argument("--gamma", type=float, default=2.2,
                   help="gamma for linear-light averaging (default: %(default)s)")
    p.add_argument("--seed", type=int, help="RNG seed (or BLURFORGE_SEED)")
    p.add_argument("--out-blurred", required=True)
    p.add_argument("--out-sharp", required=True)

    p = sub.add_parser("dataset", help="build a paired dataset from sharp images")
    p.add_argument("--input", required=True, help="directory of sharp images")
    p.add_argument("--output", required=True, help="output dataset directory")
    p.add_argument("--patch", type=int, default=256,
                   help="square patch side (default: %(default)s)")
    p.add_argument("--patches-per-image", type=int, default=1,
                   help="patches per input image (default: %(default)s)")
    p.add_argument("--downscale", type=int, default=1,
                   help="integer box downscale before blurring (default: %(default)s)")
    p.add_argument("--noise-sigma", type=float, default=0.0,
                   help="additive gaussian noise std (default: %(default)s)")
    p.add_argument("--seed", type=int, help="master seed (or BLURFORGE_SEED)")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel workers (default: %(default)s)")

    p = sub.add_parser("framesim-dataset",
                       help="build a paired dataset from frame sequences")
    p.add_argument("--frames-root", required=True,
                   help="directory of sequence subdirectories")
    p.add_argument("--output", required=True)
    p.add_argument("--stride", type=int, default=25,
                   help="frames between window slots (default: %(default)s)")
    p.add_argument("--seed", type=int, help="master seed (or BLURFORGE_SEED)")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel workers (default: %(default)s)")

    p = sub.add_parser("metrics", help="PSNR/SSIM over a dataset")
    p.add_argument("--manifest", default=None, help="dataset manifest (JSON Lines)")
    p.add_argument("--a", default=None, help="first image directory")
    p.add_argument("--b", default=None, help="second image directory")
    p.add_argument("--csv", default=None, help="CSV report path")
    p.add_argument("--json", default=None, help="JSON report path")
    p.add_argument("--figures", default=None,
                   help="directory for rendered figures (histograms, scatter)")

    return parser


def _resolve_seed(value: int | None, required: bool = True) -> int | None:
    if value is not None:
        return value
    env = os.environ.get("BLURFORGE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _UsageError(f"BLURFORGE_SEED is not an integer: {env!r}")
    if required:
        raise _UsageError("--seed is required (or set BLURFORGE_SEED)")
    return None


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise _UsageError(message)


def _cmd_kernel(args) -> int:
    seed = _resolve_seed(args.seed)
    _check(args.iterations >= 1, "--iterations must be >= 1")
    _check(args.max_length >= 0, "--max-length must be >= 0")
    _check(0 <= args.impulse_prob <= 1, "--impulse-prob must be in [0,1]")
    for name in ("inertia", "big_shake_prob", "gaussian_shake_prob"):
        val = getattr(args, name)
        if val is not None:
            flag = "--" + name.replace("_", "-")
            if name == "inertia":
                _check(val >= 0, f"{flag} must be >= 0")
            else:
                _check(0 <= val <= 1, f"{flag} must be in [0,1]")
    if args.canvas is not None:
        _check(args.canvas >= 1 and args.canvas % 2 == 1, "--canvas must be odd and positive")

    rng = make_rng(seed)
    sampled = sample_params(rng)
    params = TrajectoryParams(
        iterations=args.iterations,
        max_length=args.max_length,
        impulse_prob=args.impulse_prob,
        inertia=sampled.inertia if args.inertia is None else args.inertia,
        big_shake_prob=(
            sampled.big_shake_prob if args.big_shake_prob is None else args.big_shake_prob
        ),
        gaussian_shake_prob=(
            sampled.gaussian_shake_prob
            if args.gaussian_shake_prob is None
            else args.gaussian_shake_prob
        ),
        initial_angle=sampled.initial_angle if args.angle is None else args.angle,
    )
    traj = generate_trajectory(params, rng, seed=seed)
    kern = rasterize(traj, canvas=args.canvas)
    write_kernel(kern, args.out)
    if args.preview:
        kernel_preview(kern, args.preview)
    if args.trajectory:
        save_trajectory(traj, args.trajectory)
    print(f"kernel {kern.width}x{kern.height} -> {args.out}")
    return 0


def _cmd_blur(args) -> int:
    _check(args.noise_sigma >= 0, "--noise-sigma must be >= 0")
    seed = _resolve_seed(args.seed, required=args.noise_sigma > 0)
    img = load_image(args.image)
    kern = read_kernel(args.kernel)
    out = apply_blur(img, kern, NoiseSpec(args.noise_sigma, seed or 0))
    save_png(out, args.out)
    print(f"blurred {args.image} -> {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    _check(1 <= args.min_frames <= args.max_frames,
           "need 1 <= --min-frames <= --max-frames")
    _check(args.gamma > 0, "--gamma must be > 0")
    seed = _resolve_seed(args.seed)
    files = list_frame_files(args.frames)
    rng = make_rng(seed)
    n, offset = sample_window_indices(len(files), rng, args.min_frames, args.max_frames)
    frames = [load_image(p) for p in files[offset : offset + n]]
    window = FrameWindow(frames=frames, gamma=args.gamma)
    blurred, sharp = simulate_frame_blur(window)
    save_png(blurred, args.out_blurred)
    save_png(sharp, args.out_sharp)
    print(f"averaged {n} frames at offset {offset} -> {args.out_blurred}, {args.out_sharp}")
    return 0


def _cmd_dataset(args) -> int:
    seed = _resolve_seed(args.seed)
    try:
        config = DatasetConfig(
            master_seed=seed,
            patch=args.patch,
            patches_per_image=args.patches_per_image,
            downscale=args.downscale,
            noise_sigma=args.noise_sigma,
            workers=args.workers,
        )
    except ValueError as exc:
        raise _UsageError(str(exc))
    manifest = build_dataset(args.input, args.output, config)
    skipped = manifest.header.get("skipped", [])
    print(
        f"dataset: {len(manifest.records)} pairs, {len(skipped)} skipped "
        f"-> {manifest.path}"
    )
    return 0


def _cmd_framesim_dataset(args) -> int:
    seed = _resolve_seed(args.seed)
    try:
        config = FramesimConfig(master_seed=seed, stride=args.stride, workers=args.workers)
    except ValueError as exc:
        raise _UsageError(str(exc))
    manifest = build_framesim_dataset(args.frames_root, args.output, config)
    skipped = manifest.header.get("skipped", [])
    print(
        f"framesim dataset: {len(manifest.records)} pairs, {len(skipped)} "
        f"sequences skipped -> {manifest.path}"
    )
    return 0


def _cmd_metrics(args) -> int:
    manifest_mode = args.manifest is not None
    dirs_mode = args.a is not None or args.b is not None
    _check(manifest_mode != dirs_mode, "give either --manifest or both --a and --b")
    if dirs_mode:
        _check(args.a is not None and args.b is not None,
               "--a and --b must be given together")
        report = evaluate_dirs(args.a, args.b)
    else:
        manifest = read_manifest(args.manifest)
        base = manifest.path.parent
        pairs = [
            (rec.pair_id, base / rec.blurred_path, base / rec.sharp_path)
            for rec in manifest.records
        ]
        report = evaluate_pair_files(pairs)

    if args.csv:
        write_csv(report, args.csv)
    if args.json:
        write_json(report, args.json)
    if args.figures:
        from .report import render_metric_figures

        written = render_metric_figures(report, args.figures)
        for path in written:
            log.info("figure: %s", path)

    if args.json:
        print(json.dumps(report.to_json_dict()))
    else:
        mean_p = report.mean_psnr_db
        mean_s = report.mean_ssim
        print(f"pairs evaluated: {len(report.per_pair)}")
        if mean_p is not None:
            print(f"mean PSNR: {mean_p:.4f} dB")
            print(f"mean SSIM: {mean_s:.6f}")
        for pair_id, err in report.failures:
            print(f"failed: {pair_id}: {err}")
    return 0


_COMMANDS = {
    "kernel": _cmd_kernel,
    "blur": _cmd_blur,
    "simulate": _cmd_simulate,
    "dataset": _cmd_dataset,
    "framesim-dataset": _cmd_framesim_dataset,
    "metrics": _cmd_metrics,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command is None:
        print(parser.format_usage(), file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (BlurforgeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
