"""Paired dataset construction with reproducible provenance.

Every pair is an independent work item keyed by (master_seed, pair index)
through the seed-mixing function, so results do not depend on execution
order or worker count. The full image is blurred first and the patch cut
afterwards, keeping replicate-boundary artifacts out of interior patches.

Manifests are JSON Lines: a header object on the first line, then one
record object per line, with file paths relative to the manifest.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .convolve import NoiseSpec, apply_blur
from .errors import (
    BlurforgeError,
    DimensionMismatch,
    EmptyInput,
    InsufficientFrames,
    MissingFile,
    UnwritableOutput,
)
from .framesim import (
    DEFAULT_GAMMA,
    DEFAULT_MAX_FRAMES,
    DEFAULT_MIN_FRAMES,
    FrameWindow,
    list_frame_files,
    sample_window_indices,
    simulate_frame_blur,
)
from .image import crop, downscale_box, load_image, save_png
from .kernel import rasterize, read_kernel, write_kernel
from .rng import child_rng, derive_item_seed
from .trajectory import TrajectoryParams, generate_trajectory, sample_params

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}

SOURCE_SYNTHETIC = "synthetic_kernel"
SOURCE_FRAME_AVERAGE = "frame_average"


@dataclass(frozen=True)
class PairRecord:
    """Provenance of one sharp/blurred pair."""

    pair_id: str
    sharp_path: str
    blurred_path: str
    kernel_path: str | None
    master_seed: int
    item_seed: int
    params: TrajectoryParams | None
    noise_sigma: float
    crop: tuple[int, int, int, int] | None
    source: str
    downscale: int


@dataclass
class Manifest:
    header: dict
    records: list[PairRecord] = field(default_factory=list)

    @property
    def path(self) -> Path | None:
        p = self.header.get("manifest_path")
        return Path(p) if p else None


@dataclass(frozen=True)
class DatasetConfig:
    master_seed: int
    patch: int = 256
    patches_per_image: int = 1
    downscale: int = 1
    noise_sigma: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if self.patch < 1:
            raise ValueError(f"patch must be >= 1, got {self.patch}")
        if self.patches_per_image < 1:
            raise ValueError(
                f"patches_per_image must be >= 1, got {self.patches_per_image}"
            )
        if self.downscale < 1:
            raise ValueError(f"downscale must be >= 1, got {self.downscale}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class FramesimConfig:
    master_seed: int
    stride: int = DEFAULT_MAX_FRAMES
    min_frames: int = DEFAULT_MIN_FRAMES
    max_frames: int = DEFAULT_MAX_FRAMES
    gamma: float = DEFAULT_GAMMA
    workers: int = 1

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if not 1 <= self.min_frames <= self.max_frames:
            raise ValueError(
                f"need 1 <= min_frames <= max_frames, got "
                f"{self.min_frames}..{self.max_frames}"
            )
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


def _prepare_output(output_dir: Path, subdirs: tuple[str, ...]) -> None:
    try:
        for sub in subdirs:
            (output_dir / sub).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UnwritableOutput(f"cannot create {output_dir}: {exc}") from exc


def list_input_images(input_dir: str | Path) -> list[Path]:
    root = Path(input_dir)
    if not root.is_dir():
        raise EmptyInput(f"{root} is not a directory")
    files = sorted(
        p for p in root.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )
    if not files:
        raise EmptyInput(f"no images found in {root}")
    return files


def build_dataset(
    input_dir: str | Path, output_dir: Path | str, config: DatasetConfig
) -> Manifest:
    """Blur every input image with a fresh random kernel and cut one
    aligned patch per repetition.

    Per item, the child stream is consumed in a fixed order: shake
    parameters, trajectory, crop x, crop y, noise seed. Images that do
    not cover a full patch after downscaling, and files that fail to
    decode, are skipped and listed in the manifest header.
    """
    inputs = list_input_images(input_dir)
    output_dir = Path(output_dir)
    _prepare_output(output_dir, ("sharp", "blurred", "kernels"))

    items = [
        (img_idx * config.patches_per_image + rep, path, rep)
        for img_idx, path in enumerate(inputs)
        for rep in range(config.patches_per_image)
    ]

    def build_one(item):
        index, path, rep = item
        try:
            img = load_image(path)
        except OSError as exc:
            return index, None, (path.name, f"decode_error: {exc}")
        img = downscale_box(img, config.downscale) if config.downscale > 1 else img
        height, width = img.shape[:2]
        if width < config.patch or height < config.patch:
            return index, None, (
                path.name,
                f"smaller_than_patch: {width}x{height} after downscale "
                f"{config.downscale}",
            )

        item_seed = derive_item_seed(config.master_seed, index)
        rng = child_rng(config.master_seed, index)
        params = sample_params(rng)
        traj = generate_trajectory(params, rng, seed=item_seed)
        kern = rasterize(traj)
        cx = int(rng.integers(0, width - config.patch + 1))
        cy = int(rng.integers(0, height - config.patch + 1))
        noise_seed = int(rng.integers(0, 2**63))

        blurred = apply_blur(img, kern, NoiseSpec(config.noise_sigma, noise_seed))
        sharp_patch = crop(img, cx, cy, config.patch, config.patch)
        blurred_patch = crop(blurred, cx, cy, config.patch, config.patch)

        pair_id = f"{index:06d}_{path.stem}"
        rel_sharp = f"sharp/{pair_id}.png"
        rel_blurred = f"blurred/{pair_id}.png"
        rel_kernel = f"kernels/{pair_id}.kern"
        save_png(sharp_patch, output_dir / rel_sharp)
        save_png(blurred_patch, output_dir / rel_blurred)
        write_kernel(kern, output_dir / rel_kernel)

        record = PairRecord(
            pair_id=pair_id,
            sharp_path=rel_sharp,
            blurred_path=rel_blurred,
            kernel_path=rel_kernel,
            master_seed=config.master_seed,
            item_seed=item_seed,
            params=params,
            noise_sigma=config.noise_sigma,
            crop=(cx, cy, config.patch, config.patch),
            source=SOURCE_SYNTHETIC,
            downscale=config.downscale,
        )
        return index, record, None

    results = _run_items(build_one, items, config.workers)

    records, skipped = [], {}
    for _, record, skip in sorted(results, key=lambda r: r[0]):
        if record is not None:
            records.append(record)
        elif skip is not None:
            skipped.setdefault(skip[0], skip[1])

    header = {
        "toolkit": "blurforge",
        "version": __version__,
        "master_seed": config.master_seed,
        "creation_parameters": {
            "patch": config.patch,
            "patches_per_image": config.patches_per_image,
            "downscale": config.downscale,
            "noise_sigma": config.noise_sigma,
        },
        "skipped": [{"image": k, "reason": v} for k, v in sorted(skipped.items())],
    }
    manifest = Manifest(header=header, records=records)
    write_manifest(manifest, output_dir / "manifest.jsonl")
    return manifest


def build_framesim_dataset(
    frames_root: str | Path, output_dir: str | Path, config: FramesimConfig
) -> Manifest:
    """Average sliding frame windows of each sequence directory into
    blurred/sharp pairs.

    Window slots advance by ``stride`` frames; within a slot the window
    length and sub-offset are drawn by the slot's child stream. Sequences
    shorter than ``max_frames`` are skipped and recorded.
    """
    root = Path(frames_root)
    if not root.is_dir():
        raise EmptyInput(f"{root} is not a directory")
    sequences = sorted(p for p in root.iterdir() if p.is_dir())
    if not sequences:
        raise EmptyInput(f"no sequence directories found in {root}")
    output_dir = Path(output_dir)
    _prepare_output(output_dir, ("sharp", "blurred"))

    items = []
    skipped = {}
    index = 0
    for seq in sequences:
        files = list_frame_files(seq)
        if len(files) < config.max_frames:
            skipped[seq.name] = (
                f"insufficient_frames: {len(files)} < {config.max_frames}"
            )
            continue
        anchor = 0
        while anchor + config.max_frames <= len(files):
            items.append((index, seq.name, files, anchor))
            index += 1
            anchor += config.stride

    if not items and not skipped:
        raise EmptyInput(f"no frame windows available under {root}")

    def build_one(item):
        index, seq_name, files, anchor = item
        item_seed = derive_item_seed(config.master_seed, index)
        rng = child_rng(config.master_seed, index)
        n, offset = sample_window_indices(
            config.max_frames, rng, config.min_frames, config.max_frames
        )
        start = anchor + offset
        try:
            frames = [load_image(p) for p in files[start : start + n]]
            window = FrameWindow(frames=frames, gamma=config.gamma)
            blurred, sharp = simulate_frame_blur(window)
        except (OSError, DimensionMismatch) as exc:
            return index, None, (seq_name, f"{type(exc).__name__}: {exc}")

        pair_id = f"{index:06d}_{seq_name}"
        rel_sharp = f"sharp/{pair_id}.png"
        rel_blurred = f"blurred/{pair_id}.png"
        save_png(sharp, output_dir / rel_sharp)
        save_png(blurred, output_dir / rel_blurred)

        record = PairRecord(
            pair_id=pair_id,
            sharp_path=rel_sharp,
            blurred_path=rel_blurred,
            kernel_path=None,
            master_seed=config.master_seed,
            item_seed=item_seed,
            params=None,
            noise_sigma=0.0,
            crop=None,
            source=SOURCE_FRAME_AVERAGE,
            downscale=1,
        )
        return index, record, None

    results = _run_items(build_one, items, config.workers)

    records = []
    for _, record, skip in sorted(results, key=lambda r: r[0]):
        if record is not None:
            records.append(record)
        elif skip is not None:
            skipped.setdefault(skip[0], skip[1])

    header = {
        "toolkit": "blurforge",
        "version": __version__,
        "master_seed": config.master_seed,
        "creation_parameters": {
            "stride": config.stride,
            "min_frames": config.min_frames,
            "max_frames": config.max_frames,
            "gamma": config.gamma,
        },
        "skipped": [
            {"sequence": k, "reason": v} for k, v in sorted(skipped.items())
        ],
    }
    manifest = Manifest(header=header, records=records)
    write_manifest(manifest, output_dir / "manifest.jsonl")
    return manifest


def _run_items(fn, items, workers: int):
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _record_to_json(record: PairRecord) -> dict:
    d = asdict(record)
    if record.params is not None:
        d["params"] = asdict(record.params)
    if record.crop is not None:
        d["crop"] = list(record.crop)
    return d


def _record_from_json(d: dict) -> PairRecord:
    params = d.get("params")
    crop_field = d.get("crop")
    return PairRecord(
        pair_id=d["pair_id"],
        sharp_path=d["sharp_path"],
        blurred_path=d["blurred_path"],
        kernel_path=d.get("kernel_path"),
        master_seed=d["master_seed"],
        item_seed=d["item_seed"],
        params=TrajectoryParams(**params) if params is not None else None,
        noise_sigma=d["noise_sigma"],
        crop=tuple(crop_field) if crop_field is not None else None,
        source=d["source"],
        downscale=d["downscale"],
    )


def write_manifest(manifest: Manifest, path: str | Path) -> None:
    path = Path(path)
    header = {k: v for k, v in manifest.header.items() if k != "manifest_path"}
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(json.dumps(_record_to_json(r), sort_keys=True) for r in manifest.records)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    manifest.header["manifest_path"] = str(path)


def read_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    lines = path.read_text(encoding="ascii").splitlines()
    if not lines:
        raise BlurforgeError(f"{path}: empty manifest file")
    header = json.loads(lines[0])
    records = [_record_from_json(json.loads(line)) for line in lines[1:] if line]
    header["manifest_path"] = str(path)
    return Manifest(header=header, records=records)


def validate_manifest(manifest: Manifest, base_dir: str | Path) -> list[str]:
    """Re-check a manifest against disk; returns a list of problems
    (empty means valid).

    Checks: unique pair ids, referenced files exist, kernels reload and
    pass their invariants, crop dimensions are non-negative and match the
    stored patches, sharp and blurred shapes agree.
    """
    base = Path(base_dir)
    problems = []
    seen = set()
    for rec in manifest.records:
        if rec.pair_id in seen:
            problems.append(f"{rec.pair_id}: duplicate pair_id")
        seen.add(rec.pair_id)

        paths = {"sharp": rec.sharp_path, "blurred": rec.blurred_path}
        if rec.kernel_path is not None:
            paths["kernel"] = rec.kernel_path
        missing = False
        for role, rel in paths.items():
            if not (base / rel).is_file():
                problems.append(f"{rec.pair_id}: {role} file missing: {rel}")
                missing = True
        if missing:
            continue

        sharp = load_image(base / rec.sharp_path)
        blurred = load_image(base / rec.blurred_path)
        if sharp.shape != blurred.shape:
            problems.append(
                f"{rec.pair_id}: sharp {sharp.shape} vs blurred {blurred.shape}"
            )
        if rec.crop is not None:
            x, y, w, h = rec.crop
            if x < 0 or y < 0 or w < 1 or h < 1:
                problems.append(f"{rec.pair_id}: bad crop {rec.crop}")
            elif sharp.shape[0] != h or sharp.shape[1] != w:
                problems.append(
                    f"{rec.pair_id}: crop {w}x{h} does not match stored patch "
                    f"{sharp.shape[1]}x{sharp.shape[0]}"
                )
        if rec.kernel_path is not None:
            try:
                read_kernel(base / rec.kernel_path)
            except BlurforgeError as exc:
                problems.append(f"{rec.pair_id}: kernel invalid: {exc}")
    return problems


def merge_manifests(paths: list[str | Path], out_path: str | Path) -> Manifest:
    """Concatenate manifests, rewriting file paths relative to the merged
    location and recording the synthetic:frame-averaged pair ratio."""
    out_path = Path(out_path)
    out_dir = out_path.parent
    merged_records = []
    sources = []
    all_ids: list[str] = []
    per_input_records = []
    for p in paths:
        m = read_manifest(p)
        sources.append(str(p))
        per_input_records.append((Path(p).parent, m.records))
        all_ids.extend(r.pair_id for r in m.records)
    collide = len(set(all_ids)) != len(all_ids)

    for i, (src_dir, records) in enumerate(per_input_records):
        for rec in records:
            def rel(rp):
                return os.path.relpath(src_dir / rp, out_dir) if rp else None

            merged_records.append(
                PairRecord(
                    pair_id=f"m{i}-{rec.pair_id}" if collide else rec.pair_id,
                    sharp_path=rel(rec.sharp_path),
                    blurred_path=rel(rec.blurred_path),
                    kernel_path=rel(rec.kernel_path),
                    master_seed=rec.master_seed,
                    item_seed=rec.item_seed,
                    params=rec.params,
                    noise_sigma=rec.noise_sigma,
                    crop=rec.crop,
                    source=rec.source,
                    downscale=rec.downscale,
                )
            )

    n_synth = sum(1 for r in merged_records if r.source == SOURCE_SYNTHETIC)
    n_real = sum(1 for r in merged_records if r.source == SOURCE_FRAME_AVERAGE)
    header = {
        "toolkit": "blurforge",
        "version": __version__,
        "merged_from": sources,
        "synthetic_pairs": n_synth,
        "frame_average_pairs": n_real,
        "synth_to_real_ratio": (n_synth / n_real) if n_real else None,
    }
    manifest = Manifest(header=header, records=merged_records)
    write_manifest(manifest, out_path)
    return manifest
