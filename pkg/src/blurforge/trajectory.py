"""Random camera-shake trajectories.

A trajectory is a complex-valued sample path: the real part is horizontal
displacement in pixels, the imaginary part vertical. A particle starts at
the origin with a velocity of fixed step length max_length/(iterations-1)
at a random initial angle. At every step the velocity is perturbed by

  * a Gaussian component, scaled by the gaussian-shake weight,
  * a deterministic centripetal pull toward the origin (the inertia term,
    which keeps the path from drifting away), and
  * rarely, an impulsive "big shake" that roughly reverses the direction,
    mimicking a jolt such as pressing the shutter button,

then renormalized back to the fixed step length. Equal step lengths make
every trajectory's total arc length exactly max_length, so kernels
rasterized from these paths correspond to equal exposures.

RNG consumption order is fixed and documented so that a seed fully
determines the path: one block of M-1 trigger uniforms, one block of
2*(M-1) standard normals, then during the walk one extra uniform per
triggered big shake (the direction jitter) and one per zero-velocity
renormalization rescue.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_ITERATIONS = 2000
DEFAULT_MAX_LENGTH = 60.0
DEFAULT_IMPULSE_PROB = 0.001


@dataclass(frozen=True)
class TrajectoryParams:
    """Inputs of the shake model.

    iterations: number of path samples M (>= 1)
    max_length: total arc length in pixels (>= 0)
    impulse_prob: overall perturbation probability/scale in [0, 1]
    inertia: centripetal pull weight, dimensionless >= 0
    big_shake_prob: impulsive-shake probability weight in [0, 1]
    gaussian_shake_prob: gaussian perturbation weight in [0, 1]
    initial_angle: initial velocity angle in radians
    """

    iterations: int = DEFAULT_ITERATIONS
    max_length: float = DEFAULT_MAX_LENGTH
    impulse_prob: float = DEFAULT_IMPULSE_PROB
    inertia: float = 0.0
    big_shake_prob: float = 0.0
    gaussian_shake_prob: float = 0.0
    initial_angle: float = 0.0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.max_length < 0:
            raise ValueError(f"max_length must be >= 0, got {self.max_length}")
        for name in ("impulse_prob", "big_shake_prob", "gaussian_shake_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.inertia < 0:
            raise ValueError(f"inertia must be >= 0, got {self.inertia}")


@dataclass(frozen=True)
class Trajectory:
    """A generated sample path plus its provenance."""

    samples: np.ndarray  # complex128, shape (M,), samples[0] == 0
    params: TrajectoryParams
    seed: int | None = None


def sample_params(rng: np.random.Generator) -> TrajectoryParams:
    """Draw shake parameters from their standard ranges.

    Iteration count, path length and impulse probability stay at their
    defaults; inertia,
    big-shake and gaussian-shake weights and the initial angle are drawn
    uniformly from (0, 0.7), (0, 0.2), (0, 0.7) and (0, 2*pi), in that
    order.
    """
    inertia = rng.uniform(0.0, 0.7)
    big_shake = rng.uniform(0.0, 0.2)
    gaussian_shake = rng.uniform(0.0, 0.7)
    angle = rng.uniform(0.0, 2.0 * math.pi)
    return TrajectoryParams(
        inertia=inertia,
        big_shake_prob=big_shake,
        gaussian_shake_prob=gaussian_shake,
        initial_angle=angle,
    )


def generate_trajectory(
    params: TrajectoryParams, rng: np.random.Generator, seed: int | None = None
) -> Trajectory:
    """Run the shake walk and return the sample path.

    Degenerate inputs (one sample, or zero length) produce a single-point
    path at the origin rather than an error.
    """
    m = params.iterations
    lmax = params.max_length
    if m == 1 or lmax == 0.0:
        samples = np.zeros(m, dtype=np.complex128)
        return Trajectory(samples=samples, params=params, seed=seed)

    step = lmax / (m - 1)
    big_thresh = params.big_shake_prob * params.impulse_prob
    gauss_w = params.gaussian_shake_prob
    inertia = params.inertia
    ps = params.impulse_prob

    # Block draws keep the hot loop in plain Python floats.
    triggers = rng.random(m - 1).tolist()
    normals = rng.standard_normal(2 * (m - 1)).tolist()

    v = complex(math.cos(params.initial_angle), math.sin(params.initial_angle)) * step
    x = [0j] * m
    pos = 0j
    for t in range(m - 1):
        if triggers[t] < big_thresh:
            jitter = rng.uniform(0.0, 1.0)
            next_dir = 2.0 * v * cmath.exp(1j * (math.pi + (jitter - 0.5)))
        else:
            next_dir = 0j
        gauss = complex(normals[2 * t], normals[2 * t + 1])
        v = v + next_dir + ps * (gauss_w * gauss - inertia * pos) * step
        mag = abs(v)
        if mag == 0.0:
            # Perturbation exactly cancelled the velocity; restart at a
            # fresh random angle so the step-length invariant survives.
            v = cmath.exp(1j * (rng.uniform(0.0, 1.0) * 2.0 * math.pi)) * step
        else:
            v = v / mag * step
        pos = pos + v
        x[t + 1] = pos

    samples = np.asarray(x, dtype=np.complex128)
    return Trajectory(samples=samples, params=params, seed=seed)


def path_length(traj: Trajectory) -> float:
    """Total arc length: sum of consecutive sample distances."""
    return float(np.sum(np.abs(np.diff(traj.samples))))


def save_trajectory(traj: Trajectory, path: str | Path) -> None:
    """Dump the path as plain text, one "re im" pair per line."""
    with open(path, "w", encoding="ascii") as fh:
        for z in traj.samples:
            fh.write(f"{z.real:.17g} {z.imag:.17g}\n")
