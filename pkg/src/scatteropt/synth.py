"""Synthetic point clouds for benchmarks and acceptance checks."""

from __future__ import annotations

import numpy as np

from .dataset import PointSet

__all__ = ["GAUSSIAN_CENTERS", "gaussian_mixture", "uniform_square"]

# Five well-separated cluster centers inside the unit square.
GAUSSIAN_CENTERS = ((0.18, 0.22), (0.80, 0.20), (0.50, 0.52), (0.22, 0.80), (0.82, 0.82))


def gaussian_mixture(
    n: int,
    sigma: float = 0.03,
    noise: float = 0.1,
    seed: int = 0,
    name: str = "gaussian-mixture",
) -> PointSet:
    """n points: isotropic Gaussian clusters plus a uniform noise floor.

    ``noise`` is the fraction of points drawn uniformly over the square; the
    rest split evenly across the centers. Coordinates are clipped to [0,1].
    """
    rng = np.random.default_rng(seed)
    centers = np.array(GAUSSIAN_CENTERS)
    n_noise = int(round(noise * n))
    n_cluster = n - n_noise
    per = np.full(len(centers), n_cluster // len(centers))
    per[: n_cluster % len(centers)] += 1
    parts = [
        centers[i] + sigma * rng.standard_normal((per[i], 2)) for i in range(len(centers))
    ]
    if n_noise:
        parts.append(rng.random((n_noise, 2)))
    pts = np.clip(np.vstack(parts), 0.0, 1.0)
    return PointSet(points=pts, name=name, source_rows=n)


def uniform_square(n: int, seed: int = 0, name: str = "uniform") -> PointSet:
    rng = np.random.default_rng(seed)
    return PointSet(points=rng.random((n, 2)), name=name, source_rows=n)
