"""The 14 subsampling algorithms behind one seeded, deterministic interface.

Every sampler selects indices into the parent point set (never synthesizes
points), takes its budget as clamp(round(rate*n), 1, n), and draws all of
its randomness from the spec's 64-bit seed, so identical (points, spec)
pairs always reproduce the same sample. The blue-noise family is the one
exception to exact cardinality: its dart-throwing radius is found by
bisection until the accepted count lands within 2% below the budget.

Density-based samplers share the downstream 20x20 grid as their density
estimate; Morton codes quantize at 16 bits per axis, comfortably beyond the
700 px render resolution.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .dataset import PointSet

__all__ = [
    "SamplerKind",
    "CATEGORIES",
    "RATE_GRID",
    "SampleSpec",
    "SampledSet",
    "sample",
    "budget",
    "morton_codes",
    "outlier_scores",
    "poisson_disk",
    "farthest_point",
    "time_samplers",
    "timing_table_csv",
]

RATE_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))  # 5% .. 95%

DENSITY_GRID = 20  # shared with the density histogram
MORTON_BITS = 16
KNN_K = 8  # mirrors the 8-connectivity used by the topology stage
BLUE_NOISE_COUNT_TOL = 0.02


class SamplerKind(enum.Enum):
    RANDOM = "random"
    DENSITY_BIASED = "density_biased"
    NON_UNIFORM = "non_uniform"
    SVD_BASED = "svd_based"
    MULTI_VIEW_Z_ORDER = "multi_view_z_order"
    RECURSIVE_SUBDIVISION = "recursive_subdivision"
    OUTLIER_BIASED_DENSITY = "outlier_biased_density"
    OUTLIER_BIASED_RANDOM = "outlier_biased_random"
    HASHMAP_STRATIFIED = "hashmap_stratified"
    OUTLIER_BIASED_BLUE_NOISE = "outlier_biased_blue_noise"
    BLUE_NOISE = "blue_noise"
    MULTI_CLASS_BLUE_NOISE = "multi_class_blue_noise"
    FARTHEST_POINT = "farthest_point"
    Z_ORDER = "z_order"


# Preservation categories, matching the published taxonomy of the 14
# algorithms. Two carry density+outlier, one carries outlier+separation.
CATEGORIES: dict[SamplerKind, tuple[str, ...]] = {
    SamplerKind.RANDOM: ("random",),
    SamplerKind.DENSITY_BIASED: ("density-preserving",),
    SamplerKind.NON_UNIFORM: ("density-preserving",),
    SamplerKind.SVD_BASED: ("density-preserving",),
    SamplerKind.MULTI_VIEW_Z_ORDER: ("density-preserving",),
    SamplerKind.RECURSIVE_SUBDIVISION: ("density-preserving", "outlier-preserving"),
    SamplerKind.OUTLIER_BIASED_DENSITY: ("density-preserving", "outlier-preserving"),
    SamplerKind.OUTLIER_BIASED_RANDOM: ("outlier-preserving",),
    SamplerKind.HASHMAP_STRATIFIED: ("outlier-preserving",),
    SamplerKind.OUTLIER_BIASED_BLUE_NOISE: ("outlier-preserving", "separation-preserving"),
    SamplerKind.BLUE_NOISE: ("separation-preserving",),
    SamplerKind.MULTI_CLASS_BLUE_NOISE: ("separation-preserving",),
    SamplerKind.FARTHEST_POINT: ("separation-preserving",),
    SamplerKind.Z_ORDER: ("separation-preserving",),
}

BLUE_NOISE_KINDS = frozenset(
    {SamplerKind.BLUE_NOISE, SamplerKind.MULTI_CLASS_BLUE_NOISE, SamplerKind.OUTLIER_BIASED_BLUE_NOISE}
)


@dataclass(frozen=True)
class SampleSpec:
    kind: SamplerKind
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must be in (0, 1]")


@dataclass(frozen=True)
class SampledSet:
    """Sorted unique indices into the parent set, with sampling wall time."""

    indices: np.ndarray  # int64, sorted, read-only
    parent: str
    spec: SampleSpec
    elapsed_ms: float

    def __post_init__(self):
        self.indices.flags.writeable = False

    def __len__(self) -> int:
        return len(self.indices)


def budget(n: int, rate: float) -> int:
    return max(1, min(n, int(round(rate * n))))


# --------------------------------------------------------------------------
# Shared machinery
# --------------------------------------------------------------------------


def _grid_cells(pts: np.ndarray, g: int = DENSITY_GRID) -> np.ndarray:
    """Flat cell index of each point on a g x g grid over the unit square."""
    gx = np.minimum((pts[:, 0] * g).astype(np.int64), g - 1)
    gy = np.minimum((pts[:, 1] * g).astype(np.int64), g - 1)
    return gy * g + gx


def morton_codes(pts: np.ndarray, bits: int = MORTON_BITS) -> np.ndarray:
    """Morton (Z-order) code of each point at the given quantization."""
    scale = 1 << bits
    q = np.clip((pts * scale).astype(np.int64), 0, scale - 1).astype(np.uint32)

    def spread(v):
        v = (v | (v << np.uint32(8))) & np.uint32(0x00FF00FF)
        v = (v | (v << np.uint32(4))) & np.uint32(0x0F0F0F0F)
        v = (v | (v << np.uint32(2))) & np.uint32(0x33333333)
        v = (v | (v << np.uint32(1))) & np.uint32(0x55555555)
        return v

    return (spread(q[:, 0]).astype(np.uint64)) | (spread(q[:, 1]).astype(np.uint64) << np.uint64(1))


def _morton_order(pts: np.ndarray) -> np.ndarray:
    codes = morton_codes(pts)
    return np.lexsort((np.arange(len(pts)), codes))


def outlier_scores(pts: np.ndarray, k: int = KNN_K) -> np.ndarray:
    """Distance to the k-th nearest neighbor: the sparser, the higher.

    This is the reciprocal of the usual 1/d_k nearest-neighbor density
    estimate, so isolated points score high and receive the sampling boost.
    """
    n = len(pts)
    if n <= 1:
        return np.ones(n)
    kk = min(k, n - 1)
    dist, _ = cKDTree(pts).query(pts, k=kk + 1)
    return dist[:, kk]


def _boost(pts: np.ndarray) -> np.ndarray:
    """Multiplicative outlier boost: 1 + score normalized to unit mean."""
    score = outlier_scores(pts)
    mean = score.mean()
    if mean <= 0:
        return np.ones(len(pts))
    return 1.0 + score / mean


def _weighted_choice(n: int, k: int, weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(n, size=k, replace=False, p=weights / weights.sum())


def _allocate_quota(weights: np.ndarray, caps: np.ndarray, total: int) -> np.ndarray:
    """Integer allocation proportional to weights, capped per bucket.

    Largest-remainder rounding, then round-robin top-ups for whatever the
    caps displaced; assumes total <= caps.sum().
    """
    w = np.asarray(weights, dtype=float)
    if w.sum() <= 0:
        w = np.ones_like(w)
    raw = total * w / w.sum()
    alloc = np.minimum(np.floor(raw).astype(np.int64), caps)
    while (rem := total - int(alloc.sum())) > 0:
        frac = np.where(alloc < caps, raw - alloc, -np.inf)
        order = np.lexsort((np.arange(len(w)), -frac))
        for i in order[:rem]:
            if alloc[i] < caps[i]:
                alloc[i] += 1
    return alloc


def _per_bucket_draw(buckets: list[np.ndarray], quotas: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    picked = [rng.choice(members, size=int(q), replace=False) for members, q in zip(buckets, quotas) if q > 0]
    return np.concatenate(picked) if picked else np.empty(0, dtype=np.int64)


# --------------------------------------------------------------------------
# The samplers. Each maps (pts, k, rng) -> unsorted index array of length k
# (blue-noise family: within tolerance below k).
# --------------------------------------------------------------------------


def _random(pts, k, rng):
    # First k of a full permutation: uniform without replacement, and the
    # cost is rate-independent (completion time stays flat across rates).
    return rng.permutation(len(pts))[:k]


def _density_biased(pts, k, rng):
    cells = _grid_cells(pts)
    counts = np.bincount(cells, minlength=DENSITY_GRID * DENSITY_GRID)
    return _weighted_choice(len(pts), k, 1.0 / counts[cells], rng)


def _non_uniform(pts, k, rng):
    cells = _grid_cells(pts)
    occupied, inverse = np.unique(cells, return_inverse=True)
    counts = np.bincount(inverse)
    quotas = _allocate_quota(np.sqrt(counts), counts, k)
    buckets = [np.flatnonzero(inverse == j) for j in range(len(occupied))]
    return _per_bucket_draw(buckets, quotas, rng)


def _svd_based(pts, k, rng):
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    score = np.abs(centered @ vt.T).sum(axis=1)
    order = np.lexsort((np.arange(len(pts)), -score))
    return order[:k]


def _multi_view_z_order(pts, k, rng):
    n = len(pts)
    order = _morton_order(pts)
    cells = _grid_cells(pts)
    target = np.bincount(cells, minlength=DENSITY_GRID * DENSITY_GRID).astype(float) / n
    selected_per_cell = np.zeros(DENSITY_GRID * DENSITY_GRID)
    out = np.empty(k, dtype=np.int64)
    bounds = (np.arange(k + 1) * n) // k
    for j in range(k):
        segment = order[bounds[j] : bounds[j + 1]]
        deficit = target[cells[segment]] * k - selected_per_cell[cells[segment]]
        pick = segment[int(np.argmax(deficit))]
        selected_per_cell[cells[pick]] += 1
        out[j] = pick
    return out


def _kd_leaves(pts: np.ndarray, capacity: int = 32) -> list[np.ndarray]:
    leaves: list[np.ndarray] = []

    def split(indices: np.ndarray, axis: int):
        if len(indices) <= capacity:
            leaves.append(indices)
            return
        order = indices[np.argsort(pts[indices, axis], kind="stable")]
        half = len(order) // 2
        split(order[:half], 1 - axis)
        split(order[half:], 1 - axis)

    split(np.arange(len(pts)), 0)
    return leaves


def _recursive_subdivision(pts, k, rng):
    leaves = _kd_leaves(pts)
    sizes = np.array([len(leaf) for leaf in leaves])
    quotas = _allocate_quota(sizes.astype(float), sizes, k)
    return _per_bucket_draw(leaves, quotas, rng)


def _outlier_biased_random(pts, k, rng):
    return _weighted_choice(len(pts), k, _boost(pts), rng)


def _outlier_biased_density(pts, k, rng):
    cells = _grid_cells(pts)
    counts = np.bincount(cells, minlength=DENSITY_GRID * DENSITY_GRID)
    return _weighted_choice(len(pts), k, _boost(pts) / counts[cells], rng)


def _hashmap_stratified(pts, k, rng):
    cells = _grid_cells(pts)
    occupied, inverse = np.unique(cells, return_inverse=True)
    buckets = [rng.permutation(np.flatnonzero(inverse == j)) for j in rng.permutation(len(occupied))]
    out = []
    depth = 0
    while len(out) < k:
        for bucket in buckets:
            if depth < len(bucket):
                out.append(bucket[depth])
                if len(out) == k:
                    break
        depth += 1
    return np.array(out, dtype=np.int64)


def _dart_throw(xs, ys, order, radius, cap):
    """Greedy Poisson-disk pass in candidate order, stopping at cap accepts."""
    if radius <= 0:
        return list(order[:cap])
    r2 = radius * radius
    inv_cell = np.sqrt(2.0) / radius
    grid: dict[tuple[int, int], list[tuple[float, float]]] = {}
    accepted = []
    for idx in order:
        x, y = xs[idx], ys[idx]
        gx, gy = int(x * inv_cell), int(y * inv_cell)
        ok = True
        for nx in range(gx - 2, gx + 3):
            for ny in range(gy - 2, gy + 3):
                for px, py in grid.get((nx, ny), ()):
                    dx, dy = px - x, py - y
                    if dx * dx + dy * dy < r2:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            accepted.append(idx)
            grid.setdefault((gx, gy), []).append((x, y))
            if len(accepted) == cap:
                break
    return accepted


def poisson_disk(
    pts: np.ndarray, k: int, rng: np.random.Generator, order: np.ndarray | None = None
) -> tuple[np.ndarray, float]:
    """Blue-noise selection of ~k existing points; returns (indices, radius).

    The disk radius is bisected until dart throwing accepts a count within
    2% below the budget (overshoot is trimmed in acceptance order, which
    preserves the pairwise min-distance guarantee).
    """
    n = len(pts)
    if order is None:
        order = rng.permutation(n)
    xs, ys = pts[:, 0].tolist(), pts[:, 1].tolist()
    tol = max(1, int(round(BLUE_NOISE_COUNT_TOL * k)))
    lo, hi = 0.0, 2.0 / np.sqrt(k)
    best_r, best = 0.0, None
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        acc = _dart_throw(xs, ys, order, mid, cap=k)
        if len(acc) == k:
            best_r, best = mid, acc
            lo = mid
        else:
            if len(acc) >= k - tol and best is None:
                best_r, best = mid, acc
            hi = mid
        if hi - lo < 1e-9 and best is not None:
            break
    if best is None:
        best_r, best = 0.0, list(order[:k])
    return np.array(best, dtype=np.int64), best_r


def _blue_noise(pts, k, rng):
    return poisson_disk(pts, k, rng)[0]


def _outlier_biased_blue_noise(pts, k, rng):
    # Outliers get first shot at claiming space: candidate order by
    # weighted priority keys (Efraimidis-Spirakis).
    keys = rng.random(len(pts)) ** (1.0 / _boost(pts))
    order = np.lexsort((np.arange(len(pts)), -keys))
    return poisson_disk(pts, k, rng, order=order)[0]


def farthest_point(pts: np.ndarray, k: int, start: int) -> np.ndarray:
    """Greedy max-min selection from a given start point (ties: lowest index)."""
    dist = np.linalg.norm(pts - pts[start], axis=1)
    dist[start] = -np.inf
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = start
    for j in range(1, k):
        nxt = int(np.argmax(dist))
        chosen[j] = nxt
        np.minimum(dist, np.linalg.norm(pts - pts[nxt], axis=1), out=dist)
        dist[nxt] = -np.inf
    return chosen


def _farthest_point(pts, k, rng):
    return farthest_point(pts, k, start=int(rng.integers(len(pts))))


def _z_order(pts, k, rng):
    order = _morton_order(pts)
    positions = (np.arange(k) * len(pts)) // k  # every (n/k)-th along the curve
    return order[positions]


_SAMPLERS = {
    SamplerKind.RANDOM: _random,
    SamplerKind.DENSITY_BIASED: _density_biased,
    SamplerKind.NON_UNIFORM: _non_uniform,
    SamplerKind.SVD_BASED: _svd_based,
    SamplerKind.MULTI_VIEW_Z_ORDER: _multi_view_z_order,
    SamplerKind.RECURSIVE_SUBDIVISION: _recursive_subdivision,
    SamplerKind.OUTLIER_BIASED_DENSITY: _outlier_biased_density,
    SamplerKind.OUTLIER_BIASED_RANDOM: _outlier_biased_random,
    SamplerKind.HASHMAP_STRATIFIED: _hashmap_stratified,
    SamplerKind.OUTLIER_BIASED_BLUE_NOISE: _outlier_biased_blue_noise,
    SamplerKind.BLUE_NOISE: _blue_noise,
    SamplerKind.MULTI_CLASS_BLUE_NOISE: _blue_noise,  # monochrome: same contract
    SamplerKind.FARTHEST_POINT: _farthest_point,
    SamplerKind.Z_ORDER: _z_order,
}


def sample(point_set: PointSet, spec: SampleSpec) -> SampledSet:
    """Run one sampler. Pure in (point_set, spec): indices are reproducible."""
    pts = point_set.points
    n = len(pts)
    if n == 0:
        raise ValueError("cannot sample an empty point set")
    k = budget(n, spec.rate)
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    start = time.perf_counter()
    indices = _SAMPLERS[spec.kind](pts, k, rng)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    indices = np.sort(np.asarray(indices, dtype=np.int64))
    if len(np.unique(indices)) != len(indices):
        raise AssertionError(f"{spec.kind} produced duplicate indices")
    return SampledSet(indices=indices, parent=point_set.name, spec=spec, elapsed_ms=elapsed_ms)


# --------------------------------------------------------------------------
# Timing harness
# --------------------------------------------------------------------------


def time_samplers(
    point_set: PointSet,
    rates: list[float],
    kinds: list[SamplerKind],
    repeats: int = 3,
    seed: int = 0,
) -> list[dict]:
    """Median sampling wall time per (kind, rate); kinds run sequentially."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    rows = []
    for kind in kinds:
        for rate in rates:
            spec = SampleSpec(kind=kind, rate=rate, seed=seed)
            times = [sample(point_set, spec).elapsed_ms for _ in range(repeats)]
            rows.append(
                {"kind": kind.value, "rate": rate, "median_ms": float(np.median(times)), "reps": repeats}
            )
    return rows


def timing_table_csv(rows: list[dict]) -> str:
    lines = ["kind,rate,median_ms,reps"]
    lines += [f"{r['kind']},{r['rate']},{r['median_ms']:.6f},{r['reps']}" for r in rows]
    return "\n".join(lines) + "\n"
