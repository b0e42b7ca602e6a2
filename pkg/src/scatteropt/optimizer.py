"""Exhaustive sweep of the scatterplot design space, ranked by saliency.

A design is one (sampler, rate, point area, opacity) tuple; the sweep
evaluates every combination inside the requested ranges by running the
sampling -> render -> densify -> merge tree -> threshold plot pipeline and
returns the top designs by saliency score. Designs are independent, so the
sweep parallelizes across (sampler, rate) groups; within a group the sampled
indices and per-area mark counts are shared across the opacity axis, which
is exact because coverage depends on the counts alone.

Wall-clock timings ride along for the performance analyses but are excluded
from the canonical result JSON, which must be reproducible bit-for-bit
across runs and worker counts.
"""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import PointSet
from .raster import AREA_GRID, OPACITY_GRID, CoverageBuffer, coverage_from_counts, densify, mark_counts
from .sampling import RATE_GRID, SampledSet, SampleSpec, SamplerKind, sample
from .synth import gaussian_mixture
from .topology import SaliencyScore, ThresholdPlot, build_merge_tree, saliency, threshold_plot

__all__ = [
    "DEFAULT_SEED",
    "DesignParams",
    "SweepRanges",
    "StageTimings",
    "RankedDesign",
    "SweepCache",
    "evaluate",
    "sweep",
    "quality_rank",
    "scaling_curve",
    "ranked_to_json",
    "quality_table_csv",
    "scaling_table_csv",
]

DEFAULT_SEED = 2020

_KIND_ORDER = {kind: i for i, kind in enumerate(SamplerKind)}


@dataclass(frozen=True)
class DesignParams:
    """One point in the design space."""

    sampler: SamplerKind
    rate: float
    point_area: float
    opacity: float
    seed: int = DEFAULT_SEED

    def to_json(self) -> dict:
        return {
            "sampler": self.sampler.value,
            "rate": self.rate,
            "point_area": self.point_area,
            "opacity": self.opacity,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SweepRanges:
    """Per-axis [min, max] windows over the default grids, plus an optional
    cluster-count restriction for the saliency score."""

    rate: tuple[float, float] = (RATE_GRID[0], RATE_GRID[-1])
    point_area: tuple[float, float] = (AREA_GRID[0], AREA_GRID[-1])
    opacity: tuple[float, float] = (OPACITY_GRID[0], OPACITY_GRID[-1])
    clusters: tuple[int, int] | None = None

    def __post_init__(self):
        for label, (lo, hi) in (
            ("rate", self.rate),
            ("point_area", self.point_area),
            ("opacity", self.opacity),
        ):
            if lo > hi:
                raise ValueError(f"{label} range has min > max: {lo} > {hi}")
        if self.clusters is not None and self.clusters[0] > self.clusters[1]:
            raise ValueError("cluster range has min > max")

    def rates(self) -> list[float]:
        return [v for v in RATE_GRID if self.rate[0] <= v <= self.rate[1]]

    def point_areas(self) -> list[float]:
        return [v for v in AREA_GRID if self.point_area[0] <= v <= self.point_area[1]]

    def opacities(self) -> list[float]:
        return [v for v in OPACITY_GRID if self.opacity[0] <= v <= self.opacity[1]]


@dataclass(frozen=True)
class StageTimings:
    sample_ms: float
    render_ms: float
    topo_ms: float

    def to_json(self) -> dict:
        return {"sample_ms": self.sample_ms, "render_ms": self.render_ms, "topo_ms": self.topo_ms}


@dataclass(frozen=True)
class RankedDesign:
    params: DesignParams
    score: SaliencyScore
    plot: ThresholdPlot
    timings: StageTimings


def _sort_key(d: RankedDesign):
    # Descending score; ties resolve toward the cheaper encoding.
    p = d.params
    return (-d.score.value, p.rate, p.point_area, p.opacity, _KIND_ORDER[p.sampler])


class SweepCache:
    """Reusable per-dataset cache of sampled indices and density fields.

    Keys include the dataset name and size; entries are immutable once
    stored, and access is lock-protected for concurrent jobs.
    """

    def __init__(self):
        self._samples: dict[tuple, SampledSet] = {}
        self._fields: dict[tuple, np.ndarray] = {}
        self._lock = threading.Lock()

    @staticmethod
    def _ds_key(ps: PointSet) -> tuple:
        return (ps.name, len(ps))

    @classmethod
    def _field_key(cls, ps: PointSet, params: DesignParams) -> tuple:
        return (*cls._ds_key(ps), params.sampler, params.rate, params.seed, params.point_area, params.opacity)

    def lookup_field(self, ps: PointSet, params: DesignParams) -> np.ndarray | None:
        with self._lock:
            return self._fields.get(self._field_key(ps, params))

    def store_field(self, ps: PointSet, params: DesignParams, field: np.ndarray) -> None:
        with self._lock:
            self._fields.setdefault(self._field_key(ps, params), field)

    def get_sample(self, ps: PointSet, spec: SampleSpec) -> SampledSet:
        key = (*self._ds_key(ps), spec.kind, spec.rate, spec.seed)
        with self._lock:
            hit = self._samples.get(key)
        if hit is None:
            hit = sample(ps, spec)
            with self._lock:
                self._samples.setdefault(key, hit)
        return hit

    def get_field(self, ps: PointSet, params: DesignParams, indices: np.ndarray) -> np.ndarray:
        hit = self.lookup_field(ps, params)
        if hit is None:
            hit = _field_for(ps, params, indices)
            self.store_field(ps, params, hit)
        return hit


def _field_for(ps: PointSet, params: DesignParams, indices: np.ndarray) -> np.ndarray:
    radius = float(np.sqrt(params.point_area / np.pi))
    counts = mark_counts(ps.points[indices], radius)
    cov = coverage_from_counts(counts, params.opacity)
    return densify(CoverageBuffer(coverage=cov)).grid


def evaluate(
    ps: PointSet,
    params: DesignParams,
    clusters: tuple[int, int] | None = None,
    cache: SweepCache | None = None,
) -> RankedDesign:
    """Score a single design: sample, render, densify, merge tree, plot."""
    spec = SampleSpec(kind=params.sampler, rate=params.rate, seed=params.seed)
    t0 = time.perf_counter()
    sampled = cache.get_sample(ps, spec) if cache else sample(ps, spec)
    t1 = time.perf_counter()
    if cache:
        field = cache.get_field(ps, params, sampled.indices)
    else:
        field = _field_for(ps, params, sampled.indices)
    t2 = time.perf_counter()
    plot = threshold_plot(build_merge_tree(field))
    score = saliency(plot, cluster_range=clusters)
    t3 = time.perf_counter()
    timings = StageTimings(
        sample_ms=(t1 - t0) * 1000.0, render_ms=(t2 - t1) * 1000.0, topo_ms=(t3 - t2) * 1000.0
    )
    return RankedDesign(params=params, score=score, plot=plot, timings=timings)


def _evaluate_group(
    ps: PointSet,
    kind: SamplerKind,
    rate: float,
    areas: list[float],
    opacities: list[float],
    seed: int,
    clusters: tuple[int, int] | None,
    cache: SweepCache | None = None,
) -> list[RankedDesign]:
    """All (area, opacity) designs of one (sampler, rate) cell.

    The sample is drawn once and each area's mark counts are reused across
    opacities; the arithmetic is identical to evaluate()'s single-design
    path, so results match it exactly.
    """
    spec = SampleSpec(kind=kind, rate=rate, seed=seed)
    t0 = time.perf_counter()
    sampled = cache.get_sample(ps, spec) if cache else sample(ps, spec)
    sample_ms = (time.perf_counter() - t0) * 1000.0
    pts = ps.points[sampled.indices]
    out = []
    for area in areas:
        counts = None  # computed lazily: cache hits never need it
        for opacity in opacities:
            params = DesignParams(sampler=kind, rate=rate, point_area=area, opacity=opacity, seed=seed)
            t2 = time.perf_counter()
            field = cache.lookup_field(ps, params) if cache else None
            if field is None:
                if counts is None:
                    counts = mark_counts(pts, float(np.sqrt(area / np.pi)))
                field = densify(CoverageBuffer(coverage=coverage_from_counts(counts, opacity))).grid
                if cache:
                    cache.store_field(ps, params, field)
            t3 = time.perf_counter()
            plot = threshold_plot(build_merge_tree(field))
            score = saliency(plot, cluster_range=clusters)
            t4 = time.perf_counter()
            timings = StageTimings(
                sample_ms=sample_ms,
                render_ms=(t3 - t2) * 1000.0,
                topo_ms=(t4 - t3) * 1000.0,
            )
            out.append(RankedDesign(params=params, score=score, plot=plot, timings=timings))
    return out


def _group_worker(args) -> list[RankedDesign]:
    ps, kind, rate, areas, opacities, seed, clusters = args
    return _evaluate_group(ps, kind, rate, areas, opacities, seed, clusters)


def sweep(
    ps: PointSet,
    ranges: SweepRanges | None = None,
    samplers: list[SamplerKind] | None = None,
    top_k: int = 3,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    cache: SweepCache | None = None,
    progress=None,
    rate_grid: list[float] | None = None,
    area_grid: list[float] | None = None,
    opacity_grid: list[float] | None = None,
) -> list[RankedDesign]:
    """Evaluate every design in the grid and return the top_k by saliency.

    Axis values come from the default grids filtered by ``ranges``; the
    explicit ``*_grid`` arguments replace an axis wholesale for callers that
    step outside the defaults. Deterministic given the seed: parallel and
    sequential runs produce the same ranking, and equal scores resolve by
    (rate, area, opacity, sampler). ``progress(evaluated, total)`` is
    invoked as groups complete.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    ranges = ranges or SweepRanges()
    samplers = list(samplers) if samplers is not None else list(SamplerKind)
    rates = rate_grid if rate_grid is not None else ranges.rates()
    areas = area_grid if area_grid is not None else ranges.point_areas()
    opacities = opacity_grid if opacity_grid is not None else ranges.opacities()
    if not samplers or not rates or not areas or not opacities:
        raise ValueError("sweep ranges select an empty grid")
    if any(not 0 < r <= 1 for r in rates) or any(a <= 0 for a in areas) or any(not 0 < o <= 1 for o in opacities):
        raise ValueError("grid values out of domain")
    total = len(samplers) * len(rates) * len(areas) * len(opacities)
    groups = [(kind, rate) for kind in samplers for rate in rates]

    results: list[RankedDesign] = []
    evaluated = 0
    if workers <= 1:
        for kind, rate in groups:
            results.extend(_evaluate_group(ps, kind, rate, areas, opacities, seed, ranges.clusters, cache))
            evaluated += len(areas) * len(opacities)
            if progress:
                progress(evaluated, total)
    else:
        tasks = [(ps, kind, rate, areas, opacities, seed, ranges.clusters) for kind, rate in groups]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for group in pool.map(_group_worker, tasks):
                results.extend(group)
                evaluated += len(group)
                if progress:
                    progress(evaluated, total)

    results.sort(key=_sort_key)
    return results[:top_k]


def ranked_to_json(designs: list[RankedDesign], include_timings: bool = True) -> list[dict]:
    """Result schema; timings are optional because they are wall-clock noise."""
    out = []
    for d in designs:
        doc = {
            "params": d.params.to_json(),
            "score": {"value": d.score.value, "count": d.score.count},
            "plot": d.plot.to_json(),
        }
        if include_timings:
            doc["timings"] = d.timings.to_json()
        out.append(doc)
    return out


# --------------------------------------------------------------------------
# Quality and scalability analyses
# --------------------------------------------------------------------------


def quality_rank(
    ps: PointSet,
    rates: list[float],
    samplers: list[SamplerKind],
    repeats: int = 1,
    areas: list[float] | None = None,
    opacities: list[float] | None = None,
    seed: int = DEFAULT_SEED,
) -> list[dict]:
    """How often each sampler wins a (area, opacity, repeat) cell per rate.

    Every cell has exactly one winner (maximal saliency, ties to the
    earlier sampler in the list), so win fractions sum to 1 per rate.
    """
    areas = areas if areas is not None else list(AREA_GRID)
    opacities = opacities if opacities is not None else list(OPACITY_GRID)
    # Contenders are list positions, so an aliased kind competes twice.
    wins = {(i, r): 0 for i in range(len(samplers)) for r in rates}
    times = {(i, r): [] for i in range(len(samplers)) for r in rates}
    for rate in rates:
        for rep in range(repeats):
            rep_seed = seed + rep
            evaluated = [
                _evaluate_group(ps, kind, rate, areas, opacities, rep_seed, None) for kind in samplers
            ]
            for cell in range(len(areas) * len(opacities)):
                best = max(range(len(samplers)), key=lambda i: (evaluated[i][cell].score.value, -i))
                wins[(best, rate)] += 1
            for i in range(len(samplers)):
                times[(i, rate)].append(evaluated[i][0].timings.sample_ms)
    cells = len(areas) * len(opacities) * repeats
    return [
        {
            "sampler": samplers[i].value,
            "rate": rate,
            "win_fraction": wins[(i, rate)] / cells,
            "median_ms": float(np.median(times[(i, rate)])),
        }
        for i in range(len(samplers))
        for rate in rates
    ]


def quality_table_csv(rows: list[dict]) -> str:
    lines = ["sampler,rate,win_fraction,median_ms"]
    lines += [f"{r['sampler']},{r['rate']},{r['win_fraction']:.4f},{r['median_ms']:.6f}" for r in rows]
    return "\n".join(lines) + "\n"


def scaling_curve(
    sizes: list[int],
    params: DesignParams | None = None,
    repeats: int = 2,
    seed: int = DEFAULT_SEED,
) -> list[dict]:
    """Median render+topology wall time on synthetic data of each size."""
    params = params or DesignParams(
        sampler=SamplerKind.RANDOM, rate=1.0, point_area=20.0, opacity=0.1
    )
    radius = float(np.sqrt(params.point_area / np.pi))
    rows = []
    for n in sizes:
        ps = gaussian_mixture(int(n), seed=seed)
        samples = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            counts = mark_counts(ps.points, radius)
            field = densify(CoverageBuffer(coverage=coverage_from_counts(counts, params.opacity)))
            threshold_plot(build_merge_tree(field.grid))
            samples.append((time.perf_counter() - t0) * 1000.0)
        rows.append({"n": int(n), "render_topo_ms": float(np.median(samples))})
    return rows


def scaling_table_csv(rows: list[dict]) -> str:
    lines = ["n,render_topo_ms"]
    lines += [f"{r['n']},{r['render_topo_ms']:.6f}" for r in rows]
    return "\n".join(lines) + "\n"


def results_json_text(designs: list[RankedDesign], include_timings: bool = True) -> str:
    return json.dumps(ranked_to_json(designs, include_timings=include_timings), indent=1)
