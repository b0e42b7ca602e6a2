"""Scatterplot design optimization for salient cluster structure."""

from .dataset import DatasetError, PointSet, Registry, load_csv, load_csv_text
from .optimizer import (
    DEFAULT_SEED,
    DesignParams,
    RankedDesign,
    SweepCache,
    SweepRanges,
    evaluate,
    quality_rank,
    ranked_to_json,
    scaling_curve,
    sweep,
)
from .raster import AREA_GRID, OPACITY_GRID, CoverageBuffer, DensityField, RenderParams, densify, render
from .sampling import CATEGORIES, RATE_GRID, SampledSet, SampleSpec, SamplerKind, sample, time_samplers
from .synth import gaussian_mixture, uniform_square
from .topology import (
    MergeTree,
    SaliencyScore,
    ThresholdPlot,
    auc,
    auc_bins,
    build_merge_tree,
    saliency,
    saliency_bins,
    threshold_plot,
)

__version__ = "0.1.0"
