"""Merge trees over visual density and the threshold-plot saliency score.

The density field is treated as a scalar field on a grid. Components of its
superlevel sets (cells with value strictly greater than a threshold, joined
by 8-connectivity) appear at local maxima and merge as the threshold drops.
Each component is summarized by the density at which it appears (birth), the
density at which it merges into an older component (death), and their
difference (persistence). The threshold plot counts, for any persistence
threshold, how many components persist at least that long; the length of its
longest constant segment is the saliency score used to rank designs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MergeTreeNode",
    "MergeTree",
    "Bar",
    "ThresholdPlot",
    "SaliencyScore",
    "Bins",
    "build_merge_tree",
    "threshold_plot",
    "saliency",
    "auc",
    "auc_bins",
    "saliency_bins",
]

# 8-connected neighbor offsets (row, col).
_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

_NEIGHBOR_TABLES: dict[tuple[int, int], list[tuple[int, ...]]] = {}


def _neighbor_table(rows: int, cols: int) -> list[tuple[int, ...]]:
    """Flat-index 8-neighborhoods, cached per grid shape (fields are small)."""
    key = (rows, cols)
    table = _NEIGHBOR_TABLES.get(key)
    if table is None:
        table = [
            tuple(
                (r + dr) * cols + (c + dc)
                for dr, dc in _NEIGHBORS
                if 0 <= r + dr < rows and 0 <= c + dc < cols
            )
            for r in range(rows)
            for c in range(cols)
        ]
        if rows * cols <= 65536:
            _NEIGHBOR_TABLES[key] = table
    return table


@dataclass(frozen=True)
class MergeTreeNode:
    """One component of the superlevel-set filtration.

    ``birth`` is the density at which the component appears (its highest
    cell), ``death`` the density at which it merges into an older component
    (0 for components that never merge), and ``birth_cell`` the flat index
    of the cell where it was born.
    """

    birth: float
    death: float
    birth_cell: int

    @property
    def persistence(self) -> float:
        return self.birth - self.death


@dataclass(frozen=True)
class MergeTree:
    """All components of a field, plus the index of the root node.

    ``root`` is the node surviving to threshold 0 (the eldest, on ties the
    one with the smallest birth cell); None for an identically-zero field.
    """

    nodes: tuple[MergeTreeNode, ...]
    root: int | None

    def persistences(self) -> np.ndarray:
        return np.array([n.persistence for n in self.nodes], dtype=float)


def build_merge_tree(field: np.ndarray) -> MergeTree:
    """Build the merge tree of ``field`` under 8-connectivity.

    Cells are swept in order of decreasing value (ties by flat cell index).
    A cell with no already-swept neighbor starts a new component; when two
    components meet, the elder rule applies: the one born at higher density
    survives (ties broken toward the smaller birth cell) and the younger is
    recorded with its death set to the current level. Components born and
    killed at the same level are plateau fragments, not features, and are
    dropped, so the node count equals the number of 8-connected
    local-maximum plateaus of positive value. Zero-valued cells belong to no
    component; components that never merge die at 0.
    """
    grid = np.asarray(field, dtype=float)
    if grid.ndim != 2:
        raise ValueError("field must be a 2-D array")
    if np.any(grid < 0):
        raise ValueError("field values must be nonnegative")
    rows, cols = grid.shape
    flat = grid.ravel()

    active = np.flatnonzero(flat > 0)
    if active.size == 0:
        return MergeTree(nodes=(), root=None)
    order = active[np.lexsort((active, -flat[active]))].tolist()

    neighbors = _neighbor_table(rows, cols)
    values = flat.tolist()
    parent = [-1] * len(values)
    birth_value = [0.0] * len(values)
    birth_cell = [0] * len(values)
    nodes: list[MergeTreeNode] = []

    def find(c: int) -> int:
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    for cell in order:
        level = values[cell]
        parent[cell] = cell
        birth_value[cell] = level
        birth_cell[cell] = cell
        for nb in neighbors[cell]:
            if parent[nb] < 0:
                continue  # not swept yet
            ra, rb = find(cell), find(nb)
            if ra == rb:
                continue
            # Elder rule: keep the higher birth, tie toward smaller birth cell.
            if (birth_value[ra], -birth_cell[ra]) >= (birth_value[rb], -birth_cell[rb]):
                elder, young = ra, rb
            else:
                elder, young = rb, ra
            if birth_value[young] > level:
                nodes.append(
                    MergeTreeNode(
                        birth=birth_value[young],
                        death=level,
                        birth_cell=birth_cell[young],
                    )
                )
            parent[young] = elder

    # Components that never merged survive to threshold 0.
    survivors = [cell for cell in order if find(cell) == cell]
    survivors.sort(key=lambda c: (-birth_value[c], birth_cell[c]))
    root_cell = survivors[0]
    for cell in survivors:
        nodes.append(MergeTreeNode(birth=birth_value[cell], death=0.0, birth_cell=birth_cell[cell]))

    nodes.sort(key=lambda n: (-n.persistence, n.birth_cell))
    root = next(i for i, n in enumerate(nodes) if n.birth_cell == root_cell and n.death == 0.0)
    return MergeTree(nodes=tuple(nodes), root=root)


@dataclass(frozen=True)
class Bar:
    """Maximal constant segment of the threshold plot.

    ``count`` clusters are visible for persistence thresholds strictly
    inside [t_min, t_max]; ``saliency`` is the segment length.
    """

    count: int
    t_min: float
    t_max: float

    @property
    def saliency(self) -> float:
        return self.t_max - self.t_min


@dataclass(frozen=True)
class ThresholdPlot:
    """Step function mapping persistence threshold to visible cluster count."""

    bars: tuple[Bar, ...]
    domain_max: float

    def to_json(self) -> dict:
        return {
            "bars": [
                {"count": b.count, "t_min": b.t_min, "t_max": b.t_max, "saliency": b.saliency}
                for b in self.bars
            ],
            "domain_max": self.domain_max,
            "auc": auc(self),
        }


def threshold_plot(tree: MergeTree) -> ThresholdPlot:
    """Encode count(t) = |{nodes with persistence >= t}| as bars.

    Bar boundaries are the distinct persistences; the bar ending at boundary
    b carries the count of nodes with persistence >= b, so counts decrease
    strictly from one bar to the next.
    """
    pers = sorted(n.persistence for n in tree.nodes)
    if not pers:
        return ThresholdPlot(bars=(), domain_max=0.0)
    boundaries = sorted(set(pers))
    n = len(pers)
    bars = []
    lo = 0.0
    consumed = 0
    for b in boundaries:
        count = n - consumed
        bars.append(Bar(count=count, t_min=lo, t_max=b))
        consumed += pers.count(b)
        lo = b
    return ThresholdPlot(bars=tuple(bars), domain_max=boundaries[-1])


@dataclass(frozen=True)
class SaliencyScore:
    """Longest bar of a threshold plot, optionally range-restricted."""

    value: float
    count: int
    restricted_range: tuple[int, int] | None = None


def saliency(plot: ThresholdPlot, cluster_range: tuple[int, int] | None = None) -> SaliencyScore:
    """Score a plot by its longest bar.

    With a (C_min, C_max) range only bars whose count falls inside it are
    considered; the score is 0 when none qualify. Equal-length bars resolve
    toward the smaller cluster count.
    """
    bars = plot.bars
    if cluster_range is not None:
        lo, hi = cluster_range
        bars = tuple(b for b in bars if lo <= b.count <= hi)
    if not bars:
        return SaliencyScore(value=0.0, count=0, restricted_range=cluster_range)
    best = max(bars, key=lambda b: (b.saliency, -b.count))
    return SaliencyScore(value=best.saliency, count=best.count, restricted_range=cluster_range)


def auc(plot: ThresholdPlot) -> float:
    """Exact area under the count step function over [0, domain_max].

    Equals the sum of node persistences of the underlying tree.
    """
    return float(sum(b.count * (b.t_max - b.t_min) for b in plot.bars))


@dataclass(frozen=True)
class Bins:
    """Three equal bins over [lo, hi] with classification helpers."""

    lo: float
    hi: float
    edges: tuple[float, float]
    labels: tuple[str, str, str]

    def index(self, value: float) -> int:
        if value < self.edges[0]:
            return 0
        if value < self.edges[1]:
            return 1
        return 2

    def label(self, value: float) -> str:
        return self.labels[self.index(value)]

    def classify(self, a: float, b: float) -> str:
        """Distance-based similarity: SR same bin, SS adjacent, DS bins 1 and 3."""
        gap = abs(self.index(a) - self.index(b))
        return ("SR", "SS", "DS")[gap]


def auc_bins(aucs: list[float], method: str = "width") -> Bins:
    """Three similarity bins over observed AUC values.

    ``width`` splits [min, max] into equal-width thirds; ``population``
    places edges at the 1/3 and 2/3 quantiles instead (sensitivity checks).
    """
    values = np.asarray(aucs, dtype=float)
    if np.unique(values).size < 2:
        raise ValueError("auc_bins needs at least 2 distinct values")
    lo, hi = float(values.min()), float(values.max())
    if method == "width":
        width = (hi - lo) / 3.0
        edges = (lo + width, lo + 2.0 * width)
    elif method == "population":
        edges = tuple(float(np.quantile(values, q)) for q in (1 / 3, 2 / 3))
    else:
        raise ValueError(f"unknown binning method: {method!r}")
    return Bins(lo=lo, hi=hi, edges=edges, labels=("bin1", "bin2", "bin3"))


def saliency_bins(scores: list[float]) -> Bins:
    """Three equal-width bins over [0, max score], labelled Low/Medium/High."""
    values = np.asarray(scores, dtype=float)
    hi = float(values.max()) if values.size else 0.0
    if hi <= 0.0:
        raise ValueError("saliency_bins needs at least one positive score")
    return Bins(lo=0.0, hi=hi, edges=(hi / 3.0, 2.0 * hi / 3.0), labels=("Low", "Medium", "High"))
