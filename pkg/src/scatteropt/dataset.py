"""Point-set ingestion and the named dataset registry.

Input is CSV with a header row; two named columns are min-max normalized
per axis into the unit square. Rows with non-finite values are dropped and
counted. Dimensionality reduction (e.g. t-SNE for >2-D data) is an external
preprocessing step: this loader only ever consumes two columns.

The registry stores one .npy per dataset plus a JSON manifest, rooted at
$SCATTEROPT_DATA_DIR (default ./data), so repeated sweeps reload cheaply.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["DatasetError", "PointSet", "load_csv", "load_csv_text", "Registry", "data_dir"]

DATA_DIR_ENV = "SCATTEROPT_DATA_DIR"


class DatasetError(ValueError):
    """Raised for unusable input files or registry misuse."""


@dataclass(frozen=True)
class PointSet:
    """Normalized 2-D points in [0,1]^2, in stable input order."""

    points: np.ndarray  # (n, 2) float64, read-only
    name: str
    source_rows: int

    def __post_init__(self):
        self.points.flags.writeable = False

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dropped_rows(self) -> int:
        return self.source_rows - len(self.points)


def _normalize_axis(values: np.ndarray, axis_name: str) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi == lo:
        raise DatasetError(f"degenerate axis ({axis_name}): all values equal {lo}")
    return (values - lo) / (hi - lo)


def normalize(raw: np.ndarray, name: str, source_rows: int) -> PointSet:
    """Min-max normalize raw (n, 2) coordinates per axis into [0,1]^2."""
    if len(raw) == 0:
        raise DatasetError("zero parseable rows")
    degenerate = [ax for ax, col in zip("xy", raw.T) if col.max() == col.min()]
    if degenerate:
        raise DatasetError(f"degenerate axis ({', '.join(degenerate)})")
    pts = np.column_stack([_normalize_axis(raw[:, 0], "x"), _normalize_axis(raw[:, 1], "y")])
    return PointSet(points=pts, name=name, source_rows=source_rows)


def load_csv_text(text: str, x_col: str, y_col: str, name: str) -> PointSet:
    """Parse headered CSV text into a normalized PointSet.

    Rows whose x or y fails to parse as a finite number are dropped (and
    reflected in dropped_rows). Errors: missing column, zero parseable
    rows, or a degenerate (constant) axis.
    """
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    for col in (x_col, y_col):
        if col not in header:
            raise DatasetError(f"missing column {col!r} (have: {', '.join(header)})")
    rows = []
    source_rows = 0
    for rec in reader:
        source_rows += 1
        try:
            x, y = float(rec[x_col]), float(rec[y_col])
        except (TypeError, ValueError):
            continue
        if math.isfinite(x) and math.isfinite(y):
            rows.append((x, y))
    if not rows:
        raise DatasetError("zero parseable rows")
    return normalize(np.array(rows, dtype=float), name=name, source_rows=source_rows)


def load_csv(path: str | os.PathLike, x_col: str, y_col: str, name: str | None = None) -> PointSet:
    """Load two columns of a headered CSV file as a normalized PointSet."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"no such file: {path}")
    return load_csv_text(path.read_text(), x_col, y_col, name=name or path.stem)


def data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "./data"))


class Registry:
    """On-disk dataset store: one columnar .npy per set plus a manifest.

    Reads are lock-free once loaded; writes are serialized. Dataset ids are
    derived from the name, so they are stable across process restarts.
    """

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else data_dir()
        self.root.mkdir(parents=True, exist_ok=True)
        self._manifest_path = self.root / "manifest.json"
        self._lock = threading.Lock()
        self._cache: dict[str, PointSet] = {}

    def _read_manifest(self) -> dict:
        if self._manifest_path.exists():
            return json.loads(self._manifest_path.read_text())
        return {}

    def _write_manifest(self, manifest: dict) -> None:
        tmp = self._manifest_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(manifest, indent=1, sort_keys=True))
        tmp.replace(self._manifest_path)

    @staticmethod
    def dataset_id(name: str) -> str:
        return hashlib.sha256(name.encode()).hexdigest()[:12]

    def register(self, ps: PointSet) -> str:
        if not ps.name:
            raise DatasetError("dataset name must be nonempty")
        with self._lock:
            manifest = self._read_manifest()
            ds_id = self.dataset_id(ps.name)
            if ds_id in manifest:
                raise DatasetError(f"duplicate dataset name: {ps.name!r}")
            np.save(self.root / f"{ds_id}.npy", ps.points)
            manifest[ds_id] = {"name": ps.name, "n": len(ps), "source_rows": ps.source_rows}
            self._write_manifest(manifest)
            self._cache[ds_id] = ps
        return ds_id

    def get(self, ds_id: str) -> PointSet:
        cached = self._cache.get(ds_id)
        if cached is not None:
            return cached
        manifest = self._read_manifest()
        if ds_id not in manifest:
            raise KeyError(f"unknown dataset id: {ds_id}")
        entry = manifest[ds_id]
        points = np.load(self.root / f"{ds_id}.npy")
        ps = PointSet(points=points, name=entry["name"], source_rows=entry["source_rows"])
        self._cache[ds_id] = ps
        return ps

    def list(self) -> list[dict]:
        manifest = self._read_manifest()
        return [
            {"id": ds_id, "name": entry["name"], "n": entry["n"]}
            for ds_id, entry in sorted(manifest.items(), key=lambda kv: kv[1]["name"])
        ]
