"""HTTP API over datasets, sweep jobs, rendered plots, and threshold plots.

Jobs run on an internal worker pool and are persisted as JSON documents
under the data directory, so finished jobs stay fetchable across restarts.
Results served here are the same canonical JSON the library emits: a sweep
submitted through the API must match a direct sweep() call value-for-value
(timings aside, which are wall-clock measurements).

The API is a local tool: JSON over HTTP, no authentication, bound to
127.0.0.1:8787 by default. A built web UI bundle, when present, is served
at the root path.
"""

from __future__ import annotations

import json
import queue
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, Response, UploadFile
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .dataset import DatasetError, Registry, load_csv_text
from .optimizer import DEFAULT_SEED, DesignParams, SweepRanges, evaluate, ranked_to_json, sweep
from .raster import AREA_GRID, OPACITY_GRID, RenderParams, render, to_png_bytes
from .sampling import CATEGORIES, RATE_GRID, SamplerKind, SampleSpec, sample

__all__ = ["JobStore", "JobRunner", "create_app", "DEFAULT_PORT"]

DEFAULT_PORT = 8787


class RangesModel(BaseModel):
    rate: tuple[float, float] = (RATE_GRID[0], RATE_GRID[-1])
    point_area: tuple[float, float] = (AREA_GRID[0], AREA_GRID[-1])
    opacity: tuple[float, float] = (OPACITY_GRID[0], OPACITY_GRID[-1])
    clusters: tuple[int, int] | None = None


class JobRequest(BaseModel):
    dataset_id: str
    ranges: RangesModel = Field(default_factory=RangesModel)
    samplers: list[str] | None = None
    top_k: int = 3
    seed: int = DEFAULT_SEED


class JobStore:
    """Durable job table: one JSON document per job under <root>/jobs.

    Jobs found queued or running at load time were interrupted by a restart
    and are marked failed; done jobs stay fetchable forever.
    """

    def __init__(self, root: Path):
        self.root = Path(root) / "jobs"
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        for doc_path in self.root.glob("*.json"):
            doc = json.loads(doc_path.read_text())
            if doc["state"] in ("queued", "running"):
                doc["state"] = "failed"
                doc["error"] = "interrupted by restart"
                doc_path.write_text(json.dumps(doc))
            self._jobs[doc["id"]] = doc

    def create(self, request: dict, total: int) -> dict:
        doc = {
            "id": uuid.uuid4().hex[:12],
            "request": request,
            "state": "queued",
            "evaluated": 0,
            "total": total,
            "error": None,
            "result": None,
        }
        self.put(doc)
        return doc

    def put(self, doc: dict, persist: bool = True) -> None:
        with self._lock:
            self._jobs[doc["id"]] = doc
            if persist:
                path = self.root / f"{doc['id']}.json"
                tmp = path.with_suffix(".tmp")
                tmp.write_text(json.dumps(doc))
                tmp.replace(path)

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            return self._jobs.get(job_id)

    def list(self) -> list[dict]:
        with self._lock:
            return sorted(self._jobs.values(), key=lambda d: d["id"])


class JobRunner:
    """Background workers draining the job queue.

    Each job runs one sweep; designs inside a sweep may parallelize further
    via ``sweep_workers``. Progress persists at a coarse cadence so polling
    clients see movement without a write per design.
    """

    def __init__(self, store: JobStore, registry: Registry, workers: int = 1, sweep_workers: int = 1):
        self.store = store
        self.registry = registry
        self.sweep_workers = sweep_workers
        self._queue: queue.Queue[str] = queue.Queue()
        self._threads = [
            threading.Thread(target=self._loop, name=f"sweep-worker-{i}", daemon=True)
            for i in range(workers)
        ]
        for t in self._threads:
            t.start()

    def submit(self, job_id: str) -> None:
        self._queue.put(job_id)

    def _loop(self) -> None:
        while True:
            job_id = self._queue.get()
            doc = self.store.get(job_id)
            if doc is None:
                continue
            try:
                self._run(doc)
            except Exception as exc:  # surface, never kill the worker
                doc["state"] = "failed"
                doc["error"] = str(exc)
                self.store.put(doc)

    def _run(self, doc: dict) -> None:
        doc["state"] = "running"
        self.store.put(doc)
        req = doc["request"]
        ps = self.registry.get(req["dataset_id"])
        ranges = ranges_from_json(req["ranges"])
        samplers = [SamplerKind(s) for s in req["samplers"]] if req.get("samplers") else None
        step = max(1, doc["total"] // 20)
        last_persisted = 0

        def on_progress(evaluated: int, total: int) -> None:
            nonlocal last_persisted
            doc["evaluated"] = evaluated
            persist = evaluated - last_persisted >= step or evaluated == total
            if persist:
                last_persisted = evaluated
            self.store.put(doc, persist=persist)

        ranked = sweep(
            ps,
            ranges,
            samplers=samplers,
            top_k=req["top_k"],
            seed=req["seed"],
            workers=self.sweep_workers,
            progress=on_progress,
        )
        doc["evaluated"] = doc["total"]
        doc["result"] = ranked_to_json(ranked)
        doc["state"] = "done"
        self.store.put(doc)


def ranges_from_json(doc: dict) -> SweepRanges:
    return SweepRanges(
        rate=tuple(doc["rate"]),
        point_area=tuple(doc["point_area"]),
        opacity=tuple(doc["opacity"]),
        clusters=tuple(doc["clusters"]) if doc.get("clusters") else None,
    )


def _job_view(doc: dict) -> dict:
    return {
        "id": doc["id"],
        "dataset_id": doc["request"]["dataset_id"],
        "ranges": doc["request"]["ranges"],
        "state": doc["state"],
        "progress": {"evaluated": doc["evaluated"], "total": doc["total"]},
        "error": doc["error"],
    }


def _design_params_or_404(
    sampler: str, rate: float, point_area: float, opacity: float, seed: int
) -> DesignParams:
    try:
        kind = SamplerKind(sampler)
    except ValueError:
        raise HTTPException(status_code=404, detail=f"unknown sampler: {sampler}")
    if rate not in RATE_GRID or point_area not in AREA_GRID or opacity not in OPACITY_GRID:
        raise HTTPException(status_code=404, detail="params off the configured grids")
    return DesignParams(sampler=kind, rate=rate, point_area=point_area, opacity=opacity, seed=seed)


def create_app(
    registry: Registry,
    store: JobStore | None = None,
    runner: JobRunner | None = None,
    static_dir: Path | None = None,
) -> FastAPI:
    store = store if store is not None else JobStore(registry.root)
    runner = runner if runner is not None else JobRunner(store, registry)
    app = FastAPI(title="scatteropt", version="0.1.0")

    @app.get("/capabilities")
    def capabilities() -> dict:
        return {
            "samplers": [{"name": k.value, "categories": list(CATEGORIES[k])} for k in SamplerKind],
            "rates": list(RATE_GRID),
            "point_areas": list(AREA_GRID),
            "opacities": list(OPACITY_GRID),
            "default_top_k": 3,
            "default_seed": DEFAULT_SEED,
        }

    @app.get("/datasets")
    def list_datasets() -> list[dict]:
        return registry.list()

    @app.post("/datasets", status_code=201)
    async def upload_dataset(
        file: UploadFile = File(...),
        x_col: str = Form(...),
        y_col: str = Form(...),
        name: str = Form(None),
    ) -> dict:
        text = (await file.read()).decode("utf-8", errors="replace")
        try:
            ps = load_csv_text(
                text, x_col, y_col, name=name or (file.filename or "upload").rsplit(".", 1)[0]
            )
            ds_id = registry.register(ps)
        except DatasetError as exc:
            status = 409 if "duplicate" in str(exc) else 400
            raise HTTPException(status_code=status, detail=str(exc))
        return {"dataset_id": ds_id, "n": len(ps), "dropped_rows": ps.dropped_rows}

    @app.post("/jobs", status_code=202)
    def submit_job(req: JobRequest) -> dict:
        try:
            ps = registry.get(req.dataset_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown dataset: {req.dataset_id}")
        try:
            ranges = ranges_from_json(req.ranges.model_dump())
            samplers = [SamplerKind(s) for s in req.samplers] if req.samplers else list(SamplerKind)
            rates, areas, ops = ranges.rates(), ranges.point_areas(), ranges.opacities()
            if not rates or not areas or not ops or not samplers or req.top_k < 1:
                raise ValueError("ranges select an empty grid")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        total = len(samplers) * len(rates) * len(areas) * len(ops)
        doc = store.create(req.model_dump(), total=total)
        runner.submit(doc["id"])
        return {"job_id": doc["id"]}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        doc = store.get(job_id)
        if doc is None:
            raise HTTPException(status_code=404, detail="unknown job")
        return _job_view(doc)

    @app.get("/jobs/{job_id}/results")
    def get_results(job_id: str) -> list[dict]:
        doc = store.get(job_id)
        if doc is None:
            raise HTTPException(status_code=404, detail="unknown job")
        if doc["state"] != "done":
            raise HTTPException(status_code=409, detail=f"job is {doc['state']}, not done")
        return doc["result"]

    @app.get("/render")
    def render_design(
        dataset: str,
        sampler: str,
        rate: float,
        point_area: float,
        opacity: float,
        seed: int = DEFAULT_SEED,
    ) -> Response:
        try:
            ps = registry.get(dataset)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown dataset: {dataset}")
        params = _design_params_or_404(sampler, rate, point_area, opacity, seed)
        sampled = sample(ps, SampleSpec(kind=params.sampler, rate=params.rate, seed=params.seed))
        buf = render(ps.points[sampled.indices], RenderParams(params.point_area, params.opacity))
        return Response(content=to_png_bytes(buf), media_type="image/png")

    @app.get("/plots")
    def plot_design(
        dataset: str,
        sampler: str,
        rate: float,
        point_area: float,
        opacity: float,
        seed: int = DEFAULT_SEED,
    ) -> dict:
        try:
            ps = registry.get(dataset)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown dataset: {dataset}")
        params = _design_params_or_404(sampler, rate, point_area, opacity, seed)
        return evaluate(ps, params).plot.to_json()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
