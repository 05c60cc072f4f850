"""HTTP facade for the interactive explorer.

Sessions hold uploaded datasets, a tree of models (each lens application
creates a child of the model it filtered), and embeddings. Model builds,
lens applications and layouts run as queued background jobs; clients poll
``/api/jobs/{id}`` until the result id appears. One compute job runs at a
time so reported timings stay comparable.
"""

from __future__ import annotations

import io
import itertools
import os
import queue
import threading

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .analysis import contrast_selection
from .dataset import load_csv
from .errors import DegenerateSelection, GraphLensError
from .layout import LayoutParams, optimize_layout, reembed, spectral_init
from .lenses import apply_lens_sequence, lens_spec_from_dict, lens_spec_to_dict
from .manifold import METRICS, build_manifold
from .model_io import ModelFile, save_model

__all__ = ["create_app", "Session"]


class _Ids:
    def __init__(self, prefix):
        self.prefix = prefix
        self.counter = itertools.count(1)

    def next(self) -> str:
        return f"{self.prefix}{next(self.counter)}"


class Session:
    """All server state: datasets, model tree, embeddings, job table."""

    def __init__(self, data_dir=None):
        self.lock = threading.RLock()
        self.data_dir = data_dir
        self.datasets = {}
        self.models = {}
        self.embeddings = {}
        self.jobs = {}
        self.queue = queue.Queue()
        self._job_ids = _Ids("job-")
        self._dataset_ids = _Ids("ds-")
        self._model_ids = _Ids("m-")
        self._embedding_ids = _Ids("e-")
        self.worker = threading.Thread(target=self._run_jobs, daemon=True)
        self.worker.start()

    # --- job machinery -----------------------------------------------------

    def submit(self, fn) -> str:
        with self.lock:
            job_id = self._job_ids.next()
            self.jobs[job_id] = {
                "status": "pending",
                "progress": 0.0,
                "result_id": None,
                "message": None,
            }
        self.queue.put((job_id, fn))
        return job_id

    def _run_jobs(self):
        while True:
            job_id, fn = self.queue.get()
            with self.lock:
                self.jobs[job_id]["status"] = "running"
            try:
                result_id = fn(lambda p: self._set_progress(job_id, p))
            except Exception as exc:  # job failures become terminal job states
                with self.lock:
                    self.jobs[job_id]["status"] = "failed"
                    self.jobs[job_id]["message"] = str(exc)
            else:
                with self.lock:
                    self.jobs[job_id]["status"] = "done"
                    self.jobs[job_id]["progress"] = 1.0
                    self.jobs[job_id]["result_id"] = result_id
            finally:
                self.queue.task_done()

    def _set_progress(self, job_id, progress):
        with self.lock:
            job = self.jobs[job_id]
            # progress is monotone; terminal states never move backwards
            if job["status"] == "running":
                job["progress"] = max(job["progress"], min(float(progress), 1.0))

    # --- registry helpers ----------------------------------------------------

    def get_dataset(self, dataset_id):
        with self.lock:
            if dataset_id not in self.datasets:
                raise HTTPException(404, f"unknown dataset {dataset_id!r}")
            return self.datasets[dataset_id]

    def get_model(self, model_id, allow_building=False):
        with self.lock:
            if model_id not in self.models:
                raise HTTPException(404, f"unknown model {model_id!r}")
            entry = self.models[model_id]
            if entry["manifold"] is None and not allow_building:
                raise HTTPException(409, f"model {model_id!r} is still being built")
            return entry

    def get_embedding(self, embedding_id):
        with self.lock:
            if embedding_id not in self.embeddings:
                raise HTTPException(404, f"unknown embedding {embedding_id!r}")
            entry = self.embeddings[embedding_id]
            if entry["embedding"] is None:
                raise HTTPException(409, f"embedding {embedding_id!r} is not finished")
            return entry

    def _persist_model(self, model_id):
        if not self.data_dir:
            return
        entry = self.models[model_id]
        try:
            os.makedirs(self.data_dir, exist_ok=True)
            save_model(
                ModelFile(
                    entry["manifold"],
                    metric=entry.get("metric"),
                    k=entry.get("k"),
                    dataset_digest=None,
                ),
                os.path.join(self.data_dir, f"{model_id}.lum"),
            )
        except OSError:
            pass  # persistence is best effort; the session copy is canonical


class ModelRequest(BaseModel):
    dataset_id: str
    metric: str = "euclidean"
    n_neighbors: int = 15


class LayoutRequest(BaseModel):
    init: str = "spectral"
    params: dict = {}


class ContrastRequest(BaseModel):
    dataset_id: str
    selection: list


def create_app(data_dir=None, max_upload_mb: int = 256, static_dir=None) -> FastAPI:
    """Build the FastAPI application around a fresh session."""
    app = FastAPI(title="graphlens service")
    session = Session(data_dir=data_dir)
    app.state.session = session
    max_upload = max_upload_mb * 1024 * 1024

    @app.exception_handler(GraphLensError)
    async def _lens_error(_, exc):
        status = 422 if isinstance(exc, DegenerateSelection) else 400
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    # --- datasets ----------------------------------------------------------

    @app.post("/api/datasets")
    async def upload_dataset(request: Request, missing: str = "error"):
        body = await request.body()
        if len(body) > max_upload:
            raise HTTPException(413, f"upload exceeds {max_upload_mb} MB")
        if not body:
            raise HTTPException(400, "empty upload")
        policy = missing
        if missing.startswith("impute:"):
            policy = ("knn_impute", int(missing.split(":", 1)[1]))
        elif missing not in ("error", "drop_rows"):
            raise HTTPException(400, f"unknown missing policy {missing!r}")
        data = load_csv(io.BytesIO(body), missing=policy)
        with session.lock:
            dataset_id = session._dataset_ids.next()
            session.datasets[dataset_id] = data
        if data_dir:
            os.makedirs(data_dir, exist_ok=True)
            with open(os.path.join(data_dir, f"{dataset_id}.csv"), "wb") as fh:
                fh.write(body)
        return {
            "dataset_id": dataset_id,
            "columns": data.columns,
            "n_rows": data.n_rows,
        }

    # --- models --------------------------------------------------------------

    @app.post("/api/models")
    def create_model(req: ModelRequest):
        if req.metric not in METRICS:
            raise HTTPException(400, f"unknown metric {req.metric!r}")
        if req.n_neighbors < 1:
            raise HTTPException(400, "n_neighbors must be at least 1")
        data = session.get_dataset(req.dataset_id)
        with session.lock:
            model_id = session._model_ids.next()
            session.models[model_id] = {
                "manifold": None,
                "parent": None,
                "spec": None,
                "dataset_id": req.dataset_id,
                "metric": req.metric,
                "k": req.n_neighbors,
            }

        def job(progress):
            manifold = build_manifold(data, req.n_neighbors, req.metric)
            with session.lock:
                session.models[model_id]["manifold"] = manifold
                session._persist_model(model_id)
            return model_id

        return {"job_id": session.submit(job)}

    @app.post("/api/models/{model_id}/lens")
    def apply_lens(model_id: str, payload: dict):
        parent = session.get_model(model_id)
        try:
            spec = lens_spec_from_dict(payload)
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(400, f"invalid lens spec: {exc}") from exc
        data = session.get_dataset(parent["dataset_id"])
        missing = [
            d
            for d in getattr(spec, "dimensions", None) or [getattr(spec, "dimension")]
            if d not in data.columns
        ]
        if missing:
            raise HTTPException(400, f"unknown lens dimensions {missing}")
        with session.lock:
            child_id = session._model_ids.next()
            session.models[child_id] = {
                "manifold": None,
                "parent": model_id,
                "spec": lens_spec_to_dict(spec),
                "dataset_id": parent["dataset_id"],
                "metric": parent.get("metric"),
                "k": parent.get("k"),
            }

        def job(progress):
            lensed = apply_lens_sequence(parent["manifold"], [spec], data)
            with session.lock:
                session.models[child_id]["manifold"] = lensed
                session._persist_model(child_id)
            return child_id

        return {"job_id": session.submit(job)}

    @app.post("/api/models/{model_id}/layout")
    def create_layout(model_id: str, req: LayoutRequest):
        entry = session.get_model(model_id)
        manifold = entry["manifold"]
        try:
            params = LayoutParams(**req.params)
        except (TypeError, ValueError) as exc:
            raise HTTPException(400, f"invalid layout params: {exc}") from exc
        warm_source = None
        if req.init.startswith("warm:"):
            warm_source = session.get_embedding(req.init.split(":", 1)[1])
            if warm_source["embedding"].n_points != manifold.n_vertices:
                raise HTTPException(400, "warm-start embedding size mismatch")
        elif req.init != "spectral":
            raise HTTPException(400, f"unknown init {req.init!r}")
        with session.lock:
            embedding_id = session._embedding_ids.next()
            session.embeddings[embedding_id] = {
                "embedding": None,
                "model_id": model_id,
            }

        def job(progress):
            tick = lambda epoch, total: progress(epoch / total)
            if warm_source is not None:
                emb = reembed(
                    manifold, warm_source["embedding"], params, progress=tick
                )
            else:
                init = spectral_init(manifold, seed=params.seed)
                emb = optimize_layout(manifold, init, params, progress=tick)
            with session.lock:
                session.embeddings[embedding_id]["embedding"] = emb
            return embedding_id

        return {"job_id": session.submit(job)}

    # --- reads ---------------------------------------------------------------

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        with session.lock:
            if job_id not in session.jobs:
                raise HTTPException(404, f"unknown job {job_id!r}")
            job = dict(session.jobs[job_id])
        return job

    @app.get("/api/embeddings/{embedding_id}")
    def embedding_points(embedding_id: str):
        entry = session.get_embedding(embedding_id)
        emb = entry["embedding"]
        return {
            "model_id": entry["model_id"],
            "init_mode": emb.init_mode,
            "points": emb.coords.tolist(),
        }

    @app.get("/api/models/{model_id}/edges")
    def model_edges(model_id: str, limit: int = 10_000):
        if limit < 0:
            raise HTTPException(400, "limit must be non-negative")
        entry = session.get_model(model_id)
        m = entry["manifold"]
        rows = np.repeat(np.arange(m.n_vertices, dtype=np.int64), m.degrees())
        upper = rows < m.indices  # one representative per unordered pair
        rows, cols, w = rows[upper], m.indices[upper], m.weights[upper]
        order = np.lexsort((cols, rows, -w.astype(np.float64)))[:limit]
        return {
            "n_edges": int(upper.sum()),
            "edges": np.column_stack([rows[order], cols[order]]).tolist(),
            "weights": w[order].astype(float).tolist(),
        }

    @app.get("/api/models/{model_id}/history")
    def model_history(model_id: str):
        session.get_model(model_id, allow_building=True)
        chain = []
        with session.lock:
            cursor = model_id
            while cursor is not None:
                entry = session.models[cursor]
                chain.append(
                    {
                        "model_id": cursor,
                        "spec": entry["spec"],
                        "ready": entry["manifold"] is not None,
                    }
                )
                cursor = entry["parent"]
        chain.reverse()  # root first
        return {"path": chain}

    # --- contrasts -------------------------------------------------------------

    @app.post("/api/contrast")
    def contrast(req: ContrastRequest):
        data = session.get_dataset(req.dataset_id)
        try:
            selection = np.asarray(req.selection, dtype=np.int64)
        except (ValueError, OverflowError) as exc:
            raise HTTPException(400, f"invalid selection: {exc}") from exc
        result = contrast_selection(data, selection)
        return {
            "features": [
                {
                    "name": result.features[i],
                    "d": float(result.d_statistics[i]),
                    "p": float(result.p_values[i]),
                    "significant": bool(result.significant[i]),
                }
                for i in range(len(result.features))
            ]
        }

    if static_dir is None:
        static_dir = os.environ.get("GRAPHLENS_UI_DIR")
        if static_dir is None and os.path.isdir("frontend/dist"):
            static_dir = "frontend/dist"
    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
