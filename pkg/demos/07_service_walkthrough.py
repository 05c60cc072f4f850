"""Drive the HTTP service end to end, the way the explorer UI does.

Uploads a CSV, builds a model as a background job, stacks a lens on it,
then requests a warm-started layout of the filtered model. Uses the
in-process test client; `graphlens serve --port 8000` exposes the same
API over a real socket.
"""

import time

import numpy as np
from fastapi.testclient import TestClient

from graphlens.service import create_app

client = TestClient(create_app())

rng = np.random.default_rng(0)
pts = rng.uniform(0, 1, size=(200, 2))
year = rng.integers(2000, 2024, size=200)
csv = "x,y,year\n" + "\n".join(f"{p[0]},{p[1]},{y}" for p, y in zip(pts, year))


def wait(job_id):
    while True:
        status = client.get(f"/api/jobs/{job_id}").json()
        if status["status"] == "done":
            return status["result_id"]
        if status["status"] == "failed":
            raise RuntimeError(status["message"])
        time.sleep(0.05)


dataset = client.post("/api/datasets", content=csv).json()
print("uploaded:", dataset)

model_id = wait(
    client.post(
        "/api/models",
        json={"dataset_id": dataset["dataset_id"], "metric": "euclidean", "n_neighbors": 15},
    ).json()["job_id"]
)
print("model built:", model_id)

embedding_id = wait(
    client.post(
        f"/api/models/{model_id}/layout",
        json={"init": "spectral", "params": {"n_epochs": 100, "seed": 1}},
    ).json()["job_id"]
)
print("base embedding:", embedding_id)

child_id = wait(
    client.post(
        f"/api/models/{model_id}/lens",
        json={"type": "global_lens", "dimension": "year", "n_segments": 24},
    ).json()["job_id"]
)
print("lensed model:", child_id)

warm_id = wait(
    client.post(
        f"/api/models/{child_id}/layout",
        json={"init": f"warm:{embedding_id}", "params": {"n_epochs": 100, "seed": 1}},
    ).json()["job_id"]
)
points = client.get(f"/api/embeddings/{warm_id}").json()["points"]
print(f"warm embedding {warm_id}: {len(points)} points")

history = client.get(f"/api/models/{child_id}/history").json()["path"]
print("lens breadcrumb:", " -> ".join(p["model_id"] for p in history))

edges = client.get(f"/api/models/{child_id}/edges?limit=3").json()
print("heaviest edges:", edges["edges"], "weights:", [round(w, 3) for w in edges["weights"]])
