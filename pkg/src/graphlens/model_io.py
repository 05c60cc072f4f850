"""Model container: a manifold plus its creation metadata, on disk.

Layout of a .lum file, all integers little endian:

    magic  b"LUMAP1\\n"
    u32    header length in bytes
    json   header: version, n_vertices, metric, k, lens_history,
           dataset_digest, params
    u64[n_vertices + 1]  row offsets
    u32[n_edges]         column indices
    f32[n_edges]         weights

Weights are stored at the same 32-bit precision they are held in memory,
so save/load round trips are bit identical.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import BadMagic, TruncatedFile, VersionMismatch
from .graph import Manifold
from .lenses import lens_spec_from_dict, lens_spec_to_dict

__all__ = ["ModelFile", "save_model", "load_model"]

MAGIC = b"LUMAP1\n"
FORMAT_VERSION = 1


@dataclass
class ModelFile:
    """A manifold plus how it was made."""

    manifold: Manifold
    metric: str | None = None
    k: int | None = None
    dataset_digest: str | None = None
    params: dict = field(default_factory=dict)


def save_model(model: ModelFile | Manifold, path) -> None:
    """Write a model container; the write is atomic (temp file + rename)."""
    if isinstance(model, Manifold):
        model = ModelFile(model)
    m = model.manifold
    header = {
        "version": FORMAT_VERSION,
        "n_vertices": m.n_vertices,
        "metric": model.metric,
        "k": model.k,
        "lens_history": [lens_spec_to_dict(s) for s in m.lens_history],
        "dataset_digest": model.dataset_digest,
        "params": model.params,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".lum.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", len(header_bytes)))
            fh.write(header_bytes)
            fh.write(m.indptr.astype("<u8").tobytes())
            fh.write(m.indices.astype("<u4").tobytes())
            fh.write(m.weights.astype("<f4").tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_exact(fh, count: int, what: str) -> bytes:
    buf = fh.read(count)
    if len(buf) != count:
        raise TruncatedFile(f"file ends inside {what}")
    return buf


def load_model(path) -> ModelFile:
    """Read a model container written by :func:`save_model`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise BadMagic(f"not a model file: magic {magic!r}")
        (header_len,) = struct.unpack("<I", _read_exact(fh, 4, "header length"))
        header = json.loads(_read_exact(fh, header_len, "header").decode("utf-8"))
        if header.get("version") != FORMAT_VERSION:
            raise VersionMismatch(
                f"unsupported container version {header.get('version')!r}"
            )
        n = int(header["n_vertices"])
        indptr = np.frombuffer(
            _read_exact(fh, 8 * (n + 1), "row offsets"), dtype="<u8"
        ).astype(np.int64)
        n_edges = int(indptr[-1]) if n >= 0 else 0
        indices = np.frombuffer(
            _read_exact(fh, 4 * n_edges, "column indices"), dtype="<u4"
        ).astype(np.int32)
        weights = np.frombuffer(
            _read_exact(fh, 4 * n_edges, "weights"), dtype="<f4"
        ).astype(np.float32)
    history = tuple(lens_spec_from_dict(d) for d in header.get("lens_history", []))
    manifold = Manifold(
        n_vertices=n,
        indptr=indptr,
        indices=indices,
        weights=weights,
        lens_history=history,
    )
    return ModelFile(
        manifold=manifold,
        metric=header.get("metric"),
        k=header.get("k"),
        dataset_digest=header.get("dataset_digest"),
        params=header.get("params") or {},
    )
