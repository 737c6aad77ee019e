"""Exact-search vector store with a verifiable on-disk format.

Search is brute force over a float32 matrix; no approximate index. The disk
format is a JSON manifest (dim, metric, ids, metadata) next to a raw
little-endian float32 row-major matrix, so a round trip is bit-exact and any
other tool can audit the files.

Concurrency contract: many readers or one writer. The HTTP service only
reads; pipeline stages own the write path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .enrich import Embedding


class StoreError(Exception):
    """Dimension mismatch, unknown metric, or a corrupt on-disk store."""


def l2_normalize(e: Embedding) -> Embedding:
    """Scale to unit L2 norm, preserving direction; zero vectors are rejected."""
    values = np.asarray(e.values, dtype=np.float64)
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        raise StoreError("cannot normalize a zero vector")
    if peak < 1e-150:
        # Components this small square into subnormals and wreck the norm's
        # precision; rescale first. Ordinary embeddings never take this path.
        values = values / peak
    norm = float(np.linalg.norm(values))
    return Embedding(tuple(float(v) for v in values / norm))


@dataclass
class VectorStore:
    dim: int
    metric: str = "cosine"
    _ids: list[str] = field(default_factory=list)
    _index: dict[str, int] = field(default_factory=dict)
    _rows: list[np.ndarray] = field(default_factory=list)
    _meta: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise StoreError(f"dim must be >= 1, got {self.dim}")
        if self.metric not in ("cosine", "euclidean"):
            raise StoreError(f"unknown metric {self.metric!r}")

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, id: str) -> bool:
        return id in self._index

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self._ids)

    def upsert(self, id: str, e: Embedding, meta: dict | None = None) -> None:
        if e.dim != self.dim:
            raise StoreError(f"embedding dim {e.dim} != store dim {self.dim}")
        row = np.asarray(e.values, dtype=np.float32)
        if id in self._index:
            self._rows[self._index[id]] = row
        else:
            self._index[id] = len(self._ids)
            self._ids.append(id)
            self._rows.append(row)
        self._meta[id] = dict(meta or {})

    def get(self, id: str) -> tuple[Embedding, dict]:
        if id not in self._index:
            raise KeyError(id)
        row = self._rows[self._index[id]]
        return Embedding(tuple(float(v) for v in row)), dict(self._meta[id])

    def knn_search(self, query: Embedding, k: int) -> list[tuple[str, float]]:
        """Exact top-k: cosine scores descending / euclidean distances
        ascending, ties broken by id."""
        if k < 1:
            raise StoreError(f"k must be >= 1, got {k}")
        if query.dim != self.dim:
            raise StoreError(f"query dim {query.dim} != store dim {self.dim}")
        if not self._ids:
            return []

        matrix = np.vstack(self._rows).astype(np.float64)
        q = np.asarray(query.values, dtype=np.float64)
        if self.metric == "cosine":
            norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(q)
            if np.linalg.norm(q) == 0.0 or np.any(norms == 0.0):
                raise StoreError("cosine scoring requires non-zero vectors")
            scores = matrix @ q / norms
            order_key = -scores
        else:
            scores = np.linalg.norm(matrix - q, axis=1)
            order_key = scores

        ranked = sorted(range(len(self._ids)), key=lambda i: (order_key[i], self._ids[i]))
        return [(self._ids[i], float(scores[i])) for i in ranked[:k]]

    def save(self, path: str | Path) -> None:
        """Write ``<path>.manifest.json`` and ``<path>.f32``."""
        path = Path(path)
        matrix = (
            np.vstack(self._rows).astype("<f4")
            if self._rows
            else np.zeros((0, self.dim), dtype="<f4")
        )
        manifest = {
            "dim": self.dim,
            "count": len(self._ids),
            "metric": self.metric,
            "ids": self._ids,
            "metadata": {id: self._meta[id] for id in self._ids},
        }
        with open(path.with_suffix(path.suffix + ".manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, ensure_ascii=False, sort_keys=True)
            fh.write("\n")
        matrix.tofile(path.with_suffix(path.suffix + ".f32"))

    @classmethod
    def load(cls, path: str | Path) -> "VectorStore":
        path = Path(path)
        manifest_path = path.with_suffix(path.suffix + ".manifest.json")
        matrix_path = path.with_suffix(path.suffix + ".f32")
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise StoreError(f"cannot read manifest {manifest_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise StoreError(f"corrupt manifest {manifest_path}: {exc}") from exc
        for key in ("dim", "count", "metric", "ids", "metadata"):
            if key not in manifest:
                raise StoreError(f"manifest {manifest_path} missing key {key!r}")

        dim, count = manifest["dim"], manifest["count"]
        if len(manifest["ids"]) != count:
            raise StoreError(f"manifest count {count} != {len(manifest['ids'])} ids")
        try:
            flat = np.fromfile(matrix_path, dtype="<f4")
        except OSError as exc:
            raise StoreError(f"cannot read matrix {matrix_path}: {exc}") from exc
        if flat.size != count * dim:
            raise StoreError(
                f"matrix {matrix_path} holds {flat.size} floats, "
                f"manifest promises {count}x{dim}"
            )

        store = cls(dim=dim, metric=manifest["metric"])
        matrix = flat.reshape(count, dim)
        for i, id in enumerate(manifest["ids"]):
            store._index[id] = i
            store._ids.append(id)
            store._rows.append(matrix[i].copy())
            store._meta[id] = manifest["metadata"].get(id, {})
        return store


__all__ = ["Embedding", "StoreError", "VectorStore", "l2_normalize"]
