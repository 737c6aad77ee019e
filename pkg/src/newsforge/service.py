"""Read-only HTTP search endpoint over a vector store.

Queries are embedded with the same client abstraction the ingestion pipeline
uses, so serving and indexing can never disagree about the embedding space.
"""
from __future__ import annotations

import json
import logging
import sys
import time

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .enrich import EmbeddingClient, embed_text
from .store import VectorStore

log = logging.getLogger(__name__)

DEFAULT_K = 10
DEFAULT_K_MAX = 100
_META_FIELDS = ("title", "country", "topic", "published_at")


def create_app(store: VectorStore, embed_client: EmbeddingClient, k_max: int = DEFAULT_K_MAX) -> FastAPI:
    app = FastAPI(title="newsforge search", docs_url=None, redoc_url=None)

    @app.middleware("http")
    async def access_log(request: Request, call_next):
        started = time.monotonic()
        response: Response = await call_next(request)
        print(
            json.dumps({
                "method": request.method,
                "path": request.url.path,
                "status": response.status_code,
                "duration_ms": round(1000 * (time.monotonic() - started), 3),
            }),
            file=sys.stderr,
            flush=True,
        )
        return response

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "size": len(store)}

    @app.get("/v1/news/search")
    async def search(request: Request):
        q = request.query_params.get("q", "")
        raw_k = request.query_params.get("k", str(DEFAULT_K))
        if not q.strip():
            return JSONResponse({"error": "q must be a non-empty string"}, status_code=400)
        try:
            k = int(raw_k)
        except ValueError:
            return JSONResponse({"error": f"k must be an integer, got {raw_k!r}"}, status_code=400)
        if not 1 <= k <= k_max:
            return JSONResponse({"error": f"k must be in [1, {k_max}]"}, status_code=400)

        try:
            query = embed_text(q, embed_client)
        except Exception as exc:
            log.error("query embedding failed: %s", exc)
            return JSONResponse({"error": "embedding backend failure"}, status_code=502)

        results = []
        for id, score in store.knn_search(query, k):
            _, meta = store.get(id)
            entry = {"id": id, "score": score}
            entry.update({k_: meta.get(k_) for k_ in _META_FIELDS})
            results.append(entry)
        return {"results": results}

    return app


def serve(store: VectorStore, embed_client: EmbeddingClient,
          bind_address: str = "127.0.0.1:8080", k_max: int = DEFAULT_K_MAX) -> None:
    """Run the search service until interrupted."""
    import uvicorn

    host, _, port = bind_address.partition(":")
    app = create_app(store, embed_client, k_max=k_max)
    log.info("serving %d vectors on %s", len(store), bind_address)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080), log_level="warning")


__all__ = ["create_app", "serve", "DEFAULT_K", "DEFAULT_K_MAX"]
