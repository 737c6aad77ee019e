from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from newsforge.enrich import MockEmbeddingClient, embed_text
from newsforge.service import create_app
from newsforge.store import VectorStore, l2_normalize

import golden_inputs as gi


@pytest.fixture(scope="module")
def fixture_store():
    embed = MockEmbeddingClient(dim=32)
    store = VectorStore(dim=32, metric="cosine")
    for id, text, meta in gi.service_golden_documents():
        store.upsert(id, l2_normalize(embed_text(text, embed)), meta)
    return store


@pytest.fixture()
def client(fixture_store):
    app = create_app(fixture_store, MockEmbeddingClient(dim=32))
    with TestClient(app) as http:
        yield http


class TestSearch:
    def test_indexed_text_ranks_its_own_document_first(self, client):
        resp = client.get("/v1/news/search", params={"q": gi.SERVICE_QUERY, "k": 3})
        assert resp.status_code == 200
        results = resp.json()["results"]
        assert results[0]["id"] == "doc-query-twin"
        assert results[0]["score"] == pytest.approx(1.0, abs=1e-6)
        assert results[0]["topic"] == "Technology"
        assert set(results[0]) == {"id", "score", "title", "country", "topic", "published_at"}

    def test_golden_response(self, client, golden_dir):
        resp = client.get("/v1/news/search", params={"q": gi.SERVICE_QUERY, "k": gi.SERVICE_K})
        golden = json.loads((golden_dir / "service_search.json").read_text(encoding="utf-8"))
        assert resp.json() == golden

    def test_k_zero_is_400(self, client):
        assert client.get("/v1/news/search", params={"q": "x", "k": 0}).status_code == 400

    def test_k_above_max_is_400(self, client):
        assert client.get("/v1/news/search", params={"q": "x", "k": 101}).status_code == 400

    def test_k_not_integer_is_400(self, client):
        assert client.get("/v1/news/search", params={"q": "x", "k": "many"}).status_code == 400

    def test_empty_query_is_400(self, client):
        assert client.get("/v1/news/search", params={"q": "", "k": 5}).status_code == 400
        assert client.get("/v1/news/search", params={"q": "   ", "k": 5}).status_code == 400

    def test_default_k_is_10(self, client):
        resp = client.get("/v1/news/search", params={"q": "anything"})
        assert len(resp.json()["results"]) == 10

    def test_embedding_failure_is_502(self, fixture_store):
        class Broken:
            dim = 32

            def embed(self, text):
                raise RuntimeError("backend gone")

        app = create_app(fixture_store, Broken())
        with TestClient(app) as http:
            assert http.get("/v1/news/search", params={"q": "x"}).status_code == 502

    def test_concurrent_identical_requests_identical_bodies(self, client):
        def call(_):
            return client.get("/v1/news/search", params={"q": "storm warning", "k": 7}).content

        with ThreadPoolExecutor(max_workers=8) as pool:
            bodies = list(pool.map(call, range(16)))
        assert len(set(bodies)) == 1

    def test_store_not_mutated_by_requests(self, fixture_store, client):
        before = fixture_store.ids
        client.get("/v1/news/search", params={"q": "mutation probe", "k": 5})
        assert fixture_store.ids == before


class TestHealth:
    def test_healthz_reports_store_size(self, client, fixture_store):
        resp = client.get("/healthz")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "size": len(fixture_store)}
