from __future__ import annotations

import json
import logging
import math

import pytest

from newsforge.enrich import (
    EnrichmentError,
    MockEmbeddingClient,
    MockEnrichmentClient,
    ProtocolError,
    RetryPolicy,
    TransientClientError,
    embed_text,
    enrich_all,
    translate_summarize_classify,
    write_enriched,
)

from conftest import make_article


class TestMockEnrichment:
    def test_topic_is_pure_function_of_id(self):
        client = MockEnrichmentClient()
        a = make_article("abc", body="Some body text here.")
        first = translate_summarize_classify(a, client)
        second = translate_summarize_classify(a, client)
        assert first.topic == second.topic != ""

    def test_summary_is_truncated_body(self):
        client = MockEnrichmentClient()
        body = "word " * 200
        enriched = translate_summarize_classify(make_article("a", body=body), client)
        assert enriched.summary_translated == body[:280]
        assert enriched.title_translated == "A headline"

    def test_empty_topic_is_protocol_error(self):
        class BadClient:
            def enrich(self, article):
                return {"title_translated": "t", "summary_translated": "s", "topic": ""}

        with pytest.raises(ProtocolError, match="topic"):
            translate_summarize_classify(make_article("a"), BadClient())

    def test_missing_keys_is_protocol_error(self):
        class BadClient:
            def enrich(self, article):
                return {"topic": "News"}

        with pytest.raises(ProtocolError, match="missing"):
            translate_summarize_classify(make_article("a"), BadClient())

    def test_three_article_fixture_matches_golden(self, golden_dir, tmp_path):
        from golden_inputs import enrich_golden_articles

        client = MockEnrichmentClient()
        enriched = [translate_summarize_classify(a, client) for a in enrich_golden_articles()]
        out = tmp_path / "enriched.jsonl"
        write_enriched(enriched, out)
        assert out.read_bytes() == (golden_dir / "enrich_three_articles.jsonl").read_bytes()


class TestRetryPolicy:
    def test_retries_then_succeeds(self):
        sleeps: list[float] = []
        calls = {"n": 0}

        def flaky():
            calls["n"] += 1
            if calls["n"] < 3:
                raise TransientClientError("boom")
            return {"ok": True}

        policy = RetryPolicy(max_attempts=3, base_delay_s=0.5, sleep=sleeps.append)
        assert policy.run("test", flaky) == {"ok": True}
        assert calls["n"] == 3
        assert sleeps == [0.5, 1.0]  # exponential backoff

    def test_exhaustion_raises_enrichment_error(self, caplog):
        def always_fails():
            raise TransientClientError("down")

        policy = RetryPolicy(max_attempts=2, sleep=lambda s: None)
        with caplog.at_level(logging.WARNING):
            with pytest.raises(EnrichmentError, match="2 attempts"):
                policy.run("enrich x", always_fails)
        # attempt count is observable in the logs
        assert sum("attempt" in r.message for r in caplog.records) == 2

    def test_never_more_than_max_attempts(self):
        calls = {"n": 0}

        def fails():
            calls["n"] += 1
            raise TransientClientError("x")

        with pytest.raises(EnrichmentError):
            RetryPolicy(max_attempts=4, sleep=lambda s: None).run("t", fails)
        assert calls["n"] == 4


class TestMockEmbedding:
    def test_same_text_same_vector(self):
        client = MockEmbeddingClient(dim=64)
        assert embed_text("hello world", client).values == embed_text("hello world", client).values

    def test_unit_norm(self):
        client = MockEmbeddingClient(dim=768)
        e = embed_text("some text", client)
        assert abs(math.sqrt(sum(v * v for v in e.values)) - 1.0) < 1e-6
        assert e.dim == 768

    def test_different_text_different_vector(self):
        client = MockEmbeddingClient(dim=32)
        assert embed_text("a", client).values != embed_text("b", client).values

    def test_known_vector_frozen(self, golden_dir):
        # guards cross-process / cross-platform stability of the mock
        frozen = json.loads((golden_dir / "mock_embedding_dim8.json").read_text())
        client = MockEmbeddingClient(dim=8)
        assert list(embed_text("stability probe", client).values) == frozen

    def test_dimension_mismatch_is_protocol_error(self):
        class WrongDim:
            dim = 8

            def embed(self, text):
                return [0.5] * 4

        with pytest.raises(ProtocolError, match="dim"):
            embed_text("x", WrongDim())

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            embed_text("", MockEmbeddingClient(dim=4))

    def test_model_identifier_round_trips_in_config(self):
        from newsforge.config import ClientConfig

        cc = ClientConfig(backend="http", url="http://x", model="embed-model-v2")
        assert cc.model == "embed-model-v2"


class TestEnrichAll:
    def test_preserves_input_order_with_concurrency(self):
        client = MockEnrichmentClient()
        articles = [make_article(f"a{i:02d}", body=f"Body {i}") for i in range(20)]
        sequential = enrich_all(articles, client, max_in_flight=1)
        concurrent = enrich_all(articles, client, max_in_flight=8)
        assert [e.base.id for e in sequential] == [e.base.id for e in concurrent]
        assert [e.topic for e in sequential] == [e.topic for e in concurrent]
