#!/usr/bin/env python3
"""Regenerate the frozen golden files under tests/data/golden/.

Golden outputs are generated once from the deterministic mock backends and
then frozen; the tests compare byte-for-byte. Regenerate only when a mock
contract intentionally changes, and review the diff.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from fastapi.testclient import TestClient

import golden_inputs as gi
from newsforge.annotate import EntityTypeSet, MockLLMClient, annotate_corpus, build_prompt, write_samples
from newsforge.enrich import MockEmbeddingClient, MockEnrichmentClient, embed_text, translate_summarize_classify, write_enriched
from newsforge.service import create_app
from newsforge.store import VectorStore, l2_normalize

GOLDEN = ROOT / "tests" / "data" / "golden"


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)

    # enrichment of three articles through the mock backend
    client = MockEnrichmentClient()
    enriched = [translate_summarize_classify(a, client) for a in gi.enrich_golden_articles()]
    write_enriched(enriched, GOLDEN / "enrich_three_articles.jsonl")

    # one mock embedding, low dimension, for cross-platform stability checks
    vec = embed_text("stability probe", MockEmbeddingClient(dim=8))
    (GOLDEN / "mock_embedding_dim8.json").write_text(
        json.dumps(list(vec.values)) + "\n", encoding="utf-8")

    # the full labeling prompt for a fixed seed
    prompt = build_prompt(gi.PROMPT_GOLDEN_TEXT, EntityTypeSet.default(), gi.PROMPT_GOLDEN_SEED)
    (GOLDEN / f"prompt_seed{gi.PROMPT_GOLDEN_SEED}.txt").write_text(prompt, encoding="utf-8")

    # ten articles through the mock labeler
    samples, summary = annotate_corpus(
        gi.annotate_golden_articles(), MockLLMClient(), EntityTypeSet.default(),
        seed=gi.PROMPT_GOLDEN_SEED, retry_cap=2,
    )
    assert summary.failed == 0, summary
    write_samples(samples, GOLDEN / "annotate_ten_articles.jsonl")

    # training-config defaults as the flat key = value artifact
    from newsforge.dataset import emit_training_config

    emit_training_config(path=GOLDEN / "training_config.txt")

    # search service response over the 21-document fixture store
    embed = MockEmbeddingClient(dim=32)
    store = VectorStore(dim=32, metric="cosine")
    for id, text, meta in gi.service_golden_documents():
        store.upsert(id, l2_normalize(embed_text(text, embed)), meta)
    app = create_app(store, embed)
    with TestClient(app) as http:
        resp = http.get("/v1/news/search", params={"q": gi.SERVICE_QUERY, "k": gi.SERVICE_K})
    assert resp.status_code == 200
    (GOLDEN / "service_search.json").write_text(
        json.dumps(resp.json(), ensure_ascii=False, indent=1) + "\n", encoding="utf-8")

    for f in sorted(GOLDEN.iterdir()):
        print(f"wrote {f}")


if __name__ == "__main__":
    main()
