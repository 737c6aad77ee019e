from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from newsforge.enrich import Embedding
from newsforge.store import StoreError, VectorStore, l2_normalize


def emb(*values: float) -> Embedding:
    return Embedding(tuple(float(v) for v in values))


class TestNormalize:
    def test_three_four(self):
        assert l2_normalize(emb(3, 4)).values == (0.6, 0.8)

    def test_unit_vector_unchanged(self):
        e = emb(1, 0, 0)
        assert l2_normalize(e).values == e.values

    def test_zero_vector_errors(self):
        with pytest.raises(StoreError):
            l2_normalize(emb(0, 0))

    @given(st.lists(st.floats(min_value=-50, max_value=50), min_size=1, max_size=12))
    def test_idempotent_and_unit_norm(self, values):
        if not any(v != 0 for v in values):
            return
        once = l2_normalize(emb(*values))
        twice = l2_normalize(once)
        norm = math.sqrt(sum(v * v for v in once.values))
        assert abs(norm - 1.0) < 1e-9
        assert all(abs(a - b) < 1e-9 for a, b in zip(once.values, twice.values))


class TestUpsert:
    def test_insert_then_fetch(self):
        store = VectorStore(dim=3)
        store.upsert("a", emb(1, 2, 3), {"title": "t"})
        fetched, meta = store.get("a")
        assert fetched.values == (1.0, 2.0, 3.0)
        assert meta == {"title": "t"}

    def test_upsert_replaces(self):
        store = VectorStore(dim=2)
        store.upsert("a", emb(1, 0))
        store.upsert("a", emb(0, 1))
        assert len(store) == 1
        assert store.get("a")[0].values == (0.0, 1.0)

    def test_wrong_dim_errors(self):
        store = VectorStore(dim=2)
        with pytest.raises(StoreError):
            store.upsert("a", emb(1, 2, 3))


def brute_force_knn(store: VectorStore, query, k: int):
    """Independent oracle: full sort over explicitly computed scores."""
    scored = []
    for id in store.ids:
        vec, _ = store.get(id)
        v = np.array(vec.values)
        q = np.array(query.values)
        if store.metric == "cosine":
            score = float(v @ q / (np.linalg.norm(v) * np.linalg.norm(q)))
            key = (-score, id)
        else:
            score = float(np.linalg.norm(v - q))
            key = (score, id)
        scored.append((key, id, score))
    scored.sort(key=lambda t: t[0])
    return [(id, score) for _, id, score in scored[:k]]


class TestKnn:
    def _store(self, n=100, dim=8, seed=0, metric="cosine"):
        rng = np.random.default_rng(seed)
        store = VectorStore(dim=dim, metric=metric)
        for i in range(n):
            store.upsert(f"doc{i:03d}", emb(*rng.normal(0, 1, dim)))
        return store

    def test_exact_match_ranks_first_with_score_one(self):
        store = self._store(20)
        target, _ = store.get("doc007")
        results = store.knn_search(target, 3)
        assert results[0][0] == "doc007"
        assert abs(results[0][1] - 1.0) < 1e-6

    def test_k_larger_than_store_returns_everything_ranked(self):
        store = self._store(5)
        results = store.knn_search(emb(*([1.0] + [0.0] * 7)), 50)
        assert len(results) == 5

    def test_empty_store_returns_empty(self):
        store = VectorStore(dim=2)
        assert store.knn_search(emb(1, 0), 3) == []

    @staticmethod
    def assert_same_ranking(got, expected):
        # ids and order must agree exactly; scores only up to summation-order
        # float noise, since the oracle accumulates differently than BLAS.
        assert [id for id, _ in got] == [id for id, _ in expected]
        assert np.allclose([s for _, s in got], [s for _, s in expected], atol=1e-9)

    @pytest.mark.parametrize("metric", ["cosine", "euclidean"])
    def test_matches_brute_force_oracle(self, metric):
        store = self._store(100, seed=42, metric=metric)
        rng = np.random.default_rng(7)
        for _ in range(5):
            query = emb(*rng.normal(0, 1, 8))
            self.assert_same_ranking(store.knn_search(query, 10), brute_force_knn(store, query, 10))

    def test_ties_break_by_id(self):
        store = VectorStore(dim=2)
        store.upsert("b", emb(1, 0))
        store.upsert("a", emb(1, 0))
        results = store.knn_search(emb(2, 0), 2)
        assert [r[0] for r in results] == ["a", "b"]

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000), k=st.integers(min_value=1, max_value=30))
    def test_knn_equals_oracle_property(self, seed, k):
        store = self._store(n=25, dim=4, seed=seed)
        rng = np.random.default_rng(seed + 1)
        query = emb(*rng.normal(0, 1, 4))
        self.assert_same_ranking(store.knn_search(query, k), brute_force_knn(store, query, k))


class TestPersistence:
    def test_round_trip_bit_identical(self, tmp_path):
        store = VectorStore(dim=3, metric="cosine")
        rng = np.random.default_rng(1)
        for i in range(3):
            store.upsert(f"id{i}", emb(*rng.normal(0, 1, 3)), {"topic": f"t{i}", "n": i})
        store.save(tmp_path / "s")
        loaded = VectorStore.load(tmp_path / "s")
        assert loaded.ids == store.ids
        assert loaded.dim == store.dim and loaded.metric == store.metric
        for id in store.ids:
            orig_vec, orig_meta = store.get(id)
            new_vec, new_meta = loaded.get(id)
            assert orig_vec.values == new_vec.values  # float32 both ways: bit-exact
            assert orig_meta == new_meta

    def test_truncated_matrix_rejected(self, tmp_path):
        store = VectorStore(dim=4)
        store.upsert("a", emb(1, 2, 3, 4))
        store.save(tmp_path / "s")
        matrix = tmp_path / "s.f32"
        matrix.write_bytes(matrix.read_bytes()[:-4])
        with pytest.raises(StoreError, match="floats"):
            VectorStore.load(tmp_path / "s")

    def test_manifest_dim_mismatch_rejected(self, tmp_path):
        store = VectorStore(dim=4)
        store.upsert("a", emb(1, 2, 3, 4))
        store.save(tmp_path / "s")
        manifest = tmp_path / "s.manifest.json"
        manifest.write_text(manifest.read_text().replace('"dim": 4', '"dim": 3'), encoding="utf-8")
        with pytest.raises(StoreError):
            VectorStore.load(tmp_path / "s")

    def test_corrupt_manifest_rejected(self, tmp_path):
        store = VectorStore(dim=2)
        store.upsert("a", emb(1, 2))
        store.save(tmp_path / "s")
        (tmp_path / "s.manifest.json").write_text("{not json", encoding="utf-8")
        with pytest.raises(StoreError, match="manifest"):
            VectorStore.load(tmp_path / "s")
