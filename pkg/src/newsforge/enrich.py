"""Enrichment clients: translation/summarization/topic classification and
text embedding.

Both capabilities are pluggable. The HTTP backends speak a minimal JSON
protocol; the mock backends are fully deterministic so every downstream stage
can be tested and replayed byte-for-byte without external services.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import httpx

from .corpus import Article

log = logging.getLogger(__name__)

DEFAULT_EMBEDDING_DIM = 768

# Mock topics: assigned by article-id hash, weighted toward the head labels.
_MOCK_TOPICS = (
    "Politics", "Sports", "News", "Finance", "Crime",
    "Entertainment", "Business", "Technology", "Weather", "Science",
)
_MOCK_SUMMARY_CHARS = 280


class EnrichmentError(Exception):
    """Client exhausted its retries or returned no usable enrichment."""

    def __init__(self, message: str, article_id: str | None = None):
        super().__init__(message)
        self.article_id = article_id


class ProtocolError(Exception):
    """Backend replied, but the payload violates the client contract."""


@dataclass(frozen=True)
class EnrichedArticle:
    base: Article
    title_translated: str
    summary_translated: str
    topic: str

    def __post_init__(self) -> None:
        if not self.topic:
            raise ProtocolError(f"article {self.base.id}: empty topic")
        if self.base.title and not self.title_translated:
            raise ProtocolError(f"article {self.base.id}: empty translated title")
        if (self.base.body or self.base.summary) and not self.summary_translated:
            raise ProtocolError(f"article {self.base.id}: empty translated summary")

    def to_record(self) -> dict:
        record = self.base.to_record()
        record.update(
            title_translated=self.title_translated,
            summary_translated=self.summary_translated,
            topic=self.topic,
        )
        return record

    @classmethod
    def from_record(cls, record: dict) -> "EnrichedArticle":
        base_keys = {k: v for k, v in record.items()
                     if k not in ("title_translated", "summary_translated", "topic")}
        return cls(
            base=Article.from_record(base_keys),
            title_translated=record["title_translated"],
            summary_translated=record["summary_translated"],
            topic=record["topic"],
        )

    def embedding_text(self, mode: str = "title_summary") -> str:
        """Text fed to the embedding model; concatenation is configurable."""
        if mode == "title_summary":
            return f"{self.title_translated}\n{self.summary_translated}"
        if mode == "title":
            return self.title_translated
        if mode == "summary":
            return self.summary_translated
        raise ValueError(f"unknown embedding_text mode {mode!r}")


@dataclass(frozen=True)
class Embedding:
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding contains non-finite values")

    @property
    def dim(self) -> int:
        return len(self.values)


class TransientClientError(Exception):
    """Retryable failure (5xx, timeout, connection loss)."""


class EnrichmentClient(Protocol):
    def enrich(self, article: Article) -> dict: ...


class EmbeddingClient(Protocol):
    dim: int

    def embed(self, text: str) -> Sequence[float]: ...


@dataclass
class RetryPolicy:
    """Exponential backoff: attempts are capped, never unbounded."""

    max_attempts: int = 3
    base_delay_s: float = 0.5
    sleep: Callable[[float], None] = time.sleep

    def run(self, what: str, call: Callable[[], dict]) -> dict:
        last: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                return call()
            except TransientClientError as exc:
                last = exc
                log.warning("%s: transient failure on attempt %d/%d: %s",
                            what, attempt, self.max_attempts, exc)
                if attempt < self.max_attempts:
                    self.sleep(self.base_delay_s * 2 ** (attempt - 1))
        raise EnrichmentError(f"{what}: gave up after {self.max_attempts} attempts: {last}")


@dataclass
class HttpEnrichmentClient:
    """POST {id, title, body, language} -> {title_translated, summary_translated, topic}."""

    url: str
    auth_header: tuple[str, str] | None = None
    timeout_s: float = 30.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    _client: httpx.Client | None = None

    def _http(self) -> httpx.Client:
        if self._client is None:
            headers = dict([self.auth_header]) if self.auth_header else {}
            self._client = httpx.Client(timeout=self.timeout_s, headers=headers)
        return self._client

    def enrich(self, article: Article) -> dict:
        payload = {"id": article.id, "title": article.title,
                   "body": article.body or article.summary, "language": article.language}

        def call() -> dict:
            try:
                resp = self._http().post(self.url, json=payload)
            except httpx.HTTPError as exc:
                raise TransientClientError(str(exc)) from exc
            if resp.status_code >= 500:
                raise TransientClientError(f"server returned {resp.status_code}")
            if resp.status_code != 200:
                raise ProtocolError(f"enrichment backend returned {resp.status_code}")
            try:
                return resp.json()
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"enrichment backend sent invalid JSON: {exc}") from exc

        return self.retry.run(f"enrich {article.id}", call)


@dataclass
class MockEnrichmentClient:
    """Offline stand-in: identity 'translation', truncated summary, hashed topic."""

    def enrich(self, article: Article) -> dict:
        digest = hashlib.sha256(article.id.encode("utf-8")).digest()
        topic = _MOCK_TOPICS[digest[0] % len(_MOCK_TOPICS)]
        source = article.body or article.summary or article.title
        return {
            "title_translated": article.title,
            "summary_translated": source[:_MOCK_SUMMARY_CHARS],
            "topic": topic,
        }


def translate_summarize_classify(article: Article, client: EnrichmentClient) -> EnrichedArticle:
    """Run one article through the enrichment backend and validate the reply."""
    payload = client.enrich(article)
    if not isinstance(payload, dict):
        raise ProtocolError(f"article {article.id}: enrichment payload is not an object")
    missing = [k for k in ("title_translated", "summary_translated", "topic") if k not in payload]
    if missing:
        raise ProtocolError(f"article {article.id}: enrichment reply missing {missing}")
    return EnrichedArticle(
        base=article,
        title_translated=str(payload["title_translated"]),
        summary_translated=str(payload["summary_translated"]),
        topic=str(payload["topic"]),
    )


@dataclass
class HttpEmbeddingClient:
    """POST {text} -> {embedding: [float, ...]} of the configured width."""

    url: str
    dim: int = DEFAULT_EMBEDDING_DIM
    model: str = ""
    auth_header: tuple[str, str] | None = None
    timeout_s: float = 30.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    _client: httpx.Client | None = None

    def _http(self) -> httpx.Client:
        if self._client is None:
            headers = dict([self.auth_header]) if self.auth_header else {}
            self._client = httpx.Client(timeout=self.timeout_s, headers=headers)
        return self._client

    def embed(self, text: str) -> Sequence[float]:
        payload = {"text": text}
        if self.model:
            payload["model"] = self.model

        def call() -> dict:
            try:
                resp = self._http().post(self.url, json=payload)
            except httpx.HTTPError as exc:
                raise TransientClientError(str(exc)) from exc
            if resp.status_code >= 500:
                raise TransientClientError(f"server returned {resp.status_code}")
            if resp.status_code != 200:
                raise ProtocolError(f"embedding backend returned {resp.status_code}")
            return resp.json()

        reply = self.retry.run("embed", call)
        if "embedding" not in reply:
            raise ProtocolError("embedding reply missing 'embedding'")
        return reply["embedding"]


@dataclass
class MockEmbeddingClient:
    """Hash-seeded unit vectors: stable across processes and platforms."""

    dim: int = DEFAULT_EMBEDDING_DIM

    def embed(self, text: str) -> Sequence[float]:
        if self.dim <= 0:
            raise ValueError("embedding dim must be positive")
        # Components come straight from SHA-256 output mapped into [-1, 1);
        # no transcendental functions, so results are bit-identical on any
        # IEEE-754 platform.
        values: list[float] = []
        counter = 0
        seed = hashlib.sha256(text.encode("utf-8")).digest()
        while len(values) < self.dim:
            block = hashlib.sha256(seed + counter.to_bytes(4, "little")).digest()
            for off in range(0, len(block) - 3, 4):
                if len(values) >= self.dim:
                    break
                u = int.from_bytes(block[off:off + 4], "little") / 2**32
                values.append(2.0 * u - 1.0)
            counter += 1
        norm = math.sqrt(sum(v * v for v in values))
        return [v / norm for v in values]


def enrich_all(
    articles: Sequence[Article],
    client: EnrichmentClient,
    max_in_flight: int = 8,
) -> list[EnrichedArticle]:
    """Enrich a batch with at most ``max_in_flight`` concurrent client calls.

    Results come back in input order no matter which calls finish first.
    """
    if max_in_flight < 1:
        raise ValueError("max_in_flight must be >= 1")
    if max_in_flight == 1 or len(articles) <= 1:
        return [translate_summarize_classify(a, client) for a in articles]

    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        futures = [pool.submit(translate_summarize_classify, a, client) for a in articles]
        return [f.result() for f in futures]


def write_enriched(articles: Sequence[EnrichedArticle], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in articles:
            fh.write(json.dumps(e.to_record(), ensure_ascii=False) + "\n")


def read_enriched(path) -> list[EnrichedArticle]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(EnrichedArticle.from_record(json.loads(line)))
    return out


def embed_text(text: str, client: EmbeddingClient) -> Embedding:
    """Embed one text; the backend must honor the configured dimension."""
    if not text:
        raise ValueError("cannot embed empty text")
    raw = list(client.embed(text))
    if len(raw) != client.dim:
        raise ProtocolError(
            f"embedding backend returned dim {len(raw)}, expected {client.dim}"
        )
    return Embedding(tuple(float(v) for v in raw))


__all__ = [
    "DEFAULT_EMBEDDING_DIM",
    "Embedding",
    "EmbeddingClient",
    "EnrichedArticle",
    "EnrichmentClient",
    "EnrichmentError",
    "HttpEmbeddingClient",
    "HttpEnrichmentClient",
    "MockEmbeddingClient",
    "MockEnrichmentClient",
    "ProtocolError",
    "RetryPolicy",
    "TransientClientError",
    "embed_text",
    "enrich_all",
    "read_enriched",
    "translate_summarize_classify",
    "write_enriched",
]
