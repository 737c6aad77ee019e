from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

import pytest

from newsforge.corpus import Article, ArticleSet

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"


def make_article(
    id: str,
    country: str = "United States",
    language: str = "en",
    rank: int | None = 100,
    published: str = "2024-03-01T12:00:00Z",
    title: str = "A headline",
    body: str = "Body text mentioning Geneva and the World Trade Council in 2024.",
) -> Article:
    return Article(
        id=id,
        title=title,
        summary="",
        body=body,
        language=language,
        country=country,
        source_domain="outlet.example",
        domain_rank=rank,
        published_at=datetime.fromisoformat(published.replace("Z", "+00:00")).astimezone(timezone.utc),
    )


def article_set(*articles: Article) -> ArticleSet:
    return ArticleSet.of(articles)


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


def load_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))
