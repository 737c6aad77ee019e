"""News-article corpus handling: JSONL ingestion, language filtering,
country-of-origin histograms, domain-authority ordering, and the
distribution-matching subsample.

Articles are immutable records. All operations here are pure functions over
tuples of articles, so they are trivially safe to call from multiple threads.
"""
from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .apportion import largest_remainder

# Languages the translation/summarization backend accepts. Articles in any
# other language are dropped at ingestion.
DEFAULT_LANGUAGES: tuple[str, ...] = (
    "en", "es", "pt", "de", "ru", "fr", "ar", "it", "uk", "no", "sv", "da",
)

_REQUIRED_FIELDS = ("id", "title", "summary", "language", "country", "source_domain", "published_at")


class CorpusError(Exception):
    """Unrecoverable corpus-level failure (unreadable file, bad request)."""


def canonical_country(name: str) -> str:
    """Trim and NFC-normalize a country display name for exact comparison."""
    return unicodedata.normalize("NFC", name.strip())


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 UTC timestamp like ``2024-02-20T18:10:00Z``."""
    raw = value.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {value!r} has no UTC offset")
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class Article:
    """One news item with provenance; enrichment fields live elsewhere."""

    id: str
    title: str
    summary: str
    language: str
    country: str
    source_domain: str
    published_at: datetime
    body: str = ""
    domain_rank: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "country", canonical_country(self.country))
        if self.domain_rank is not None and self.domain_rank <= 0:
            raise ValueError(f"article {self.id}: domain_rank must be positive")

    @classmethod
    def from_record(cls, record: dict) -> "Article":
        missing = [f for f in _REQUIRED_FIELDS if f not in record]
        if missing:
            raise ValueError(f"missing fields: {', '.join(missing)}")
        if not isinstance(record["id"], str) or not record["id"]:
            raise ValueError("id must be a non-empty string")
        rank = record.get("domain_rank")
        if rank is not None and (not isinstance(rank, int) or isinstance(rank, bool)):
            raise ValueError("domain_rank must be an integer when present")
        return cls(
            id=record["id"],
            title=str(record["title"]),
            summary=str(record["summary"]),
            body=str(record.get("body") or ""),
            language=str(record["language"]).lower(),
            country=str(record["country"]),
            source_domain=str(record["source_domain"]),
            domain_rank=rank,
            published_at=parse_timestamp(str(record["published_at"])),
        )

    def to_record(self) -> dict:
        record = {
            "id": self.id,
            "title": self.title,
            "summary": self.summary,
            "body": self.body,
            "language": self.language,
            "country": self.country,
            "source_domain": self.source_domain,
            "domain_rank": self.domain_rank,
            "published_at": self.published_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        }
        return record


@dataclass(frozen=True)
class Reject:
    line: int
    reason: str


@dataclass(frozen=True)
class ArticleSet:
    """Ordered, id-unique collection of articles."""

    articles: tuple[Article, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for a in self.articles:
            if a.id in seen:
                raise ValueError(f"duplicate article id {a.id!r}")
            seen.add(a.id)

    def __len__(self) -> int:
        return len(self.articles)

    def __iter__(self):
        return iter(self.articles)

    def __getitem__(self, i: int) -> Article:
        return self.articles[i]

    @classmethod
    def of(cls, articles: Iterable[Article]) -> "ArticleSet":
        return cls(tuple(articles))


@dataclass(frozen=True)
class CountryDistribution:
    """Per-country article counts; zero-count keys are never retained."""

    counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(c <= 0 for c in self.counts.values()):
            raise ValueError("zero or negative counts are not allowed")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, country: str) -> int:
        return self.counts.get(canonical_country(country), 0)


def load_articles(path: str | Path) -> tuple[ArticleSet, list[Reject]]:
    """Read an article JSONL file.

    Returns the parseable articles plus a rejects report; a malformed line is
    recorded with its 1-based line number instead of being silently dropped.
    An unreadable file is fatal.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc

    articles: list[Article] = []
    rejects: list[Reject] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("line is not a JSON object")
            article = Article.from_record(record)
            if article.id in seen:
                raise ValueError(f"duplicate id {article.id!r}")
        except (json.JSONDecodeError, ValueError) as exc:
            rejects.append(Reject(line=lineno, reason=str(exc)))
            continue
        seen.add(article.id)
        articles.append(article)
    return ArticleSet.of(articles), rejects


def write_rejects(rejects: Sequence[Reject], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in rejects:
            fh.write(json.dumps({"line": r.line, "reason": r.reason}) + "\n")


def filter_by_language(articles: ArticleSet, allowed: Sequence[str] = DEFAULT_LANGUAGES) -> ArticleSet:
    """Keep exactly the articles whose language is in ``allowed``; order preserved."""
    if not allowed:
        raise ValueError("allowed language list must be non-empty")
    allowed_set = {lang.lower() for lang in allowed}
    return ArticleSet.of(a for a in articles if a.language in allowed_set)


def country_histogram(articles: ArticleSet) -> CountryDistribution:
    counts: dict[str, int] = {}
    for a in articles:
        counts[a.country] = counts.get(a.country, 0) + 1
    return CountryDistribution(counts)


def _rank_key(article: Article) -> tuple[float, str]:
    # Absent rank sorts after every ranked article; id breaks ties.
    rank = float("inf") if article.domain_rank is None else float(article.domain_rank)
    return (rank, article.id)


def sort_by_domain_rank(articles: ArticleSet) -> ArticleSet:
    """Ascending domain-authority order (lower rank = more backlinks)."""
    return ArticleSet.of(sorted(articles, key=_rank_key))


def sample_matching_distribution(
    articles: ArticleSet,
    target: CountryDistribution,
    n: int,
    seed: int = 0,
) -> ArticleSet:
    """Pick ``n`` articles whose country histogram follows ``target``.

    Per-country quotas are the largest-remainder apportionment of ``target``
    scaled to n. Within a country the most authoritative articles (domain-rank
    order) are preferred. Quota that cannot be filled from an under-supplied
    country is refilled from the remaining articles in global rank order.

    The selection rules are fully ordered, so ``seed`` does not currently
    influence the result; it is part of the signature so configs can pin it
    and future stochastic policies stay call-compatible.
    """
    del seed  # all tie-breaks are deterministic; see docstring
    if n > len(articles):
        raise CorpusError(f"cannot sample {n} articles from a set of {len(articles)}")
    if n == len(articles):
        return articles

    quotas = largest_remainder(
        {canonical_country(c): v for c, v in target.counts.items()}, n
    )
    ranked = sort_by_domain_rank(articles)
    by_country: dict[str, list[Article]] = {}
    for a in ranked:
        by_country.setdefault(a.country, []).append(a)

    chosen: list[Article] = []
    chosen_ids: set[str] = set()
    for country, quota in quotas.items():
        for a in by_country.get(country, [])[:quota]:
            chosen.append(a)
            chosen_ids.add(a.id)

    shortfall = n - len(chosen)
    if shortfall > 0:
        for a in ranked:
            if shortfall == 0:
                break
            if a.id not in chosen_ids:
                chosen.append(a)
                chosen_ids.add(a.id)
                shortfall -= 1

    # Final ordering mirrors step-3 output: authority order, then id.
    return ArticleSet.of(sorted(chosen, key=_rank_key))


__all__ = [
    "Article",
    "ArticleSet",
    "CorpusError",
    "CountryDistribution",
    "DEFAULT_LANGUAGES",
    "Reject",
    "canonical_country",
    "country_histogram",
    "filter_by_language",
    "load_articles",
    "parse_timestamp",
    "sample_matching_distribution",
    "sort_by_domain_rank",
    "write_rejects",
]
