"""Entity labeling: prompt construction, LLM reply parsing, verbatim
validation, and type filtering.

The labeling contract is strict: a mention survives only if its text occurs
in the source document exactly (case-sensitive) and its type is one of the
requested choices. Everything else lands in a per-sample reject list with a
reason, so nothing is silently dropped.
"""
from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from .enrich import EnrichedArticle

log = logging.getLogger(__name__)

# The 54 requested entity types. Prompts shuffle this order per document to
# avoid biasing the labeler toward early list positions.
DEFAULT_ENTITY_TYPES: tuple[str, ...] = (
    "Person", "Politician", "Actor", "Athlete", "Artist", "Writer",
    "Character", "Musician", "Scientist", "Director", "Title", "Organization",
    "Political Party", "Election", "Facility", "Location", "Country", "City",
    "Nationality", "Language", "Year", "Date", "Time", "Event", "Award",
    "Song", "Movie", "Book", "Media", "Band", "Album", "TV Show", "Game",
    "Software", "Brand", "Money", "Price", "Law", "Quantity", "Number",
    "Percentage", "Sports", "Politics", "Weapon", "Product", "Food",
    "Material", "Transportation", "Vehicle", "Religion", "Technology",
    "Space", "Medicine", "Science",
)

_PROMPT_HEAD = """\
A chat between a User and an artificial intelligence Assistant that is an expert at identifying and extracting named entities from text. The Assistant's task is to analyze a given text and extract all entities and identify their entity types.

Instructions for the Assistant:
1. **read the text** The Assistant reads the text provided by the User.
2. **identify entities** As the Assistant reads the text, the Assistant identifies entities in the text in the order that they exist in the text.
3. **determine entity types** For each Found Entity, the Assistant determines an entity type that best describes the Found Entity from the following list of entity types:
{entity_types}
4. **verbatim extraction** The Assistant extracts the Found Entity exactly as found in the text. The Assistant does not invent entities that are not present in the text.

The output should be a JSON dictionary according to the following schema:
{'properties': {'entities': {'items': {'items': {'type': 'string'}, 'maxItems': 2, 'minItems': 2, 'type': 'array'}, 'title': 'Entities', 'type': 'array'}}, 'required': ['entities'], 'title': 'ENTITY_MODEL', 'type': 'object'}

Example:
Text Input: "In 2021, Apple released the iPhone 13 at 75% battery power."
Expected Output: { "entities" : [ [ "2021" , "Date" ] , [ "Apple" , "Organization" ] , [ "iPhone 13" , "Product" ] , [ "75%" , "Percentage" ] ] }
"""

_FEW_SHOT = """\
Q: Given the following text, please extract all named entities:
<doc>
French Prime Minister Gabriel Attal, 61, announced at the ongoing United Nations (UN) climate summit that France will be investing £500 million into the French renewable energy sector, specifically, a Parisian hydroelectric dam. The news comes after the conservative French government's recent election victory and new laws being added to the French constitution.
</doc>

A: { "entities" : [ [ "French" , "Nationality" ] , [ "Prime Minister" , "Title" ] , [ "French Prime Minister" , "Title" ] , [ "French Prime Minister Gabriel Attal" , "Politician" ] , [ "Gabriel Attal" , "Person" ] , [ "61" , "Number" ] , [ "United Nations" , "Organization" ] , [ "UN" , "Organization" ] , [ "United Nations (UN) climate summit" , "Event" ] , [ "climate summit" , "Event" ] , [ "France" , "Country" ] , [ "£500 million" , "Money" ] , [ "French" , "Nationality" ] , [ "Parisian" , "Nationality" ] , [ "hydroelectric dam" , "Facility" ] , [ "French" , "Nationality" ] , [ "French government" , "Organization" ] , [ "election victory" , "Event" ] , [ "French" , "Nationality" ] , [ "French constitution" , "Law" ] , [ "constitution" , "Law" ] ] }

Q: Given the following text, please extract all named entities:
<doc>
Daniel is 5-foot-2 and 181 pounds, while his brother, John, is 6-foot-1 and 200 pounds. They both play for the New York Giants in the NFL. Both scored 3 touchdowns, 10% of the match's total, in the last game against the Dallas Cowboys, ending with a score of 21-17 after 45 minutes. Their average scores for the season are 12.5 points per game, after 4,000+ games. The first 5 games had -56 odds for the home team.
</doc>

A: { "entities" : [ [ "Daniel" , "Athlete" ] , [ "5-foot-2" , "Quantity" ] , [ "181 pounds" , "Quantity" ] , [ "John" , "Athlete" ] , [ "6-foot-1" , "Quantity" ] , [ "200 pounds" , "Quantity" ] , [ "New York" , "City" ] , [ "New York Giants" , "Organization" ] , [ "New York Giants" , "Sports" ] , [ "NFL" , "Organization" ] , [ "NFL" , "Sports" ] , [ "3 touchdowns" , "Quantity" ] , [ "10%" , "Percentage" ] , [ "Dallas" , "City" ] , [ "Dallas Cowboys" , "Organization" ] , [ "Dallas Cowboys" , "Sports" ] , [ "21-17" , "Quantity" ] , [ "45 minutes" , "Time" ] , [ "12.5 points" , "Quantity" ] , [ "4,000+" , "Quantity" ] , [ "5" , "Quantity" ] , [ "-56" , "Number" ] ] }
"""

_PROMPT_TAIL = """\
Given the following text, please extract all entities and their entity types:
<doc>
{input}
</doc>"""


class ParseError(Exception):
    """No JSON object could be located in the model output."""


class SchemaError(Exception):
    """The JSON was readable but violates the expected entities schema."""

    def __init__(self, message: str, indices: Sequence[int] = ()):
        super().__init__(message)
        self.indices = tuple(indices)


class LLMClientError(Exception):
    """The labeling backend is unreachable; the batch cannot continue."""


@dataclass(frozen=True)
class EntityTypeSet:
    types: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.types:
            raise ValueError("entity type set is empty")
        if len(set(self.types)) != len(self.types):
            raise ValueError("entity type set contains duplicates")
        if any(not t for t in self.types):
            raise ValueError("entity type set contains an empty string")

    def __contains__(self, t: str) -> bool:
        return t in set(self.types)

    def __len__(self) -> int:
        return len(self.types)

    @classmethod
    def default(cls) -> "EntityTypeSet":
        return cls(DEFAULT_ENTITY_TYPES)

    @classmethod
    def from_file(cls, path: str | Path) -> "EntityTypeSet":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(tuple(line.strip() for line in lines if line.strip()))


@dataclass(frozen=True)
class EntityMention:
    text: str
    type: str

    def as_pair(self) -> list[str]:
        return [self.text, self.type]


@dataclass(frozen=True)
class RejectedMention:
    text: str
    type: str
    reason: str


@dataclass(frozen=True)
class AnnotatedSample:
    id: str
    source_text: str
    mentions: tuple[EntityMention, ...]
    rejected: tuple[RejectedMention, ...]
    metadata: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "text": self.source_text,
            "entities": [m.as_pair() for m in self.mentions],
            "rejected": [[r.text, r.type, r.reason] for r in self.rejected],
            "meta": self.metadata,
        }

    @classmethod
    def from_record(cls, record: dict) -> "AnnotatedSample":
        return cls(
            id=record["id"],
            source_text=record["text"],
            mentions=tuple(EntityMention(t, y) for t, y in record.get("entities", [])),
            rejected=tuple(RejectedMention(t, y, r) for t, y, r in record.get("rejected", [])),
            metadata=dict(record.get("meta", {})),
        )


def shuffled_types(types: EntityTypeSet, seed: int) -> list[str]:
    import random

    order = list(types.types)
    random.Random(seed).shuffle(order)
    return order


def build_prompt(text: str, types: EntityTypeSet, seed: int) -> str:
    """Assemble the full labeling prompt for one document.

    The instruction block carries the requested types in seed-shuffled order
    (comma-separated, trailing period); two worked question/answer exchanges
    sit between the instructions and the final request.
    """
    if not text:
        raise ValueError("cannot build a prompt for empty text")
    type_list = ", ".join(shuffled_types(types, seed)) + "."
    head = _PROMPT_HEAD.replace("{entity_types}", type_list)
    tail = _PROMPT_TAIL.replace("{input}", text)
    return f"{head}\n{_FEW_SHOT}\n{tail}"


def parse_entities(llm_output: str) -> list[EntityMention]:
    """Pull the first JSON object out of a model reply and read its
    ``entities`` array of [text, type] pairs."""
    decoder = json.JSONDecoder()
    payload = None
    for pos, ch in enumerate(llm_output):
        if ch != "{":
            continue
        try:
            candidate, _ = decoder.raw_decode(llm_output, pos)
        except json.JSONDecodeError:
            continue
        if isinstance(candidate, dict):
            payload = candidate
            break
    if payload is None:
        raise ParseError("no JSON object found in model output")
    if "entities" not in payload:
        raise SchemaError("JSON object has no 'entities' key")
    entities = payload["entities"]
    if not isinstance(entities, list):
        raise SchemaError("'entities' is not an array")

    bad: list[int] = []
    mentions: list[EntityMention] = []
    for i, item in enumerate(entities):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(part, str) for part in item)
        ):
            bad.append(i)
            continue
        mentions.append(EntityMention(text=item[0], type=item[1]))
    if bad:
        raise SchemaError(f"entities at indices {bad} are not [text, type] string pairs", bad)
    return mentions


def validate_verbatim(
    mentions: Sequence[EntityMention], source_text: str
) -> tuple[list[EntityMention], list[RejectedMention]]:
    """Keep mentions whose text occurs in the source exactly as extracted.

    Matching is case-sensitive by design; anything else would count
    paraphrases as extractions. Empty texts never match.
    """
    kept: list[EntityMention] = []
    rejected: list[RejectedMention] = []
    for m in mentions:
        if m.text and m.text in source_text:
            kept.append(m)
        else:
            rejected.append(RejectedMention(m.text, m.type, "not-verbatim"))
    return kept, rejected


def filter_types(
    mentions: Sequence[EntityMention], allowed: EntityTypeSet
) -> tuple[list[EntityMention], list[RejectedMention]]:
    """Drop mentions typed outside the requested set (including the empty
    string the labeler occasionally invents)."""
    allowed_set = set(allowed.types)
    kept: list[EntityMention] = []
    rejected: list[RejectedMention] = []
    for m in mentions:
        if m.type in allowed_set:
            kept.append(m)
        else:
            rejected.append(RejectedMention(m.text, m.type, "unrequested-type"))
    return kept, rejected


class LLMClient(Protocol):
    def complete(self, prompt: str) -> str: ...


@dataclass
class HttpLLMClient:
    """POST {prompt} -> {completion}."""

    url: str
    auth_header: tuple[str, str] | None = None
    timeout_s: float = 120.0
    _client: httpx.Client | None = None

    def complete(self, prompt: str) -> str:
        if self._client is None:
            headers = dict([self.auth_header]) if self.auth_header else {}
            self._client = httpx.Client(timeout=self.timeout_s, headers=headers)
        try:
            resp = self._client.post(self.url, json={"prompt": prompt})
        except httpx.HTTPError as exc:
            raise LLMClientError(f"labeling backend unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise LLMClientError(f"labeling backend returned {resp.status_code}")
        body = resp.json()
        if "completion" not in body:
            raise LLMClientError("labeling reply missing 'completion'")
        return str(body["completion"])


_MOCK_ENTITY_PATTERN = re.compile(r"[A-Z][a-zA-Z]+(?: [A-Z][a-zA-Z]+)*")
_MOCK_YEAR_PATTERN = re.compile(r"\b(?:1[89]\d\d|20\d\d)\b")
_MOCK_TYPE_CHOICES = ("Person", "Organization", "City", "Country", "Event", "Product")

# Strings the mock labeler plants to exercise the reject paths. Both are
# gated on the document hash, so a given document always gets the same ones.
MOCK_FAKE_MENTION = ("Quantum Finch Paradox", "Person")
MOCK_BAD_TYPE = "Cheese"


def mock_planted_corruptions(doc: str) -> tuple[bool, bool]:
    """(plant a not-in-text mention, plant an unrequested type) for ``doc``."""
    digest = hashlib.sha256(doc.encode("utf-8")).digest()
    return digest[0] % 3 == 0, digest[1] % 3 == 0


@dataclass
class MockLLMClient:
    """Deterministic labeler for offline runs.

    Extracts capitalized word runs and year-like numbers from the document in
    the prompt, types them by hash, and (hash-gated) plants one non-verbatim
    mention and one unrequested-type mention so downstream reject handling
    stays exercised end to end.
    """

    max_mentions: int = 6

    def complete(self, prompt: str) -> str:
        # The document to label is the LAST <doc> block; earlier ones belong
        # to the worked examples.
        open_at = prompt.rfind("<doc>\n")
        close_at = prompt.rfind("\n</doc>")
        if open_at == -1 or close_at <= open_at:
            raise LLMClientError("mock labeler could not locate the document")
        doc = prompt[open_at + len("<doc>\n"):close_at]

        found: list[tuple[int, list[str]]] = []
        for m in _MOCK_ENTITY_PATTERN.finditer(doc):
            digest = hashlib.sha256(m.group().encode("utf-8")).digest()
            found.append((m.start(), [m.group(), _MOCK_TYPE_CHOICES[digest[0] % len(_MOCK_TYPE_CHOICES)]]))
        for m in _MOCK_YEAR_PATTERN.finditer(doc):
            found.append((m.start(), [m.group(), "Year"]))
        found.sort(key=lambda pair: pair[0])
        entities = [pair for _, pair in found[: self.max_mentions]]

        plant_fake, plant_bad_type = mock_planted_corruptions(doc)
        if plant_fake and MOCK_FAKE_MENTION[0] not in doc:
            entities.append(list(MOCK_FAKE_MENTION))
        if plant_bad_type and entities:
            entities.append([entities[0][0], MOCK_BAD_TYPE])
        return json.dumps({"entities": entities}, ensure_ascii=False)


@dataclass
class AnnotateSummary:
    annotated: int = 0
    failed: int = 0
    mentions_kept: int = 0
    mentions_rejected: int = 0
    reprompts: int = 0
    failed_ids: list[str] = field(default_factory=list)


def _attempt_seed(seed: int, index: int, attempt: int) -> int:
    # Distinct streams per article and per re-prompt, reproducible in tests.
    return seed + 1_000_003 * index + 7_919 * attempt


def annotate_article(
    article: EnrichedArticle,
    client: LLMClient,
    types: EntityTypeSet,
    seed: int,
    bucket: int,
    cluster: int,
) -> AnnotatedSample:
    """Label one article (no retry logic; see annotate_corpus)."""
    text = article.summary_translated
    prompt = build_prompt(text, types, seed)
    mentions = parse_entities(client.complete(prompt))
    kept, bad_verbatim = validate_verbatim(mentions, text)
    kept, bad_type = filter_types(kept, types)
    return AnnotatedSample(
        id=article.base.id,
        source_text=text,
        mentions=tuple(kept),
        rejected=tuple(bad_verbatim + bad_type),
        metadata={
            "country": article.base.country,
            "topic": article.topic,
            "bucket": bucket,
            "cluster": cluster,
            "published_at": article.base.published_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        },
    )


def annotate_corpus(
    articles: Sequence[EnrichedArticle],
    client: LLMClient,
    types: EntityTypeSet,
    seed: int,
    retry_cap: int = 2,
    cluster_of: dict[str, tuple[int, int]] | None = None,
    checkpoint_path: str | Path | None = None,
) -> tuple[list[AnnotatedSample], AnnotateSummary]:
    """Label a batch of articles, re-prompting on malformed replies.

    A parse or schema failure triggers a fresh prompt (new shuffle seed) up
    to ``retry_cap`` re-prompts; an article that never parses is recorded as
    failed, not raised. A client outage aborts the batch: completed samples
    are flushed to ``checkpoint_path`` (when given) before the error
    propagates. Output order follows input order.
    """
    samples: list[AnnotatedSample] = []
    summary = AnnotateSummary()
    try:
        for index, article in enumerate(articles):
            bucket, cluster = (cluster_of or {}).get(article.base.id, (-1, -1))
            sample = None
            for attempt in range(retry_cap + 1):
                try:
                    sample = annotate_article(
                        article, client, types,
                        _attempt_seed(seed, index, attempt), bucket, cluster,
                    )
                    break
                except (ParseError, SchemaError) as exc:
                    if attempt < retry_cap:
                        summary.reprompts += 1
                        log.warning("article %s: re-prompting after %s", article.base.id, exc)
                    else:
                        log.error("article %s: giving up after %d re-prompts", article.base.id, retry_cap)
            if sample is None:
                summary.failed += 1
                summary.failed_ids.append(article.base.id)
                continue
            samples.append(sample)
            summary.annotated += 1
            summary.mentions_kept += len(sample.mentions)
            summary.mentions_rejected += len(sample.rejected)
    except LLMClientError:
        if checkpoint_path is not None:
            write_samples(samples, checkpoint_path)
            log.error("labeling aborted; %d samples checkpointed to %s", len(samples), checkpoint_path)
        raise
    return samples, summary


def write_samples(samples: Sequence[AnnotatedSample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_record(), ensure_ascii=False) + "\n")


def read_samples(path: str | Path) -> list[AnnotatedSample]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(AnnotatedSample.from_record(json.loads(line)))
    return out


__all__ = [
    "AnnotateSummary",
    "AnnotatedSample",
    "DEFAULT_ENTITY_TYPES",
    "EntityMention",
    "EntityTypeSet",
    "HttpLLMClient",
    "LLMClient",
    "LLMClientError",
    "MOCK_BAD_TYPE",
    "MOCK_FAKE_MENTION",
    "MockLLMClient",
    "ParseError",
    "RejectedMention",
    "SchemaError",
    "annotate_article",
    "annotate_corpus",
    "build_prompt",
    "filter_types",
    "mock_planted_corruptions",
    "parse_entities",
    "read_samples",
    "shuffled_types",
    "validate_verbatim",
    "write_samples",
]
