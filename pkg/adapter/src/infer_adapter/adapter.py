"""Batch prediction over a test JSONL file.

Input lines follow the evaluation pair schema: ``{"id": ..., "text": ...,
"entities": [[text, type], ...]}`` (gold entities are ignored by real model
backends). Output files carry ``{"id": ..., "entities": [...]}`` with one
line per input line in the same order.

Backends:
  echo-gold        debug closure backend; echoes the gold entities verbatim
  hf:<model-id>    transformers token-classification pipeline, aggregated
                   spans thresholded on score and mapped onto the requested
                   entity types
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

log = logging.getLogger(__name__)

DEFAULT_SPAN_THRESHOLD = 0.5
DEFAULT_BATCH_SIZE = 12

# Common tagset names seen in token-classification checkpoints, mapped to the
# long-form types the requested lists usually carry.
LABEL_ALIASES = {
    "PER": "Person",
    "PERSON": "Person",
    "ORG": "Organization",
    "LOC": "Location",
    "GPE": "Location",
    "FAC": "Facility",
    "EVENT": "Event",
    "DATE": "Date",
    "TIME": "Time",
    "MONEY": "Money",
    "PERCENT": "Percentage",
    "LANGUAGE": "Language",
    "LAW": "Law",
    "PRODUCT": "Product",
}


class AdapterError(Exception):
    """Configuration, schema, or model-loading failure."""


class SchemaViolations(AdapterError):
    """Input lines that do not follow the pair schema."""

    def __init__(self, errors: list[dict]):
        super().__init__(f"{len(errors)} malformed input lines")
        self.errors = errors


@dataclass(frozen=True)
class AdapterConfig:
    model: str
    types: tuple[str, ...]
    span_threshold: float = DEFAULT_SPAN_THRESHOLD
    batch_size: int = DEFAULT_BATCH_SIZE
    output: Path = Path("predictions.jsonl")

    def __post_init__(self) -> None:
        if not self.model:
            raise AdapterError("model identifier is empty")
        if not self.types:
            raise AdapterError("entity type list is empty")
        if not 0.0 < self.span_threshold < 1.0:
            raise AdapterError(
                f"span_threshold must be inside (0, 1), got {self.span_threshold}"
            )
        if self.batch_size < 1:
            raise AdapterError("batch_size must be >= 1")


def load_types(path: str | Path) -> tuple[str, ...]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    types = tuple(line.strip() for line in lines if line.strip())
    if not types:
        raise AdapterError(f"entity types file {path} is empty")
    return types


class EchoGoldBackend:
    """Returns each sample's gold entities unchanged. Exists so the whole
    adapter -> prediction-file -> harness loop can be verified to score a
    perfect 1.0 before any real model enters the picture."""

    def predict(self, records: Sequence[dict], config: AdapterConfig) -> list[list[list[str]]]:
        return [[list(pair) for pair in r.get("entities", [])] for r in records]


class HfTokenClassificationBackend:
    def __init__(self, model_id: str):
        try:
            from transformers import pipeline
        except ImportError as exc:
            raise AdapterError(
                "the hf: backend needs the transformers extra (pip install 'infer-adapter[hf]')"
            ) from exc
        try:
            self._pipe = pipeline(
                "token-classification", model=model_id, aggregation_strategy="simple"
            )
        except Exception as exc:
            raise AdapterError(f"cannot load model {model_id!r}: {exc}") from exc

    def predict(self, records: Sequence[dict], config: AdapterConfig) -> list[list[list[str]]]:
        wanted = {t.lower(): t for t in config.types}
        texts = [r["text"] for r in records]
        raw = self._pipe(texts, batch_size=config.batch_size)
        if records and isinstance(raw, dict):
            raw = [raw]
        out: list[list[list[str]]] = []
        for text, spans in zip(texts, raw):
            entities: list[list[str]] = []
            for span in spans:
                if float(span["score"]) < config.span_threshold:
                    continue
                label = str(span.get("entity_group") or span.get("entity") or "")
                mapped = LABEL_ALIASES.get(label.upper(), label)
                requested = wanted.get(mapped.lower())
                if requested is None:
                    continue
                surface = text[span["start"]:span["end"]]
                entities.append([surface, requested])
            out.append(entities)
        return out


def build_backend(model: str):
    if model == "echo-gold":
        return EchoGoldBackend()
    if model.startswith("hf:"):
        return HfTokenClassificationBackend(model[len("hf:"):])
    raise AdapterError(
        f"unknown model {model!r}; expected 'echo-gold' or 'hf:<model-id>'"
    )


def read_test_file(path: str | Path) -> list[dict]:
    """Parse the test file, collecting per-line schema errors."""
    records: list[dict] = []
    errors: list[dict] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("line is not a JSON object")
                if not isinstance(record.get("id"), str) or not record["id"]:
                    raise ValueError("missing or empty id")
                if "text" in record and not isinstance(record["text"], str):
                    raise ValueError("text is not a string")
                entities = record.get("entities", [])
                if not isinstance(entities, list) or any(
                    not isinstance(e, list) or len(e) != 2
                    or not all(isinstance(p, str) for p in e)
                    for e in entities
                ):
                    raise ValueError("entities must be [text, type] string pairs")
            except (json.JSONDecodeError, ValueError) as exc:
                errors.append({"line": lineno, "reason": str(exc)})
                continue
            records.append(record)
    if errors:
        raise SchemaViolations(errors)
    return records


def predict_file(test_path: str | Path, config: AdapterConfig) -> Path:
    """Run the configured backend over a test file and write predictions.

    One output line per input line, ids in input order.
    """
    records = read_test_file(test_path)
    backend = build_backend(config.model)

    predictions: list[list[list[str]]] = []
    for start in range(0, len(records), config.batch_size):
        batch = records[start:start + config.batch_size]
        batch_out = backend.predict(batch, config)
        if len(batch_out) != len(batch):
            raise AdapterError(
                f"backend returned {len(batch_out)} results for a batch of {len(batch)}"
            )
        predictions.extend(batch_out)

    output = Path(config.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", encoding="utf-8") as fh:
        for record, entities in zip(records, predictions):
            fh.write(json.dumps({"id": record["id"], "entities": entities},
                                ensure_ascii=False) + "\n")
    log.info("wrote %d prediction lines to %s", len(records), output)
    return output
