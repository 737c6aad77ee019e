"""Exact-match span micro-F1 scoring and comparison-table rendering.

Matching is multiset-based: each gold mention can be matched by exactly one
predicted mention with an identical key, so duplicated surface forms must be
predicted the right number of times. Keys are (text, type) in pair mode and
(start, end, type) in span mode; no partial credit.

Scores are kept at full precision; rounding (half-up, one decimal, on the
x100 scale) happens only at render time, and deltas are computed from the
rounded display values so they agree with what a reader sees in the table.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class EvalError(Exception):
    """Malformed inputs, unknown models, or misaligned gold/prediction files."""


@dataclass(frozen=True)
class EvalCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn) < 0:
            raise EvalError("counts must be non-negative")

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "EvalCounts") -> "EvalCounts":
        return EvalCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def _mention_key(item, mode: str) -> tuple:
    if isinstance(item, (list, tuple)):
        parts = tuple(item)
    elif hasattr(item, "text") and hasattr(item, "type"):
        parts = (item.text, item.type)
    else:
        raise EvalError(f"cannot interpret mention {item!r}")
    if mode == "pair":
        if len(parts) != 2 or not all(isinstance(p, str) for p in parts):
            raise EvalError(f"pair-mode mention must be (text, type), got {parts!r}")
        return parts
    if mode == "span":
        if (
            len(parts) != 3
            or not isinstance(parts[0], int)
            or not isinstance(parts[1], int)
            or not isinstance(parts[2], str)
        ):
            raise EvalError(f"span-mode mention must be (start, end, type), got {parts!r}")
        return parts
    raise EvalError(f"unknown mode {mode!r}")


def micro_f1(gold: Iterable, pred: Iterable, mode: str = "pair") -> EvalCounts:
    """Count exact-match true positives between two mention multisets.

    tp is the size of the maximum multiset intersection; everything predicted
    beyond that is fp, everything gold left unmatched is fn.
    """
    gold_keys = Counter(_mention_key(m, mode) for m in gold)
    pred_keys = Counter(_mention_key(m, mode) for m in pred)
    tp = sum((gold_keys & pred_keys).values())
    return EvalCounts(tp=tp, fp=sum(pred_keys.values()) - tp, fn=sum(gold_keys.values()) - tp)


@dataclass
class EvalReport:
    """Scores per (dataset, model); counts attached when computed from files."""

    datasets: list[str]
    models: list[str]
    scores: dict[tuple[str, str], float] = field(default_factory=dict)  # fraction in [0, 1]
    counts: dict[tuple[str, str], EvalCounts] = field(default_factory=dict)

    def score(self, dataset: str, model: str) -> float:
        return self.scores[(dataset, model)]

    def average(self, model: str) -> float:
        return sum(self.scores[(d, model)] for d in self.datasets) / len(self.datasets)

    @classmethod
    def from_percent_table(
        cls, datasets: Sequence[str], columns: Mapping[str, Mapping[str, float]]
    ) -> "EvalReport":
        """Build a report from already-published percent scores."""
        report = cls(datasets=list(datasets), models=list(columns))
        for model, by_dataset in columns.items():
            missing = set(datasets) - set(by_dataset)
            if missing:
                raise EvalError(f"model {model} lacks scores for {sorted(missing)}")
            for dataset in datasets:
                report.scores[(dataset, model)] = by_dataset[dataset] / 100.0
        return report


def load_gold(path: str | Path, mode: str = "pair") -> dict[str, list[tuple]]:
    mentions, errors = _load_mentions(path, mode)
    if errors:
        raise EvalError(f"gold file {path} has bad lines: {errors[:5]}")
    return mentions


def load_predictions(path: str | Path, mode: str = "pair") -> dict[str, list[tuple]]:
    mentions, errors = _load_mentions(path, mode)
    if errors:
        raise EvalError(f"prediction file {path} has bad lines: {errors[:5]}")
    return mentions


def _load_mentions(path: str | Path, mode: str) -> tuple[dict[str, list[tuple]], list[dict]]:
    """Read a mention JSONL file; pair mode reads ``entities``, span mode
    reads ``spans`` with end > start. Bad lines come back as (line, reason)."""
    key = "entities" if mode == "pair" else "spans"
    out: dict[str, list[tuple]] = {}
    errors: list[dict] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict) or "id" not in record:
                    raise EvalError("line is not an object with an id")
                if record["id"] in out:
                    raise EvalError(f"duplicate id {record['id']!r}")
                items = record.get(key, [])
                mentions = [_mention_key(item, mode) for item in items]
                if mode == "span":
                    for start, end, _ in mentions:
                        if end <= start:
                            raise EvalError(f"span end {end} <= start {start}")
            except (json.JSONDecodeError, EvalError) as exc:
                errors.append({"line": lineno, "reason": str(exc)})
                continue
            out[record["id"]] = mentions
    return out, errors


def score_files(gold_path: str | Path, pred_path: str | Path, mode: str = "pair") -> EvalCounts:
    """Micro counts pooled over every sample of one gold/prediction pair.

    Prediction ids must be a subset of gold ids (orphans are an error); gold
    samples without predictions contribute all their mentions as fn.
    """
    gold = load_gold(gold_path, mode)
    pred = load_predictions(pred_path, mode)
    orphans = sorted(set(pred) - set(gold))
    if orphans:
        raise EvalError(f"predictions for unknown ids {orphans[:5]} in {pred_path}")
    total = EvalCounts()
    for id in gold:
        total = total + micro_f1(gold[id], pred.get(id, []), mode)
    return total


def evaluate_suite(
    gold_files: Mapping[str, str | Path],
    prediction_dirs: Mapping[str, str | Path],
    mode: str = "pair",
) -> EvalReport:
    """Score every model against every dataset.

    ``gold_files`` maps dataset name to its gold JSONL; each model directory
    must contain ``<dataset>.jsonl`` for every dataset.
    """
    if not gold_files:
        raise EvalError("no gold datasets given")
    datasets = list(gold_files)
    report = EvalReport(datasets=datasets, models=list(prediction_dirs))
    for model, directory in prediction_dirs.items():
        directory = Path(directory)
        for dataset in datasets:
            pred_path = directory / f"{dataset}.jsonl"
            if not pred_path.exists():
                raise EvalError(f"model {model} has no prediction file for {dataset}: {pred_path}")
            counts = score_files(gold_files[dataset], pred_path, mode)
            report.counts[(dataset, model)] = counts
            report.scores[(dataset, model)] = counts.f1
    return report


def display_score(fraction: float) -> Decimal:
    """x100 scale, one decimal, ties rounded half-up (away from zero)."""
    return (Decimal(fraction) * 100).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def _resolve_baselines(report: EvalReport, baseline) -> dict[str, str]:
    if baseline is None:
        return {}
    if isinstance(baseline, str):
        if baseline not in report.models:
            raise EvalError(f"baseline {baseline!r} not in report")
        return {m: baseline for m in report.models if m != baseline}
    mapping = dict(baseline)
    for model, base in mapping.items():
        if model not in report.models or base not in report.models:
            raise EvalError(f"baseline mapping {model!r} -> {base!r} not in report")
    return mapping


def render_report(report: EvalReport, baseline=None) -> str:
    """Markdown table: one row per dataset plus an Average row; models whose
    baseline is given get a signed one-decimal delta annotation."""
    baselines = _resolve_baselines(report, baseline)

    def cell(dataset_scores: Mapping[str, float], model: str) -> str:
        shown = display_score(dataset_scores[model])
        if model in baselines:
            delta = shown - display_score(dataset_scores[baselines[model]])
            return f"{shown} ({delta:+.1f})"
        return str(shown)

    lines = ["| Dataset | " + " | ".join(report.models) + " |",
             "| --- |" + " --- |" * len(report.models)]
    for dataset in report.datasets:
        row_scores = {m: report.scores[(dataset, m)] for m in report.models}
        lines.append(f"| {dataset} | " + " | ".join(cell(row_scores, m) for m in report.models) + " |")
    averages = {m: report.average(m) for m in report.models}
    lines.append("| Average | " + " | ".join(cell(averages, m) for m in report.models) + " |")
    return "\n".join(lines) + "\n"


def report_payload(report: EvalReport, baseline=None) -> dict:
    """Machine-readable companion to the rendered table."""
    baselines = _resolve_baselines(report, baseline)
    payload: dict = {"datasets": {}, "averages": {}, "baselines": baselines}
    for dataset in report.datasets:
        payload["datasets"][dataset] = {}
        for model in report.models:
            entry: dict = {
                "f1": report.scores[(dataset, model)],
                "display": str(display_score(report.scores[(dataset, model)])),
            }
            counts = report.counts.get((dataset, model))
            if counts is not None:
                entry.update(tp=counts.tp, fp=counts.fp, fn=counts.fn,
                             precision=counts.precision, recall=counts.recall)
            if model in baselines:
                delta = display_score(report.scores[(dataset, model)]) - display_score(
                    report.scores[(dataset, baselines[model])]
                )
                entry["delta"] = f"{delta:+.1f}"
            payload["datasets"][dataset][model] = entry
    for model in report.models:
        entry = {"f1": report.average(model), "display": str(display_score(report.average(model)))}
        if model in baselines:
            delta = display_score(report.average(model)) - display_score(
                report.average(baselines[model])
            )
            entry["delta"] = f"{delta:+.1f}"
        payload["averages"][model] = entry
    return payload


__all__ = [
    "EvalCounts",
    "EvalError",
    "EvalReport",
    "display_score",
    "evaluate_suite",
    "load_gold",
    "load_predictions",
    "micro_f1",
    "render_report",
    "report_payload",
    "score_files",
]
