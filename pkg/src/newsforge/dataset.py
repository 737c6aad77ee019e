"""Dataset assembly: the temporal test split, the stratified validation
split, JSONL export, and the training-configuration artifact."""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, asdict, field
from pathlib import Path
from typing import Mapping, Sequence

from .annotate import AnnotatedSample, write_samples
from .apportion import largest_remainder_capped


class SplitError(Exception):
    """Split request that the corpus cannot satisfy."""


@dataclass(frozen=True)
class DatasetSplits:
    train_ids: frozenset[str]
    val_ids: frozenset[str]
    test_ids: frozenset[str]
    strata: dict[tuple[int, int], dict[str, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.train_ids & self.val_ids or self.train_ids & self.test_ids or self.val_ids & self.test_ids:
            raise SplitError("splits overlap")

    @property
    def all_ids(self) -> frozenset[str]:
        return self.train_ids | self.val_ids | self.test_ids

    def split_of(self, id: str) -> str:
        if id in self.train_ids:
            return "train"
        if id in self.val_ids:
            return "validation"
        if id in self.test_ids:
            return "test"
        raise KeyError(id)


def _bucket_of(sample: AnnotatedSample) -> int:
    bucket = sample.metadata.get("bucket")
    if bucket is None or int(bucket) < 0:
        raise SplitError(f"sample {sample.id} carries no bucket index")
    return int(bucket)


def _stratum_of(sample: AnnotatedSample) -> tuple[int, int]:
    return (_bucket_of(sample), int(sample.metadata.get("cluster", -1)))


def temporal_test_split(samples: Sequence[AnnotatedSample], n_latest_buckets: int = 4) -> set[str]:
    """All samples from the n latest non-empty time buckets become test data."""
    if n_latest_buckets < 1:
        raise SplitError("n_latest_buckets must be >= 1")
    buckets = sorted({_bucket_of(s) for s in samples})
    if len(buckets) < n_latest_buckets:
        raise SplitError(
            f"corpus has {len(buckets)} non-empty buckets, need {n_latest_buckets}"
        )
    test_buckets = set(buckets[-n_latest_buckets:])
    return {s.id for s in samples if _bucket_of(s) in test_buckets}


def stratified_validation_split(
    remaining: Sequence[AnnotatedSample],
    target_size: int = 730,
    seed: int = 0,
) -> tuple[set[str], set[str]]:
    """Carve a validation set out of the non-test samples.

    Pass 1 draws one uniformly random member from every (bucket, cluster)
    stratum so each survives into validation. Pass 2 fills the rest of the
    quota by largest-remainder apportionment proportional to stratum sizes,
    drawing members uniformly at random within each stratum. Returns
    (validation ids, train ids).
    """
    if target_size > len(remaining):
        raise SplitError(f"target_size {target_size} exceeds pool of {len(remaining)}")
    strata: dict[tuple[int, int], list[str]] = {}
    for s in remaining:
        strata.setdefault(_stratum_of(s), []).append(s.id)
    if target_size < len(strata):
        raise SplitError(
            f"target_size {target_size} cannot cover {len(strata)} strata at least once"
        )

    rng = random.Random(seed)
    val_ids: set[str] = set()
    leftover: dict[tuple[int, int], list[str]] = {}
    for key in sorted(strata):
        members = sorted(strata[key])
        pick = rng.choice(members)
        val_ids.add(pick)
        leftover[key] = [m for m in members if m != pick]

    quota = target_size - len(strata)
    if quota > 0:
        sizes = {key: len(strata[key]) for key in sorted(strata)}
        caps = {key: len(leftover[key]) for key in sorted(strata)}
        extra = largest_remainder_capped(sizes, quota, caps)
        for key in sorted(strata):
            take = extra[key]
            if take:
                val_ids.update(rng.sample(leftover[key], take))

    train_ids = {s.id for s in remaining} - val_ids
    return val_ids, train_ids


def build_splits(
    samples: Sequence[AnnotatedSample],
    n_latest_buckets: int = 4,
    validation_size: int = 730,
    seed: int = 0,
) -> DatasetSplits:
    test_ids = temporal_test_split(samples, n_latest_buckets)
    remaining = [s for s in samples if s.id not in test_ids]
    val_ids, train_ids = stratified_validation_split(remaining, validation_size, seed)

    strata: dict[tuple[int, int], dict[str, int]] = {}
    splits_by_id = (
        {i: "train" for i in train_ids}
        | {i: "validation" for i in val_ids}
        | {i: "test" for i in test_ids}
    )
    for s in samples:
        counts = strata.setdefault(_stratum_of(s), {"train": 0, "validation": 0, "test": 0})
        counts[splits_by_id[s.id]] += 1

    return DatasetSplits(
        train_ids=frozenset(train_ids),
        val_ids=frozenset(val_ids),
        test_ids=frozenset(test_ids),
        strata=strata,
    )


def export_dataset(
    splits: DatasetSplits,
    samples: Sequence[AnnotatedSample],
    out_dir: str | Path,
    config_fingerprint: str = "",
) -> dict:
    """Write train/validation/test JSONL plus a manifest.

    The manifest records split sizes, per-split country histograms, and the
    pipeline-config fingerprint; re-exports of identical inputs are
    byte-identical.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_id = {s.id: s for s in samples}
    unknown = splits.all_ids - set(by_id)
    if unknown:
        raise SplitError(f"splits reference unknown sample ids: {sorted(unknown)[:5]}")

    manifest: dict = {"splits": {}, "config_fingerprint": config_fingerprint}
    for name, ids in (("train", splits.train_ids),
                      ("validation", splits.val_ids),
                      ("test", splits.test_ids)):
        members = [by_id[i] for i in sorted(ids)]
        write_samples(members, out_dir / f"{name}.jsonl")
        countries: dict[str, int] = {}
        for s in members:
            c = str(s.metadata.get("country", ""))
            countries[c] = countries.get(c, 0) + 1
        manifest["splits"][name] = {
            "count": len(members),
            "countries": dict(sorted(countries.items())),
        }
    manifest["total"] = sum(v["count"] for v in manifest["splits"].values())
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def top_k_entity_types(samples: Sequence[AnnotatedSample], k: int = 30) -> list[str]:
    """The k most frequent mention types, descending; name breaks ties.
    Returns everything (short) when fewer than k types exist."""
    counts: dict[str, int] = {}
    for s in samples:
        for m in s.mentions:
            counts[m.type] = counts.get(m.type, 0) + 1
    ranked = sorted(counts, key=lambda t: (-counts[t], t))
    if len(ranked) < k:
        import logging

        logging.getLogger(__name__).warning(
            "only %d distinct entity types present, requested top %d", len(ranked), k
        )
        return ranked
    return ranked[:k]


# Fine-tuning defaults for span-based NER models trained on the exported
# dataset. The run itself is out of scope here; this artifact pins the knobs.
@dataclass(frozen=True)
class TrainingConfig:
    optimizer: str = "adamw"
    base_lr: float = 1e-6
    scheduler: str = "reduce_on_plateau"
    scheduler_factor: float = 0.5
    scheduler_patience: int = 5
    epochs: int = 25
    batch_size: int = 5
    steps: int = 1000
    eval_batch_size: int = 12
    span_threshold: float = 0.5
    eval_type_count: int = 30
    shuffle_types: bool = True
    random_type_drop: bool = True

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TrainingConfig":
        fields_by_name = {f: t for f, t in cls.__annotations__.items()}
        kwargs: dict = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in fields_by_name:
                raise ValueError(f"unknown training-config key {key!r}")
            kwargs[key] = _parse_value(raw)
        return cls(**kwargs)


def _parse_value(raw: str):
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def emit_training_config(overrides: Mapping[str, object] | None = None,
                         path: str | Path | None = None) -> TrainingConfig:
    """Produce the training config, optionally overriding known fields and
    writing the flat key = value file."""
    overrides = dict(overrides or {})
    known = set(TrainingConfig.__annotations__)
    unknown = set(overrides) - known
    if unknown:
        raise ValueError(f"unknown training-config overrides: {sorted(unknown)}")
    config = TrainingConfig(**overrides)
    if path is not None:
        Path(path).write_text(config.to_text(), encoding="utf-8")
    return config


def config_fingerprint(payload: Mapping) -> str:
    canon = json.dumps(payload, ensure_ascii=False, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


__all__ = [
    "DatasetSplits",
    "SplitError",
    "TrainingConfig",
    "build_splits",
    "config_fingerprint",
    "emit_training_config",
    "export_dataset",
    "stratified_validation_split",
    "temporal_test_split",
    "top_k_entity_types",
]
