"""Declarative pipeline configuration (YAML).

One file drives every stage. Seeds are mandatory: a config without a seed
would make reruns silently nondeterministic, so validation rejects it.
Relative paths resolve against the config file's directory.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Mapping

import yaml

from .corpus import DEFAULT_LANGUAGES, parse_timestamp


class ConfigError(Exception):
    """The config file is missing, unreadable, or fails validation."""


@dataclass(frozen=True)
class ClientConfig:
    backend: str = "mock"
    url: str | None = None
    auth_header: tuple[str, str] | None = None
    timeout_s: float = 30.0
    retries: int = 3
    max_in_flight: int = 8
    dim: int = 768
    model: str = ""

    def __post_init__(self) -> None:
        if self.backend not in ("mock", "http"):
            raise ConfigError(f"client backend must be mock or http, got {self.backend!r}")
        if self.backend == "http" and not self.url:
            raise ConfigError("http client backend requires a url")
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight must be >= 1")


@dataclass(frozen=True)
class BucketConfig:
    window_start: datetime
    window_end: datetime
    count: int = 29
    width: timedelta = timedelta(hours=4)


@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    input: Path
    work_dir: Path
    out_dir: Path
    languages: tuple[str, ...] = DEFAULT_LANGUAGES
    ingest_sample_size: int | None = None
    buckets: BucketConfig | None = None
    min_cluster_size: int = 30
    min_samples: int = 20
    probability_threshold: float = 0.98
    target_total: int | None = None
    annotate_retry_cap: int = 2
    types_file: Path | None = None
    test_buckets: int = 4
    validation_size: int = 730
    embedding_text: str = "title_summary"
    enrichment_client: ClientConfig = field(default_factory=ClientConfig)
    embedding_client: ClientConfig = field(default_factory=ClientConfig)
    llm_client: ClientConfig = field(default_factory=ClientConfig)
    service_bind: str = "127.0.0.1:8080"
    service_k_max: int = 100
    eval_mode: str = "pair"
    eval_gold: dict[str, Path] = field(default_factory=dict)
    eval_predictions: dict[str, Path] = field(default_factory=dict)
    eval_baseline: Any = None
    raw: dict = field(default_factory=dict)


def _client(section: Mapping | None, defaults: Mapping | None = None) -> ClientConfig:
    merged: dict = dict(defaults or {})
    merged.update(section or {})
    auth = merged.get("auth_header")
    if isinstance(auth, str):
        name, _, value = auth.partition(":")
        merged["auth_header"] = (name.strip(), value.strip())
    known = {f for f in ClientConfig.__dataclass_fields__}
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown client config keys: {sorted(unknown)}")
    return ClientConfig(**merged)


def load_config(path: str | Path, seed_override: int | None = None) -> PipelineConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")

    base = path.resolve().parent

    def resolve(p: str | None) -> Path | None:
        if p is None:
            return None
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    seed = seed_override if seed_override is not None else raw.get("seed")
    if seed is None:
        raise ConfigError("config must pin a seed (no implicit nondeterminism)")
    if "input" not in raw:
        raise ConfigError("config must name an input corpus file")
    input_path = resolve(str(raw["input"]))
    if not input_path.exists():
        raise ConfigError(f"input corpus {input_path} does not exist")

    buckets = None
    if "buckets" in raw:
        b = raw["buckets"]
        try:
            buckets = BucketConfig(
                window_start=parse_timestamp(str(b["window_start"])),
                window_end=parse_timestamp(str(b["window_end"])),
                count=int(b.get("count", 29)),
                width=timedelta(hours=float(b.get("width_hours", 4))),
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"invalid buckets section: {exc}") from exc

    cluster = raw.get("cluster", {})
    diversify = raw.get("diversify", {})
    annotate = raw.get("annotate", {})
    split = raw.get("split", {})
    clients = raw.get("clients", {})
    service = raw.get("service", {})
    eval_cfg = raw.get("eval", {})

    types_file = resolve(annotate.get("types_file"))
    if types_file is not None and not types_file.exists():
        raise ConfigError(f"entity types file {types_file} does not exist")

    eval_gold = {name: resolve(str(p)) for name, p in (eval_cfg.get("gold") or {}).items()}
    eval_predictions = {name: resolve(str(p)) for name, p in (eval_cfg.get("predictions") or {}).items()}

    embedding_text = raw.get("embedding_text", "title_summary")
    if embedding_text not in ("title_summary", "title", "summary"):
        raise ConfigError(f"embedding_text must be title_summary/title/summary, got {embedding_text!r}")

    threshold = float(cluster.get("probability_threshold", 0.98))
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError("probability_threshold must be in [0, 1]")

    return PipelineConfig(
        seed=int(seed),
        input=input_path,
        work_dir=resolve(str(raw.get("work_dir", "work"))),
        out_dir=resolve(str(raw.get("out_dir", "out"))),
        languages=tuple(raw.get("languages", DEFAULT_LANGUAGES)),
        ingest_sample_size=raw.get("ingest", {}).get("sample_size"),
        buckets=buckets,
        min_cluster_size=int(cluster.get("min_cluster_size", 30)),
        min_samples=int(cluster.get("min_samples", 20)),
        probability_threshold=threshold,
        target_total=diversify.get("target_total"),
        annotate_retry_cap=int(annotate.get("retry_cap", 2)),
        types_file=types_file,
        test_buckets=int(split.get("test_buckets", 4)),
        validation_size=int(split.get("validation_size", 730)),
        embedding_text=embedding_text,
        enrichment_client=_client(clients.get("enrichment")),
        embedding_client=_client(clients.get("embedding")),
        llm_client=_client(clients.get("llm"), {"timeout_s": 120.0}),
        service_bind=str(service.get("bind", "127.0.0.1:8080")),
        service_k_max=int(service.get("k_max", 100)),
        eval_mode=str(eval_cfg.get("mode", "pair")),
        eval_gold=eval_gold,
        eval_predictions=eval_predictions,
        eval_baseline=eval_cfg.get("baseline"),
        raw=raw,
    )


__all__ = ["BucketConfig", "ClientConfig", "ConfigError", "PipelineConfig", "load_config"]
