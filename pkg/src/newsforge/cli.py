"""Pipeline entry point.

Every stage reads its inputs from files the previous stage wrote and leaves a
``_complete.json`` marker with its counts, so ``all`` resumes from the last
finished stage and any single stage can be replayed in isolation with
``--force``. Durations are logged to stderr only; the artifact tree itself
stays byte-identical across reruns of the same config.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .annotate import EntityTypeSet, HttpLLMClient, MockLLMClient, annotate_corpus, read_samples, write_samples
from .cluster import ClusterAssignment, ClusterParams, assign_buckets, bucket_by_time, filter_by_probability
from .config import ClientConfig, ConfigError, PipelineConfig, load_config
from .corpus import (
    ArticleSet,
    country_histogram,
    filter_by_language,
    load_articles,
    sample_matching_distribution,
    sort_by_domain_rank,
    write_rejects,
)
from .dataset import (
    DatasetSplits,
    build_splits,
    config_fingerprint,
    emit_training_config,
    export_dataset,
)
from .diversify import enforce_distribution, select_cap, topic_histogram
from .enrich import (
    HttpEmbeddingClient,
    HttpEnrichmentClient,
    MockEmbeddingClient,
    MockEnrichmentClient,
    RetryPolicy,
    embed_text,
    enrich_all,
    read_enriched,
    write_enriched,
)
from .evalkit import evaluate_suite, render_report, report_payload
from .store import VectorStore, l2_normalize

log = logging.getLogger("newsforge")

PIPELINE_STAGES = ("ingest", "enrich", "cluster", "diversify", "annotate", "split", "export")


class StageError(Exception):
    pass


def _build_enrichment_client(cc: ClientConfig):
    if cc.backend == "mock":
        return MockEnrichmentClient()
    return HttpEnrichmentClient(
        url=cc.url, auth_header=cc.auth_header, timeout_s=cc.timeout_s,
        retry=RetryPolicy(max_attempts=cc.retries),
    )


def _build_embedding_client(cc: ClientConfig):
    if cc.backend == "mock":
        return MockEmbeddingClient(dim=cc.dim)
    return HttpEmbeddingClient(
        url=cc.url, dim=cc.dim, model=cc.model, auth_header=cc.auth_header,
        timeout_s=cc.timeout_s, retry=RetryPolicy(max_attempts=cc.retries),
    )


def _build_llm_client(cc: ClientConfig):
    if cc.backend == "mock":
        return MockLLMClient()
    return HttpLLMClient(url=cc.url, auth_header=cc.auth_header, timeout_s=cc.timeout_s)


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _read_assignments(path: Path) -> list[ClusterAssignment]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                r = json.loads(line)
                out.append(ClusterAssignment(r["article_id"], r["bucket"], r["label"], r["probability"]))
    return out


def _write_assignments(path: Path, assignments) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in assignments:
            fh.write(json.dumps({
                "article_id": a.article_id, "bucket": a.bucket_index,
                "label": a.label, "probability": a.probability,
            }) + "\n")


def _require(path: Path, producer: str) -> Path:
    if not path.exists():
        raise StageError(f"missing {path}; run the {producer} stage first")
    return path


# --- stages ----------------------------------------------------------------


def stage_ingest(config: PipelineConfig) -> dict:
    stage_dir = config.work_dir / "ingest"
    stage_dir.mkdir(parents=True, exist_ok=True)
    articles, rejects = load_articles(config.input)
    write_rejects(rejects, stage_dir / "rejects.jsonl")
    kept = filter_by_language(articles, config.languages)
    histogram = country_histogram(kept)
    ordered = sort_by_domain_rank(kept)
    if config.ingest_sample_size is not None:
        ordered = sample_matching_distribution(
            ordered, histogram, int(config.ingest_sample_size), config.seed
        )
    with open(stage_dir / "articles.jsonl", "w", encoding="utf-8") as fh:
        for a in ordered:
            fh.write(json.dumps(a.to_record(), ensure_ascii=False) + "\n")
    _write_json(stage_dir / "country_histogram.json",
                {"counts": dict(sorted(histogram.counts.items())), "total": histogram.total})
    return {"loaded": len(articles), "rejected": len(rejects), "kept": len(ordered)}


def stage_enrich(config: PipelineConfig) -> dict:
    stage_dir = config.work_dir / "enrich"
    stage_dir.mkdir(parents=True, exist_ok=True)
    articles, rejects = load_articles(_require(config.work_dir / "ingest" / "articles.jsonl", "ingest"))
    if rejects:
        raise StageError(f"ingest output is corrupt: {rejects[0].reason}")

    enriched = enrich_all(
        list(articles), _build_enrichment_client(config.enrichment_client),
        max_in_flight=config.enrichment_client.max_in_flight,
    )
    write_enriched(enriched, stage_dir / "enriched.jsonl")

    embed_client = _build_embedding_client(config.embedding_client)
    store = VectorStore(dim=embed_client.dim, metric="cosine")
    for e in enriched:
        vector = l2_normalize(embed_text(e.embedding_text(config.embedding_text), embed_client))
        store.upsert(e.base.id, vector, {
            "title": e.title_translated,
            "country": e.base.country,
            "topic": e.topic,
            "published_at": e.base.published_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        })
    store.save(stage_dir / "store")
    return {"articles": len(enriched), "dim": store.dim}


def stage_cluster(config: PipelineConfig) -> dict:
    if config.buckets is None:
        raise StageError("config has no buckets section; the cluster stage needs one")
    stage_dir = config.work_dir / "cluster"
    stage_dir.mkdir(parents=True, exist_ok=True)
    enriched = read_enriched(_require(config.work_dir / "enrich" / "enriched.jsonl", "enrich"))
    store = VectorStore.load(config.work_dir / "enrich" / "store")

    buckets = bucket_by_time(
        [e.base for e in enriched],
        config.buckets.window_start, config.buckets.window_end,
        n_buckets=config.buckets.count, width=config.buckets.width,
    )
    params = ClusterParams(
        min_cluster_size=config.min_cluster_size,
        min_samples=config.min_samples,
        probability_threshold=config.probability_threshold,
    )
    assignments = assign_buckets(buckets, lambda id: store.get(id)[0], params)
    _write_assignments(stage_dir / "assignments.jsonl", assignments)
    kept = filter_by_probability(assignments, config.probability_threshold)
    _write_assignments(stage_dir / "filtered.jsonl", kept)
    _write_json(stage_dir / "buckets.json", [
        {"index": b.index, "start": b.start.strftime("%Y-%m-%dT%H:%M:%SZ"),
         "width_hours": b.width.total_seconds() / 3600, "members": len(b.member_ids)}
        for b in buckets
    ])
    clusters = {(a.bucket_index, a.label) for a in assignments if a.label >= 0}
    return {
        "buckets_nonempty": sum(1 for b in buckets if b.member_ids),
        "assigned": len(assignments),
        "clusters": len(clusters),
        "kept": len(kept),
    }


def stage_diversify(config: PipelineConfig) -> dict:
    stage_dir = config.work_dir / "diversify"
    stage_dir.mkdir(parents=True, exist_ok=True)
    enriched = {e.base.id: e for e in read_enriched(
        _require(config.work_dir / "enrich" / "enriched.jsonl", "enrich"))}
    kept = _read_assignments(_require(config.work_dir / "cluster" / "filtered.jsonl", "cluster"))

    pool = ArticleSet.of(enriched[a.article_id].base for a in kept)
    cluster_of = {a.article_id: (a.bucket_index, a.label) for a in kept}
    availability = country_histogram(pool)
    target = config.target_total if config.target_total is not None else len(pool)
    plan = select_cap(availability, target)
    (stage_dir / "cap_plan.json").write_text(plan.to_json(), encoding="utf-8")

    selected = enforce_distribution(pool, plan, cluster_of, seed=config.seed)
    write_enriched([enriched[a.id] for a in selected], stage_dir / "selected.jsonl")
    _write_json(stage_dir / "topic_histogram.json",
                topic_histogram(enriched[a.id] for a in selected))
    return {"pool": len(pool), "selected": len(selected), "cap": plan.cap}


def stage_annotate(config: PipelineConfig) -> dict:
    stage_dir = config.work_dir / "annotate"
    stage_dir.mkdir(parents=True, exist_ok=True)
    selected = read_enriched(_require(config.work_dir / "diversify" / "selected.jsonl", "diversify"))
    kept = _read_assignments(_require(config.work_dir / "cluster" / "filtered.jsonl", "cluster"))
    cluster_of = {a.article_id: (a.bucket_index, a.label) for a in kept}

    types = (EntityTypeSet.from_file(config.types_file)
             if config.types_file else EntityTypeSet.default())
    samples, summary = annotate_corpus(
        selected, _build_llm_client(config.llm_client), types,
        seed=config.seed, retry_cap=config.annotate_retry_cap,
        cluster_of=cluster_of, checkpoint_path=stage_dir / "checkpoint.jsonl",
    )
    write_samples(samples, stage_dir / "annotated.jsonl")
    return {
        "annotated": summary.annotated,
        "failed": summary.failed,
        "mentions_kept": summary.mentions_kept,
        "mentions_rejected": summary.mentions_rejected,
        "reprompts": summary.reprompts,
    }


def stage_split(config: PipelineConfig) -> dict:
    stage_dir = config.work_dir / "split"
    stage_dir.mkdir(parents=True, exist_ok=True)
    samples = read_samples(_require(config.work_dir / "annotate" / "annotated.jsonl", "annotate"))
    splits = build_splits(
        samples, n_latest_buckets=config.test_buckets,
        validation_size=config.validation_size, seed=config.seed,
    )
    _write_json(stage_dir / "splits.json", {
        "train": sorted(splits.train_ids),
        "validation": sorted(splits.val_ids),
        "test": sorted(splits.test_ids),
        "strata": {f"{b}:{c}": counts for (b, c), counts in sorted(splits.strata.items())},
    })
    return {"train": len(splits.train_ids), "validation": len(splits.val_ids),
            "test": len(splits.test_ids), "strata": len(splits.strata)}


def stage_export(config: PipelineConfig) -> dict:
    samples = read_samples(_require(config.work_dir / "annotate" / "annotated.jsonl", "annotate"))
    payload = json.loads(
        _require(config.work_dir / "split" / "splits.json", "split").read_text(encoding="utf-8"))
    splits = DatasetSplits(
        train_ids=frozenset(payload["train"]),
        val_ids=frozenset(payload["validation"]),
        test_ids=frozenset(payload["test"]),
    )
    manifest = export_dataset(splits, samples, config.out_dir,
                              config_fingerprint=config_fingerprint(config.raw))
    emit_training_config(path=config.out_dir / "training_config.txt")
    return {name: info["count"] for name, info in manifest["splits"].items()}


def stage_eval(config: PipelineConfig) -> dict:
    if not config.eval_gold or not config.eval_predictions:
        raise StageError("config has no eval section (gold + predictions)")
    report = evaluate_suite(config.eval_gold, config.eval_predictions, mode=config.eval_mode)
    table = render_report(report, baseline=config.eval_baseline)
    eval_dir = config.out_dir / "eval"
    eval_dir.mkdir(parents=True, exist_ok=True)
    (eval_dir / "report.md").write_text(table, encoding="utf-8")
    _write_json(eval_dir / "report.json", report_payload(report, baseline=config.eval_baseline))
    sys.stdout.write(table)
    return {"models": len(report.models), "datasets": len(report.datasets)}


STAGE_FUNCS = {
    "ingest": stage_ingest,
    "enrich": stage_enrich,
    "cluster": stage_cluster,
    "diversify": stage_diversify,
    "annotate": stage_annotate,
    "split": stage_split,
    "export": stage_export,
    "eval": stage_eval,
}


def run_stage(name: str, config: PipelineConfig, force: bool = False) -> dict:
    marker = config.work_dir / name / "_complete.json"
    if marker.exists() and not force:
        log.info("stage %s already complete (use --force to re-run)", name)
        return json.loads(marker.read_text(encoding="utf-8"))["counts"]
    started = time.monotonic()
    counts = STAGE_FUNCS[name](config)
    duration = time.monotonic() - started
    marker.parent.mkdir(parents=True, exist_ok=True)
    _write_json(marker, {"stage": name, "counts": counts})
    log.info("stage %s done in %.2fs: %s", name, duration, counts)
    return counts


def run(subcommand: str, config: PipelineConfig, force: bool = False) -> int:
    if subcommand == "serve":
        from .service import serve

        _require(config.work_dir / "enrich" / "store.manifest.json", "enrich")
        store = VectorStore.load(config.work_dir / "enrich" / "store")
        serve(store, _build_embedding_client(config.embedding_client),
              bind_address=config.service_bind, k_max=config.service_k_max)
        return 0
    if subcommand == "all":
        for name in PIPELINE_STAGES:
            run_stage(name, config, force=force)
        if config.eval_gold and config.eval_predictions:
            run_stage("eval", config, force=force)
        return 0
    run_stage(subcommand, config, force=force)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="newsforge",
        description="Diversity-enforced synthetic NER dataset pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"newsforge {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in (*PIPELINE_STAGES, "eval", "serve", "all"):
        p = sub.add_parser(name, help=f"run the {name} stage" if name != "all" else "run the whole pipeline")
        p.add_argument("--config", required=True, help="pipeline config YAML")
        p.add_argument("--force", action="store_true", help="re-run even if the stage is complete")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO,
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config, seed_override=args.seed)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 2
    try:
        return run(args.subcommand, config, force=args.force)
    except Exception as exc:
        log.error("stage %s failed: %s", args.subcommand, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
