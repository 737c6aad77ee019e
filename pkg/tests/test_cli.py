from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from newsforge.cli import main

from conftest import DATA


def write_config(tmp_path: Path, **overrides) -> Path:
    corpus = tmp_path / "toy_corpus.jsonl"
    if not corpus.exists():
        shutil.copy(DATA / "toy_corpus.jsonl", corpus)
    settings = {
        "seed": 20240220,
        "input": "toy_corpus.jsonl",
        "work_dir": "work",
        "out_dir": "out",
        "buckets": {
            "window_start": "2024-03-01T00:00:00Z",
            "window_end": "2024-03-01T14:00:00Z",
            "count": 6,
            "width_hours": 2,
        },
        "cluster": {"min_cluster_size": 2, "min_samples": 2, "probability_threshold": 0.98},
        "diversify": {"target_total": 24},
        "annotate": {"retry_cap": 2},
        "split": {"test_buckets": 2, "validation_size": 10},
        "clients": {
            "enrichment": {"backend": "mock"},
            "embedding": {"backend": "mock", "dim": 32},
            "llm": {"backend": "mock"},
        },
        "embedding_text": "summary",
    }
    settings.update(overrides)
    import yaml

    path = tmp_path / "pipeline.yaml"
    path.write_text(yaml.safe_dump(settings), encoding="utf-8")
    return path


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*")) if p.is_file()
    }


class TestPipeline:
    def test_all_produces_full_artifact_tree(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["all", "--config", str(config)]) == 0
        work, out = tmp_path / "work", tmp_path / "out"
        for expected in (
            "ingest/articles.jsonl", "ingest/rejects.jsonl", "ingest/country_histogram.json",
            "enrich/enriched.jsonl", "enrich/store.manifest.json", "enrich/store.f32",
            "cluster/assignments.jsonl", "cluster/filtered.jsonl", "cluster/buckets.json",
            "diversify/cap_plan.json", "diversify/selected.jsonl", "diversify/topic_histogram.json",
            "annotate/annotated.jsonl", "split/splits.json",
        ):
            assert (work / expected).exists(), expected
        for expected in ("train.jsonl", "validation.jsonl", "test.jsonl",
                         "manifest.json", "training_config.txt"):
            assert (out / expected).exists(), expected

        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["total"] == 24
        sizes = {k: v["count"] for k, v in manifest["splits"].items()}
        assert sizes["validation"] == 10
        assert sum(sizes.values()) == 24

    def test_rerun_without_force_is_noop(self, tmp_path, caplog):
        config = write_config(tmp_path)
        assert main(["ingest", "--config", str(config)]) == 0
        marker = tmp_path / "work" / "ingest" / "_complete.json"
        stamp = marker.stat().st_mtime_ns
        articles = (tmp_path / "work" / "ingest" / "articles.jsonl").read_bytes()
        assert main(["ingest", "--config", str(config)]) == 0
        assert marker.stat().st_mtime_ns == stamp
        assert (tmp_path / "work" / "ingest" / "articles.jsonl").read_bytes() == articles

    def test_force_reruns_stage(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["ingest", "--config", str(config)]) == 0
        marker = tmp_path / "work" / "ingest" / "_complete.json"
        stamp = marker.stat().st_mtime_ns
        assert main(["ingest", "--config", str(config), "--force"]) == 0
        assert marker.stat().st_mtime_ns != stamp

    def test_stage_requires_upstream_artifacts(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["cluster", "--config", str(config)]) == 1

    def test_unknown_subcommand_prints_usage(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate", "--config", "x"])
        assert exc.value.code != 0
        assert "usage" in capsys.readouterr().err.lower()

    def test_config_validation_failure_exits_2_before_work(self, tmp_path):
        config = write_config(tmp_path)
        broken = tmp_path / "broken.yaml"
        broken.write_text(config.read_text().replace("seed: 20240220", ""), encoding="utf-8")
        assert main(["all", "--config", str(broken)]) == 2
        assert not (tmp_path / "work").exists()

    def test_missing_input_fails_validation(self, tmp_path):
        config = write_config(tmp_path, input="does_not_exist.jsonl")
        assert main(["all", "--config", str(config)]) == 2

    def test_stage_summary_carries_counts(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["ingest", "--config", str(config)]) == 0
        marker = json.loads((tmp_path / "work" / "ingest" / "_complete.json").read_text())
        assert marker["counts"] == {"loaded": 32, "rejected": 1, "kept": 30}


class TestDeterminism:
    def test_two_runs_byte_identical_trees(self, tmp_path):
        a, b = tmp_path / "runA", tmp_path / "runB"
        for run_dir in (a, b):
            run_dir.mkdir()
            config = write_config(run_dir)
            assert main(["all", "--config", str(config)]) == 0
        for sub in ("work", "out"):
            left, right = tree_bytes(a / sub), tree_bytes(b / sub)
            assert left.keys() == right.keys()
            mismatched = [k for k in left if left[k] != right[k]]
            assert mismatched == []

    def test_stage_replay_from_files_only(self, tmp_path):
        # replaying one stage in isolation consumes previous stage files only
        config = write_config(tmp_path)
        assert main(["all", "--config", str(config)]) == 0
        before = (tmp_path / "work" / "split" / "splits.json").read_bytes()
        assert main(["split", "--config", str(config), "--force"]) == 0
        assert (tmp_path / "work" / "split" / "splits.json").read_bytes() == before


class TestAnnotateStageRejects:
    def test_planted_corruptions_all_caught_end_to_end(self, tmp_path):
        from newsforge.annotate import mock_planted_corruptions, read_samples, MOCK_BAD_TYPE, MOCK_FAKE_MENTION

        config = write_config(tmp_path)
        assert main(["all", "--config", str(config)]) == 0
        samples = read_samples(tmp_path / "work" / "annotate" / "annotated.jsonl")
        assert samples
        planted_fake = planted_bad = 0
        for s in samples:
            fake, bad_type = mock_planted_corruptions(s.source_text)
            rejected = {(r.text, r.type, r.reason) for r in s.rejected}
            if fake:
                planted_fake += 1
                assert (MOCK_FAKE_MENTION[0], MOCK_FAKE_MENTION[1], "not-verbatim") in rejected
            if bad_type:
                planted_bad += 1
                assert any(r[1] == MOCK_BAD_TYPE and r[2] == "unrequested-type" for r in rejected)
            for m in s.mentions:
                assert m.text in s.source_text
        assert planted_fake > 0 and planted_bad > 0  # fixture actually exercises both
