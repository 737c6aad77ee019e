#!/usr/bin/env python3
"""Regenerate the frozen clustering reference fixtures.

Runs scikit-learn's HDBSCAN (the independent reference implementation) on
three synthetic datasets and freezes points, labels, and membership
probabilities into tests/data/cluster_fixtures.json. The test suite compares
newsforge's own clustering against these frozen outputs, so regenerating the
file requires scikit-learn even though the package itself does not.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from sklearn.cluster import HDBSCAN

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "cluster_fixtures.json"


def two_blobs() -> tuple[np.ndarray, int, int]:
    # Two separated 16-d blobs projected to the unit sphere, embedding-like.
    rng = np.random.default_rng(20240220)
    a = rng.normal(0, 1, 16)
    a /= np.linalg.norm(a)
    b = rng.normal(0, 1, 16)
    b -= (b @ a) * a
    b /= np.linalg.norm(b)
    points = np.vstack([
        a + 0.08 * rng.normal(0, 1, (50, 16)),
        b + 0.08 * rng.normal(0, 1, (50, 16)),
    ])
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    return points[rng.permutation(len(points))], 10, 5


def blobs_with_noise() -> tuple[np.ndarray, int, int]:
    rng = np.random.default_rng(20240331)
    centers = (np.array([0.0, 0.0]), np.array([8.0, 0.0]), np.array([4.0, 7.0]))
    blobs = [c + 0.3 * rng.normal(0, 1, (60, 2)) for c in centers]
    noise = rng.uniform(-6, 14, (40, 2))
    points = np.vstack(blobs + [noise])
    return points[rng.permutation(len(points))], 15, 7


def all_noise() -> tuple[np.ndarray, int, int]:
    rng = np.random.default_rng(7)
    return rng.uniform(-1, 1, (20, 4)), 30, 5


def main() -> None:
    fixtures = []
    for name, build in (("two_blobs", two_blobs),
                        ("blobs_noise", blobs_with_noise),
                        ("all_noise", all_noise)):
        points, mcs, ms = build()
        ref = HDBSCAN(min_cluster_size=mcs, min_samples=ms,
                      metric="euclidean", algorithm="brute").fit(points)
        labels = ref.labels_.tolist()
        probs = ref.probabilities_.tolist()
        fixtures.append({
            "name": name,
            "min_cluster_size": mcs,
            "min_samples": ms,
            "points": [[float(v) for v in row] for row in points],
            "reference_labels": labels,
            "reference_probabilities": probs,
        })

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixtures) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
