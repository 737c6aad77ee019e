"""Time bucketing and hierarchical density-based clustering.

The clustering follows the standard HDBSCAN pipeline over euclidean distances
on L2-normalized embeddings:

  (a) core distance: distance to the min_samples-th nearest neighbor, the
      point itself counted (matching scikit-learn's convention);
  (b) mutual reachability distance: max(core(a), core(b), d(a, b));
  (c) minimum spanning tree of the mutual reachability graph (Prim);
  (d) single-linkage hierarchy from the sorted MST edges;
  (e) condensed tree pruned at min_cluster_size;
  (f) cluster extraction maximizing excess-of-mass stability, the root
      excluded (no single-cluster solutions);
  (g) per-point membership probability as the point's departure level over
      the cluster's maximum persistence level; noise scores 0.

Every tie (nearest neighbors, MST edge choice, equal-weight edge ordering)
is broken toward the lowest point index, so identical inputs always produce
identical labels. Labels are contiguous integers ordered by each cluster's
first member index; -1 marks noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Sequence

import numpy as np

from .corpus import Article


class ClusterError(Exception):
    """Invalid parameters, non-finite inputs, or an impossible bucket layout."""


# ---------------------------------------------------------------------------
# Time bucketing


@dataclass(frozen=True)
class TimeBucket:
    index: int
    start: datetime
    width: timedelta
    member_ids: tuple[str, ...]

    @property
    def end(self) -> datetime:
        return self.start + self.width

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts < self.end


def bucket_by_time(
    articles: Iterable[Article],
    window_start: datetime,
    window_end: datetime,
    n_buckets: int = 29,
    width: timedelta = timedelta(hours=4),
) -> list[TimeBucket]:
    """Lay out ``n_buckets`` evenly spaced width-long buckets over the window.

    Bucket starts run from window_start to window_end - width inclusive
    (a single bucket sits at window_start). Buckets hold the articles whose
    timestamp falls in their half-open interval; articles landing in none of
    the buckets are simply not assigned.
    """
    if window_end <= window_start:
        raise ClusterError("window_end must be after window_start")
    if n_buckets < 1:
        raise ClusterError("n_buckets must be >= 1")
    if width <= timedelta(0):
        raise ClusterError("bucket width must be positive")
    span = window_end - window_start
    if n_buckets * width > span:
        raise ClusterError(
            f"window span {span} cannot hold {n_buckets} buckets of {width}"
        )

    if n_buckets == 1:
        starts = [window_start]
    else:
        step = (span - width) / (n_buckets - 1)
        starts = [window_start + i * step for i in range(n_buckets)]

    members: list[list[str]] = [[] for _ in range(n_buckets)]
    for article in articles:
        ts = article.published_at
        for i, start in enumerate(starts):
            if start <= ts < start + width:
                members[i].append(article.id)
                break

    return [
        TimeBucket(index=i, start=starts[i], width=width, member_ids=tuple(members[i]))
        for i in range(n_buckets)
    ]


# ---------------------------------------------------------------------------
# HDBSCAN


@dataclass(frozen=True)
class ClusterParams:
    min_cluster_size: int = 30
    min_samples: int = 20
    metric: str = "euclidean"
    probability_threshold: float = 0.98

    def __post_init__(self) -> None:
        if self.min_cluster_size < 2:
            raise ClusterError("min_cluster_size must be >= 2")
        if self.min_samples < 1:
            raise ClusterError("min_samples must be >= 1")
        if self.metric != "euclidean":
            raise ClusterError(f"unsupported metric {self.metric!r}")
        if not 0.0 <= self.probability_threshold <= 1.0:
            raise ClusterError("probability_threshold must be in [0, 1]")


@dataclass(frozen=True)
class ClusterAssignment:
    article_id: str
    bucket_index: int
    label: int
    probability: float

    def __post_init__(self) -> None:
        if self.label == -1 and self.probability != 0.0:
            raise ClusterError("noise assignments must carry probability 0")
        if self.label >= 0 and not 0.0 < self.probability <= 1.0:
            raise ClusterError("cluster members need probability in (0, 1]")


def _as_matrix(embeddings: Sequence) -> np.ndarray:
    if hasattr(embeddings, "shape"):
        X = np.asarray(embeddings, dtype=np.float64)
    else:
        X = np.asarray([tuple(e.values) if hasattr(e, "values") else tuple(e)
                        for e in embeddings], dtype=np.float64)
    if X.ndim != 2:
        raise ClusterError("embeddings must form a 2-d matrix")
    if not np.all(np.isfinite(X)):
        raise ClusterError("embeddings contain non-finite values")
    return X


def core_distances(X: np.ndarray, min_samples: int) -> np.ndarray:
    """Distance to the min_samples-th nearest neighbor, self included."""
    dist = pairwise_distances(X)
    return np.partition(dist, min_samples - 1, axis=1)[:, min_samples - 1]


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    dist = np.sqrt(d2)
    np.fill_diagonal(dist, 0.0)
    return dist


def mutual_reachability(X: np.ndarray, min_samples: int) -> np.ndarray:
    """max(core(a), core(b), d(a, b)) for every pair; diagonal is 0."""
    dist = pairwise_distances(X)
    core = np.partition(dist, min_samples - 1, axis=1)[:, min_samples - 1]
    mreach = np.maximum(np.maximum(core[:, None], core[None, :]), dist)
    np.fill_diagonal(mreach, 0.0)
    return mreach


def minimum_spanning_tree(weights: np.ndarray) -> np.ndarray:
    """Prim's MST over a dense symmetric weight matrix.

    Returns (n-1, 3) rows of (source, target, weight). Ties always resolve
    to the lowest candidate index.
    """
    n = weights.shape[0]
    if n < 2:
        return np.empty((0, 3))
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    source = np.zeros(n, dtype=np.int64)
    edges = np.empty((n - 1, 3))
    current = 0
    for i in range(n - 1):
        in_tree[current] = True
        row = weights[current]
        outside = ~in_tree
        improved = outside & (row < best)
        best[improved] = row[improved]
        source[improved] = current
        candidates = np.flatnonzero(outside)
        nxt = candidates[np.argmin(best[candidates])]
        edges[i] = (source[nxt], nxt, best[nxt])
        current = int(nxt)
    return edges


def _single_linkage(edges: np.ndarray) -> np.ndarray:
    """Union-find conversion of sorted MST edges into linkage rows
    (left id, right id, weight, merged size); merge i creates node n+i."""
    n = edges.shape[0] + 1
    parent = np.arange(2 * n - 1, dtype=np.int64)
    size = np.ones(2 * n - 1, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    linkage = np.empty((n - 1, 4))
    for i in range(n - 1):
        a, b, w = int(edges[i, 0]), int(edges[i, 1]), edges[i, 2]
        ra, rb = find(a), find(b)
        merged = n + i
        linkage[i] = (ra, rb, w, size[ra] + size[rb])
        parent[ra] = parent[rb] = merged
        size[merged] = size[ra] + size[rb]
    return linkage


def _bfs(linkage: np.ndarray, start: int, n: int) -> list[int]:
    out: list[int] = []
    frontier = [start]
    while frontier:
        out.extend(frontier)
        frontier = [
            int(child)
            for node in frontier
            if node >= n
            for child in (linkage[node - n, 0], linkage[node - n, 1])
        ]
    return out


def _condense(linkage: np.ndarray, min_cluster_size: int) -> list[tuple[int, int, float, int]]:
    """Prune the dendrogram: splits smaller than min_cluster_size become
    points falling out of their parent cluster at the split's density level.

    Rows are (parent cluster id, child id, lambda, child size); child ids
    below n are points, ids from n upward are condensed clusters, n itself
    being the root.
    """
    n = linkage.shape[0] + 1
    root = 2 * n - 2
    relabel = np.full(2 * n - 1, -1, dtype=np.int64)
    relabel[root] = n
    next_label = n + 1
    ignore = np.zeros(2 * n - 1, dtype=bool)
    rows: list[tuple[int, int, float, int]] = []

    def node_size(v: int) -> int:
        return 1 if v < n else int(linkage[v - n, 3])

    for node in _bfs(linkage, root, n):
        if node < n or ignore[node]:
            continue
        left, right, dist = int(linkage[node - n, 0]), int(linkage[node - n, 1]), linkage[node - n, 2]
        lam = 1.0 / dist if dist > 0.0 else math.inf
        left_size, right_size = node_size(left), node_size(right)
        big_left = left_size >= min_cluster_size
        big_right = right_size >= min_cluster_size

        if big_left and big_right:
            for child, child_size in ((left, left_size), (right, right_size)):
                relabel[child] = next_label
                next_label += 1
                rows.append((int(relabel[node]), int(relabel[child]), lam, child_size))
            continue
        shed = []
        if not big_left:
            shed.append(left)
        else:
            relabel[left] = relabel[node]
        if not big_right:
            shed.append(right)
        else:
            relabel[right] = relabel[node]
        for top in shed:
            for sub in _bfs(linkage, top, n):
                ignore[sub] = True
                if sub < n:
                    rows.append((int(relabel[node]), sub, lam, 1))
    return rows


def _stability(rows: list[tuple[int, int, float, int]], n: int) -> dict[int, float]:
    births: dict[int, float] = {n: 0.0}
    for _, child, lam, size in rows:
        if size > 1:
            births[child] = lam
    result: dict[int, float] = {}
    for parent, _, lam, size in rows:
        result.setdefault(parent, 0.0)
        result[parent] += (lam - births[parent]) * size
    return result


def _extract_eom(
    rows: list[tuple[int, int, float, int]], stability: dict[int, float], n: int
) -> set[int]:
    """Excess-of-mass selection; the root cluster (id n) is never selected."""
    cluster_children: dict[int, list[int]] = {}
    for parent, child, _, size in rows:
        if size > 1:
            cluster_children.setdefault(parent, []).append(child)

    node_list = sorted((c for c in stability if c != n), reverse=True)
    is_cluster = {c: True for c in node_list}
    score = dict(stability)
    for node in node_list:
        subtree = sum(score[ch] for ch in cluster_children.get(node, []))
        if subtree > score[node]:
            is_cluster[node] = False
            score[node] = subtree
        else:
            frontier = list(cluster_children.get(node, []))
            while frontier:
                nxt: list[int] = []
                for ch in frontier:
                    is_cluster[ch] = False
                    nxt.extend(cluster_children.get(ch, []))
                frontier = nxt
    return {c for c, keep in is_cluster.items() if keep}


def hdbscan(
    embeddings: Sequence, params: ClusterParams
) -> list[tuple[int, float]]:
    """Cluster embeddings; returns one (label, probability) pair per input.

    Inputs are expected to be L2-normalized so euclidean distances order the
    same way as cosine distances. Fewer than min_samples + 1 points cannot
    support density estimates and come back as all noise.
    """
    X = _as_matrix(embeddings)
    n = X.shape[0]
    if n == 0:
        return []
    if n <= params.min_samples or n < 2 * params.min_cluster_size:
        return [(-1, 0.0)] * n

    mreach = mutual_reachability(X, params.min_samples)
    edges = minimum_spanning_tree(mreach)
    # Equal-weight edges sort by lowest endpoint so the hierarchy is a pure
    # function of the input, not of MST discovery order.
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    order = np.lexsort((hi, lo, edges[:, 2]))
    linkage = _single_linkage(edges[order])

    rows = _condense(linkage, params.min_cluster_size)
    if not rows:
        return [(-1, 0.0)] * n
    stability = _stability(rows, n)
    selected = _extract_eom(rows, stability, n)
    if not selected:
        return [(-1, 0.0)] * n

    # Roll every condensed cluster up to its nearest selected ancestor.
    parent_of: dict[int, int] = {}
    point_row: dict[int, tuple[int, float]] = {}
    for parent, child, lam, size in rows:
        if size > 1:
            parent_of[child] = parent
        else:
            point_row[child] = (parent, lam)

    assigned_cache: dict[int, int] = {}

    def selected_ancestor(cluster: int) -> int:
        seen: list[int] = []
        node: int | None = cluster
        while node is not None and node not in assigned_cache:
            if node in selected:
                assigned_cache[node] = node
                break
            seen.append(node)
            node = parent_of.get(node)
        result = assigned_cache.get(node, -1) if node is not None else -1
        for s in seen:
            assigned_cache[s] = result
        return result

    deaths: dict[int, float] = {}
    for parent, _, lam, _ in rows:
        if math.isfinite(lam):
            deaths[parent] = max(deaths.get(parent, 0.0), lam)
        else:
            deaths[parent] = math.inf

    raw_labels = np.full(n, -1, dtype=np.int64)
    probabilities = np.zeros(n, dtype=np.float64)
    for point in range(n):
        if point not in point_row:
            continue
        parent, lam = point_row[point]
        cluster = selected_ancestor(parent)
        if cluster == -1:
            continue
        raw_labels[point] = cluster
        death = deaths.get(cluster, 0.0)
        if death == 0.0 or not math.isfinite(lam):
            probabilities[point] = 1.0
        else:
            probabilities[point] = min(lam, death) / death

    # Contiguous labels in order of first appearance.
    remap: dict[int, int] = {}
    for point in range(n):
        c = int(raw_labels[point])
        if c != -1 and c not in remap:
            remap[c] = len(remap)
    return [
        (remap[int(raw_labels[i])], float(probabilities[i]))
        if raw_labels[i] != -1
        else (-1, 0.0)
        for i in range(n)
    ]


def filter_by_probability(
    assignments: Iterable[ClusterAssignment], threshold: float = 0.98
) -> list[ClusterAssignment]:
    """Keep cluster members whose probability strictly exceeds the threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ClusterError("threshold must be in [0, 1]")
    return [a for a in assignments if a.label >= 0 and a.probability > threshold]


def assign_buckets(
    buckets: Sequence[TimeBucket],
    embedding_of,
    params: ClusterParams,
) -> list[ClusterAssignment]:
    """Cluster each bucket independently; ``embedding_of(article_id)`` supplies
    the vectors. Assignment order follows bucket order, then member order."""
    out: list[ClusterAssignment] = []
    for bucket in buckets:
        if not bucket.member_ids:
            continue
        vectors = [embedding_of(article_id) for article_id in bucket.member_ids]
        for article_id, (label, prob) in zip(bucket.member_ids, hdbscan(vectors, params)):
            out.append(
                ClusterAssignment(
                    article_id=article_id,
                    bucket_index=bucket.index,
                    label=label,
                    probability=prob,
                )
            )
    return out


__all__ = [
    "ClusterAssignment",
    "ClusterError",
    "ClusterParams",
    "TimeBucket",
    "assign_buckets",
    "bucket_by_time",
    "core_distances",
    "filter_by_probability",
    "hdbscan",
    "minimum_spanning_tree",
    "mutual_reachability",
    "pairwise_distances",
]
