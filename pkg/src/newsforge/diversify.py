"""Country-distribution enforcement over the clustered article pool.

Capping rule: the cap is the smallest per-country ceiling K such that keeping
min(available, K) articles from every country reaches the target size. Small
countries are therefore never eliminated, while no country exceeds the cap.
If the capped total overshoots the target, the excess is trimmed one article
at a time from the countries sitting at the cap, richest first.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .corpus import ArticleSet, CountryDistribution, country_histogram, sort_by_domain_rank


class DiversifyError(Exception):
    """Infeasible target or a plan inconsistent with the pool."""


@dataclass(frozen=True)
class CapPlan:
    cap: int
    target_total: int
    kept_per_country: dict[str, int]

    def to_json(self) -> str:
        payload = {
            "cap": self.cap,
            "target_total": self.target_total,
            "kept_per_country": dict(sorted(self.kept_per_country.items())),
        }
        return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CapPlan":
        payload = json.loads(text)
        return cls(
            cap=payload["cap"],
            target_total=payload["target_total"],
            kept_per_country=dict(payload["kept_per_country"]),
        )


def select_cap(available: CountryDistribution, target_total: int) -> CapPlan:
    """Build the cap plan for shrinking ``available`` to ``target_total``."""
    if target_total < 0:
        raise DiversifyError("target_total must be non-negative")
    if target_total > available.total:
        raise DiversifyError(
            f"target_total {target_total} exceeds available pool {available.total}"
        )
    counts = available.counts
    if target_total == 0:
        return CapPlan(cap=0, target_total=0, kept_per_country={c: 0 for c in counts})

    def kept_sum(cap: int) -> int:
        return sum(min(v, cap) for v in counts.values())

    lo, hi = 1, max(counts.values())
    while lo < hi:
        mid = (lo + hi) // 2
        if kept_sum(mid) >= target_total:
            hi = mid
        else:
            lo = mid + 1
    cap = lo

    kept = {c: min(v, cap) for c, v in counts.items()}
    excess = sum(kept.values()) - target_total
    if excess > 0:
        at_cap = sorted(
            (c for c in counts if counts[c] >= cap),
            key=lambda c: (-counts[c], c),
        )
        # cap is minimal, so the excess is always smaller than the number of
        # countries sitting at the cap; each loses at most one article.
        for c in at_cap[:excess]:
            kept[c] -= 1
    return CapPlan(cap=cap, target_total=target_total, kept_per_country=kept)


def check_plan_against_pool(plan: CapPlan, availability: CountryDistribution) -> None:
    """Raise unless the plan could have been produced from this availability."""
    if set(plan.kept_per_country) != set(availability.counts):
        missing = set(plan.kept_per_country) ^ set(availability.counts)
        raise DiversifyError(f"plan and pool disagree on countries: {sorted(missing)}")
    for country, kept in plan.kept_per_country.items():
        have = availability[country]
        if have < plan.cap and kept != have:
            raise DiversifyError(
                f"{country}: plan keeps {kept} but only {have} available below cap"
            )
        if have >= plan.cap and kept not in (plan.cap, plan.cap - 1):
            raise DiversifyError(
                f"{country}: plan keeps {kept}, expected the cap {plan.cap} (or one less)"
            )
    total = sum(plan.kept_per_country.values())
    if total != plan.target_total:
        raise DiversifyError(f"plan keeps {total}, target is {plan.target_total}")


def enforce_distribution(
    pool: ArticleSet,
    plan: CapPlan,
    cluster_of: Mapping[str, tuple[int, int]],
    seed: int = 0,
) -> ArticleSet:
    """Select plan.kept_per_country[c] articles per country from the pool.

    Within a country the picks round-robin over its (bucket, cluster) groups
    so capping does not wipe out topics; inside a group, authority order
    (domain rank, then id) decides. The group visiting order comes from a
    seeded shuffle, so the pick set is reproducible for a given seed.

    ``cluster_of`` maps article id to its (bucket, cluster label) pair.
    """
    check_plan_against_pool(plan, country_histogram(pool))

    by_country: dict[str, dict[tuple[int, int], list]] = {}
    for article in sort_by_domain_rank(pool):
        if article.id not in cluster_of:
            raise DiversifyError(f"article {article.id} has no cluster assignment")
        group = tuple(cluster_of[article.id])
        by_country.setdefault(article.country, {}).setdefault(group, []).append(article)

    chosen = []
    for country in sorted(by_country):
        quota = plan.kept_per_country.get(country, 0)
        groups = by_country[country]
        available = sum(len(members) for members in groups.values())
        if quota >= available:
            for group in sorted(groups):
                chosen.extend(groups[group])
            continue
        order = sorted(groups)
        random.Random(f"{seed}:{country}").shuffle(order)
        queues = {g: list(groups[g]) for g in order}
        picked = 0
        while picked < quota:
            for g in order:
                if queues[g]:
                    chosen.append(queues[g].pop(0))
                    picked += 1
                    if picked == quota:
                        break
    return ArticleSet.of(sorted(chosen, key=lambda a: a.id))


def topic_histogram(articles: Iterable) -> dict[str, int]:
    """Exact topic counts, ordered by descending count then topic name."""
    counts: dict[str, int] = {}
    for a in articles:
        topic = a.topic if hasattr(a, "topic") else a["topic"]
        counts[topic] = counts.get(topic, 0) + 1
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


__all__ = [
    "CapPlan",
    "DiversifyError",
    "check_plan_against_pool",
    "enforce_distribution",
    "select_cap",
    "topic_histogram",
]
