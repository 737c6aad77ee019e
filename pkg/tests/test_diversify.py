from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from newsforge.corpus import ArticleSet, CountryDistribution, country_histogram
from newsforge.diversify import (
    CapPlan,
    DiversifyError,
    enforce_distribution,
    select_cap,
    topic_histogram,
)

from conftest import load_json, make_article


def brute_force_cap(counts: dict[str, int], target: int) -> int:
    """Oracle: scan every candidate ceiling from 1 upward."""
    for cap in range(1, max(counts.values()) + 1):
        if sum(min(v, cap) for v in counts.values()) >= target:
            return cap
    raise AssertionError("target exceeds pool")


class TestSelectCap:
    def test_hand_example_against_scan_oracle(self):
        counts = {"A": 300, "B": 100, "C": 50}
        plan = select_cap(CountryDistribution(counts), 250)
        assert plan.cap == brute_force_cap(counts, 250) == 100
        assert plan.kept_per_country == {"A": 100, "B": 100, "C": 50}
        assert sum(plan.kept_per_country.values()) == 250

    def test_target_equal_to_total_keeps_everything(self):
        counts = {"A": 5, "B": 2}
        plan = select_cap(CountryDistribution(counts), 7)
        assert plan.cap == 5
        assert plan.kept_per_country == counts

    def test_target_above_total_errors(self):
        with pytest.raises(DiversifyError):
            select_cap(CountryDistribution({"A": 3}), 4)

    def test_trim_takes_from_richest_capped_countries_first(self):
        counts = {"A": 10, "B": 5, "C": 5}
        plan = select_cap(CountryDistribution(counts), 13)
        # cap 5 keeps 15; trim 2 from the capped countries in descending
        # availability (ties by name): A first, then B.
        assert plan.cap == 5
        assert plan.kept_per_country == {"A": 4, "B": 4, "C": 5}

    def test_published_distribution_reproduced(self, data_dir):
        table = load_json(data_dir / "country_distribution.json")
        published = {row["name"]: row["full"] for row in table["countries"]}
        # Build a pool availability consistent with the published outcome:
        # below-cap countries contribute exactly their published counts, the
        # capped countries got squeezed down from a much larger supply.
        pool_total = 22636
        capped = [c for c, v in published.items() if v == 129]
        available = dict(published)
        uncapped_total = sum(v for c, v in published.items() if v < 129)
        surplus = pool_total - uncapped_total
        per_big = surplus // len(capped)
        for i, c in enumerate(sorted(capped)):
            available[c] = per_big + (1 if i < surplus % len(capped) else 0)
        assert sum(available.values()) == pool_total
        assert all(available[c] >= 129 for c in capped)

        plan = select_cap(CountryDistribution(available), 5049)
        assert plan.cap == 129
        assert sum(plan.kept_per_country.values()) == 5049
        assert max(plan.kept_per_country.values()) == 129
        assert len(plan.kept_per_country) == 125
        assert all(v >= 1 for v in plan.kept_per_country.values())
        assert plan.kept_per_country == published

    def test_json_round_trip(self):
        plan = select_cap(CountryDistribution({"A": 4, "B": 2}), 5)
        assert CapPlan.from_json(plan.to_json()) == plan


@settings(max_examples=200)
@given(
    counts=st.dictionaries(
        st.sampled_from(list("ABCDEFGH")), st.integers(min_value=1, max_value=200),
        min_size=1, max_size=8,
    ),
    data=st.data(),
)
def test_select_cap_properties(counts, data):
    total = sum(counts.values())
    target = data.draw(st.integers(min_value=len(counts), max_value=total))
    plan = select_cap(CountryDistribution(counts), target)
    assert plan.cap == brute_force_cap(counts, target)
    kept = plan.kept_per_country
    assert sum(kept.values()) == target
    assert all(kept[c] <= plan.cap for c in counts)
    # no country eliminated while the target can cover them all
    assert all(kept[c] >= 1 for c in counts)
    # raising the target never lowers any country's kept count
    if target < total:
        bigger = select_cap(CountryDistribution(counts), target + 1)
        assert all(bigger.kept_per_country[c] >= kept[c] for c in counts)


class TestEnforceDistribution:
    def _pool(self):
        articles = []
        cluster_of = {}
        # one country, three clusters of sizes 5/3/2
        for cluster, size in ((0, 5), (1, 3), (2, 2)):
            for i in range(size):
                id = f"c{cluster}-{i}"
                articles.append(make_article(id, country="France", rank=10 * cluster + i + 1))
                cluster_of[id] = (0, cluster)
        return ArticleSet.of(articles), cluster_of

    def test_country_below_cap_keeps_everything(self):
        pool, cluster_of = self._pool()
        plan = select_cap(country_histogram(pool), 10)
        picked = enforce_distribution(pool, plan, cluster_of, seed=1)
        assert len(picked) == 10

    def test_round_robin_covers_every_cluster(self):
        pool, cluster_of = self._pool()
        plan = CapPlan(cap=6, target_total=6, kept_per_country={"France": 6})
        picked = enforce_distribution(pool, plan, cluster_of, seed=3)
        assert len(picked) == 6
        per_cluster: dict[int, int] = {}
        for a in picked:
            per_cluster[cluster_of[a.id][1]] = per_cluster.get(cluster_of[a.id][1], 0) + 1
        assert set(per_cluster) == {0, 1, 2}          # all clusters represented
        assert per_cluster[0] in (2, 3)
        assert per_cluster[1] == 2
        assert per_cluster[2] in (1, 2)

    def test_deterministic_given_seed(self):
        pool, cluster_of = self._pool()
        plan = CapPlan(cap=6, target_total=6, kept_per_country={"France": 6})
        a = enforce_distribution(pool, plan, cluster_of, seed=42)
        b = enforce_distribution(pool, plan, cluster_of, seed=42)
        assert [x.id for x in a] == [x.id for x in b]

    def test_inconsistent_plan_rejected(self):
        pool, cluster_of = self._pool()
        plan = CapPlan(cap=4, target_total=4, kept_per_country={"France": 2})
        with pytest.raises(DiversifyError):
            enforce_distribution(pool, plan, cluster_of, seed=1)

    def test_missing_cluster_assignment_rejected(self):
        pool, cluster_of = self._pool()
        del cluster_of["c0-0"]
        plan = select_cap(country_histogram(pool), 6)
        with pytest.raises(DiversifyError, match="cluster"):
            enforce_distribution(pool, plan, cluster_of, seed=1)

    def test_published_plan_applied_to_synthetic_pool(self, data_dir):
        # pool whose per-country availability matches the published keeps for
        # sub-cap countries and exceeds the cap elsewhere
        table = load_json(data_dir / "country_distribution.json")
        published = {row["name"]: row["full"] for row in table["countries"]}
        articles = []
        cluster_of = {}
        idx = 0
        for country, kept in published.items():
            supply = kept if kept < 129 else 135
            for i in range(supply):
                id = f"p{idx:05d}"
                articles.append(make_article(id, country=country, rank=idx + 1))
                cluster_of[id] = (idx % 7, idx % 3)
                idx += 1
        pool = ArticleSet.of(articles)
        plan = select_cap(country_histogram(pool), 5049)
        picked = enforce_distribution(pool, plan, cluster_of, seed=11)
        assert country_histogram(picked).counts == published

    def test_empty_quota_country(self):
        pool = ArticleSet.of([make_article("x", country="France")])
        plan = CapPlan(cap=1, target_total=1, kept_per_country={"France": 1})
        picked = enforce_distribution(pool, plan, {"x": (0, 0)}, seed=0)
        assert [a.id for a in picked] == ["x"]


class TestTopicHistogram:
    def test_counts_and_order(self):
        class T:
            def __init__(self, topic):
                self.topic = topic

        hist = topic_histogram([T("Sports"), T("Politics"), T("Sports")])
        assert list(hist.items()) == [("Sports", 2), ("Politics", 1)]

    def test_empty(self):
        assert topic_histogram([]) == {}

    def test_tie_broken_by_name(self):
        class T:
            def __init__(self, topic):
                self.topic = topic

        hist = topic_histogram([T("Zebra"), T("Apple")])
        assert list(hist) == ["Apple", "Zebra"]
