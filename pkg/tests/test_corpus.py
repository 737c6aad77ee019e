from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from newsforge.corpus import (
    ArticleSet,
    CorpusError,
    CountryDistribution,
    DEFAULT_LANGUAGES,
    country_histogram,
    filter_by_language,
    load_articles,
    sample_matching_distribution,
    sort_by_domain_rank,
)

from conftest import article_set, load_json, make_article


def _write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


def _record(id="a1", **overrides):
    record = {
        "id": id, "title": "t", "summary": "", "body": "b", "language": "en",
        "country": "France", "source_domain": "x.example", "domain_rank": 5,
        "published_at": "2024-02-20T18:10:00Z",
    }
    record.update(overrides)
    return record


class TestLoadArticles:
    def test_three_valid_lines(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_record(f"a{i}") for i in range(3)])
        articles, rejects = load_articles(path)
        assert len(articles) == 3 and rejects == []

    def test_missing_id_goes_to_rejects_with_line_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        bad = _record()
        del bad["id"]
        _write_jsonl(path, [_record("a1"), bad, _record("a2")])
        articles, rejects = load_articles(path)
        assert [a.id for a in articles] == ["a1", "a2"]
        assert len(rejects) == 1 and rejects[0].line == 2
        assert "id" in rejects[0].reason

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("", encoding="utf-8")
        articles, rejects = load_articles(path)
        assert len(articles) == 0 and rejects == []

    def test_unreadable_file_is_fatal(self, tmp_path):
        with pytest.raises(CorpusError):
            load_articles(tmp_path / "nope.jsonl")

    def test_bad_timestamp_and_bad_json_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            json.dumps(_record("a1", published_at="not-a-date")) + "\n{broken\n",
            encoding="utf-8",
        )
        articles, rejects = load_articles(path)
        assert len(articles) == 0
        assert [r.line for r in rejects] == [1, 2]


class TestLanguageFilter:
    def test_default_list_is_the_twelve_languages(self):
        assert set(DEFAULT_LANGUAGES) == {
            "en", "es", "pt", "de", "ru", "fr", "ar", "it", "uk", "no", "sv", "da"
        }
        assert len(DEFAULT_LANGUAGES) == 12

    def test_all_allowed_unchanged(self):
        articles = article_set(make_article("a"), make_article("b"))
        assert list(filter_by_language(articles, ["en"])) == list(articles)

    def test_finnish_removed_by_default_list(self):
        fi = make_article("fi1", language="fi")
        en = make_article("en1", language="en")
        kept = filter_by_language(article_set(en, fi))
        assert [a.id for a in kept] == ["en1"]

    def test_empty_allowed_list_rejected(self):
        with pytest.raises(ValueError):
            filter_by_language(article_set(make_article("a")), [])


class TestCountryHistogram:
    def test_counts(self):
        articles = article_set(
            make_article("a", country="United States"),
            make_article("b", country="United States"),
            make_article("c", country="France"),
        )
        hist = country_histogram(articles)
        assert hist.counts == {"United States": 2, "France": 1}
        assert hist.total == 3

    def test_empty(self):
        hist = country_histogram(article_set())
        assert hist.counts == {} and hist.total == 0

    def test_published_dataset_has_125_countries_totalling_5049(self, data_dir):
        table = load_json(data_dir / "country_distribution.json")
        counts = {row["name"]: row["full"] for row in table["countries"]}
        dist = CountryDistribution(counts)
        assert len(dist.counts) == 125
        assert dist.total == 5049

    def test_unicode_country_names_normalize(self):
        a = make_article("a", country="Türkiye")  # decomposed umlaut
        b = make_article("b", country="Türkiye")   # precomposed
        hist = country_histogram(article_set(a, b))
        assert hist.counts == {"Türkiye": 2}


class TestSortByDomainRank:
    def test_absent_rank_sorts_last(self):
        articles = article_set(
            make_article("x", rank=30), make_article("y", rank=10), make_article("z", rank=None)
        )
        assert [a.id for a in sort_by_domain_rank(articles)] == ["y", "x", "z"]

    def test_equal_ranks_fall_back_to_id(self):
        articles = article_set(
            make_article("c", rank=7), make_article("a", rank=7), make_article("b", rank=7)
        )
        assert [a.id for a in sort_by_domain_rank(articles)] == ["a", "b", "c"]

    def test_mixed_five_article_fixture(self):
        # hand-sorted: rank 3 -> rank 12 -> rank 12 (id tiebreak) -> absent (id order)
        articles = article_set(
            make_article("n2", rank=None),
            make_article("m", rank=12),
            make_article("n1", rank=None),
            make_article("k", rank=12),
            make_article("top", rank=3),
        )
        assert [a.id for a in sort_by_domain_rank(articles)] == ["top", "k", "m", "n1", "n2"]


class TestSampleMatchingDistribution:
    def test_exact_apportionment(self):
        articles = article_set(
            make_article("u1", country="United States", rank=1),
            make_article("u2", country="United States", rank=2),
            make_article("u3", country="United States", rank=3),
            make_article("f1", country="France", rank=4),
            make_article("f2", country="France", rank=5),
        )
        target = CountryDistribution({"United States": 2, "France": 1})
        picked = sample_matching_distribution(articles, target, 3, seed=1)
        assert country_histogram(picked).counts == {"United States": 2, "France": 1}
        # rank order preferred inside a country
        assert {a.id for a in picked} == {"u1", "u2", "f1"}

    def test_refill_from_other_countries(self):
        articles = article_set(
            make_article("u1", country="United States", rank=1),
            make_article("f1", country="France", rank=2),
        )
        target = CountryDistribution({"United States": 1})
        picked = sample_matching_distribution(articles, target, 2, seed=1)
        assert country_histogram(picked).counts == {"United States": 1, "France": 1}

    def test_n_equal_to_size_returns_everything(self):
        articles = article_set(make_article("a"), make_article("b"))
        target = CountryDistribution({"United States": 1})
        assert len(sample_matching_distribution(articles, target, 2, seed=0)) == 2

    def test_n_too_large_errors(self):
        with pytest.raises(CorpusError):
            sample_matching_distribution(
                article_set(make_article("a")), CountryDistribution({"United States": 1}), 2, 0
            )

    def test_deterministic(self):
        articles = article_set(
            *[make_article(f"a{i}", country=("France" if i % 3 else "Spain"), rank=50 - i)
              for i in range(12)]
        )
        target = CountryDistribution({"France": 2, "Spain": 1})
        first = sample_matching_distribution(articles, target, 6, seed=9)
        second = sample_matching_distribution(articles, target, 6, seed=9)
        assert [a.id for a in first] == [a.id for a in second]


countries_strategy = st.lists(
    st.sampled_from(["United States", "France", "Germany", "Brazil", "Kenya"]),
    min_size=1, max_size=30,
)


@given(countries=countries_strategy, allowed_mask=st.integers(min_value=1, max_value=3))
def test_filtered_histogram_never_exceeds_unfiltered(countries, allowed_mask):
    languages = ["en", "fi", "da"]
    articles = ArticleSet.of(
        make_article(f"a{i}", country=c, language=languages[i % 3])
        for i, c in enumerate(countries)
    )
    allowed = [lang for i, lang in enumerate(languages) if allowed_mask >> i & 1]
    full = country_histogram(articles)
    filtered = country_histogram(filter_by_language(articles, allowed))
    for country, count in filtered.counts.items():
        assert count <= full[country]


@given(countries=countries_strategy, data=st.data())
def test_sample_size_is_exact(countries, data):
    articles = ArticleSet.of(
        make_article(f"a{i}", country=c, rank=i + 1) for i, c in enumerate(countries)
    )
    target = country_histogram(articles)
    n = data.draw(st.integers(min_value=0, max_value=len(articles)))
    picked = sample_matching_distribution(articles, target, n, seed=3)
    assert len(picked) == n
