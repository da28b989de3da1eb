import json

import pytest

from odbot.catalog import (
    CatalogError,
    DatasetRecord,
    SearchQuery,
    list_locations,
    list_topics,
    load_catalog,
    score,
    search,
)
from odbot.text import tokenize


def oracle_score(record, query):
    """Brute-force restatement of the scoring rule."""
    if query.location is not None and query.location not in [
        loc.lower() for loc in record.locations
    ]:
        return 0.0
    title = {t.lower for t in tokenize(record.title)}
    tags = {t.lower for tag in record.tags for t in tokenize(tag)}
    desc = {t.lower for t in tokenize(record.description)}
    total = 0.0
    for kw in query.keywords:
        total += 3 * (kw in title) + 2 * (kw in tags) + 1 * (kw in desc)
    return total


def oracle_search(index, query):
    scored = [(r, oracle_score(r, query)) for r in index.records]
    hits = sorted(
        [(r, s) for r, s in scored if s > 0], key=lambda p: (-p[1], p[0].id)
    )
    return [r for r, _ in hits[:5]]


def write_lines(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")


def base_row(rec_id, **overrides):
    row = {
        "id": rec_id,
        "title": f"Dataset {rec_id}",
        "description": "",
        "tags": [],
        "locations": [],
        "url": f"https://example.test/{rec_id}",
        "portal": "example.test",
    }
    row.update(overrides)
    return row


class TestLoading:
    def test_three_valid_lines(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        write_lines(path, [base_row("a"), base_row("b"), base_row("c")])
        index = load_catalog(path)
        assert len(index.records) == 3
        assert index.skipped == 0

    def test_duplicate_id_rejected_by_name(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        write_lines(path, [base_row("a"), base_row("a")])
        with pytest.raises(CatalogError, match="'a'"):
            load_catalog(path)

    def test_missing_url_skipped_with_warning_count(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        row = base_row("a")
        del row["url"]
        write_lines(path, [row, base_row("b")])
        index = load_catalog(path)
        assert [r.id for r in index.records] == ["b"]
        assert index.skipped == 1

    def test_malformed_line_skipped(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        path.write_text(
            json.dumps(base_row("a")) + "\nnot json at all\n", encoding="utf-8"
        )
        index = load_catalog(path)
        assert len(index.records) == 1
        assert index.skipped == 1

    def test_bundled_catalog_loads_clean(self, catalog_index):
        assert len(catalog_index.records) == 50
        assert catalog_index.skipped == 0
        assert len({r.id for r in catalog_index.records}) == 50


def make_record(**overrides):
    defaults = dict(
        id="r1",
        title="Schools in Graz",
        description="Locations of public schools.",
        tags=("education",),
        locations=("Graz",),
        url="https://example.test/r1",
        portal="example.test",
    )
    defaults.update(overrides)
    return DatasetRecord(**defaults)


class TestScore:
    def test_title_and_description_hits(self):
        record = make_record()
        value = score(record, SearchQuery(keywords=("schools",)))
        assert value == oracle_score(record, SearchQuery(keywords=("schools",))) == 4.0

    def test_empty_keywords_score_zero(self):
        assert score(make_record(), SearchQuery(keywords=())) == 0.0

    def test_location_filter_zeroes_keyword_hits(self):
        record = make_record(locations=("Linz",))
        assert score(record, SearchQuery(keywords=("schools",), location="graz")) == 0.0

    def test_location_match_is_case_insensitive(self):
        record = make_record()
        assert score(record, SearchQuery(keywords=("schools",), location="graz")) > 0

    def test_tag_match(self):
        record = make_record(title="Register", description="")
        assert score(record, SearchQuery(keywords=("education",))) == 2.0

    def test_matches_oracle_on_bundled_catalog(self, catalog_index):
        queries = [
            SearchQuery(keywords=("schools",)),
            SearchQuery(keywords=("education",)),
            SearchQuery(keywords=("air", "quality")),
            SearchQuery(keywords=("schools",), location="graz"),
            SearchQuery(keywords=("parking",), location="vienna"),
            SearchQuery(keywords=("nonexistent",)),
        ]
        for query in queries:
            for record in catalog_index.records:
                assert score(record, query, catalog_index) == oracle_score(
                    record, query
                )


class TestSearch:
    def test_truncates_to_five(self, catalog_index):
        results = search(catalog_index, SearchQuery(keywords=("schools",)))
        matching = [
            r
            for r in catalog_index.records
            if oracle_score(r, SearchQuery(keywords=("schools",))) > 0
        ]
        assert len(matching) == 7  # fixture is built with seven school datasets
        assert len(results) == 5

    def test_no_match_returns_empty(self, catalog_index):
        assert search(catalog_index, SearchQuery(keywords=("zeppelin",))) == []

    def test_equal_scores_order_by_id(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        write_lines(
            path,
            [
                base_row("b", title="parking data"),
                base_row("a", title="parking info"),
            ],
        )
        index = load_catalog(path)
        results = search(index, SearchQuery(keywords=("parking",)))
        assert [r.id for r in results] == ["a", "b"]

    def test_matches_oracle_end_to_end(self, catalog_index):
        queries = [
            SearchQuery(keywords=("schools",)),
            SearchQuery(keywords=("education",), location="graz"),
            SearchQuery(keywords=("public", "transport")),
            SearchQuery(keywords=("budget",)),
            SearchQuery(keywords=("trees",), location="vienna"),
        ]
        for query in queries:
            got = [r.id for r in search(catalog_index, query)]
            expected = [r.id for r in oracle_search(catalog_index, query)]
            assert got == expected

    def test_geo_filter_soundness(self, catalog_index):
        for location in ["graz", "vienna", "linz"]:
            query = SearchQuery(keywords=("data", "city", "public"), location=location)
            for record in search(catalog_index, query):
                assert location in [loc.lower() for loc in record.locations]

    def test_repeated_queries_identical(self, catalog_index):
        query = SearchQuery(keywords=("education",))
        first = [r.id for r in search(catalog_index, query)]
        second = [r.id for r in search(catalog_index, query)]
        assert first == second


class TestOptionLists:
    def test_topic_frequency_order(self, catalog_index):
        # oracle: recount frequencies straight off the records
        counts = {}
        for record in catalog_index.records:
            for tag in set(record.tags):
                counts[tag] = counts.get(tag, 0) + 1
        expected = [
            t for t, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        ]
        assert list_topics(catalog_index, 6) == expected[:6]
        assert list_topics(catalog_index, 1) == expected[:1]
        assert "education" in list_topics(catalog_index, 6)
        assert "health care" in list_topics(catalog_index, 6)

    def test_location_frequency_order(self, catalog_index):
        counts = {}
        for record in catalog_index.records:
            for loc in set(record.locations):
                counts[loc] = counts.get(loc, 0) + 1
        expected = [
            l for l, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        ]
        assert list_locations(catalog_index, 6) == expected[:6]
        assert list_locations(catalog_index, 6)[0] == "Graz"

    def test_empty_catalog(self, tmp_path):
        path = tmp_path / "catalog.jsonl"
        path.write_text("", encoding="utf-8")
        index = load_catalog(path)
        assert list_topics(index, 5) == []
        assert list_locations(index, 5) == []

    def test_limit_beyond_distinct_values(self, catalog_index):
        all_locations = list_locations(catalog_index, 1000)
        distinct = {loc for r in catalog_index.records for loc in r.locations}
        assert len(all_locations) == len(distinct)
