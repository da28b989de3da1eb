"""In-memory dataset catalog with field-weighted keyword scoring.

The catalog is loaded once from a newline-delimited JSON file and indexed for
title/tag/description token matches. Queries combine topic keywords with an
optional hard location filter and return at most five records.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .text import tokenize

logger = logging.getLogger(__name__)

MAX_RESULTS = 5

TITLE_WEIGHT = 3
TAG_WEIGHT = 2
DESCRIPTION_WEIGHT = 1


class CatalogError(ValueError):
    """The catalog file cannot be loaded as a whole (e.g. duplicate ids)."""


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    title: str
    description: str
    tags: tuple[str, ...]
    locations: tuple[str, ...]
    url: str
    portal: str


@dataclass(frozen=True)
class SearchQuery:
    """Lowercased topic keywords plus an optional lowercased location."""

    keywords: tuple[str, ...]
    location: str | None = None

    @classmethod
    def from_slots(cls, topic: str | None, location: str | None) -> "SearchQuery":
        keywords = tuple(t.lower for t in tokenize(topic)) if topic else ()
        return cls(keywords=keywords, location=location.lower() if location else None)


@dataclass
class Index:
    records: list[DatasetRecord]
    skipped: int = 0  # records dropped during load (missing fields, bad JSON)
    _token_cache: dict[str, tuple[set[str], set[str], set[str]]] = field(
        default_factory=dict, repr=False
    )

    def record_tokens(self, record: DatasetRecord) -> tuple[set[str], set[str], set[str]]:
        """(title tokens, tag tokens, description tokens), cached per record."""
        cached = self._token_cache.get(record.id)
        if cached is None:
            cached = (
                {t.lower for t in tokenize(record.title)},
                {t.lower for tag in record.tags for t in tokenize(tag)},
                {t.lower for t in tokenize(record.description)},
            )
            self._token_cache[record.id] = cached
        return cached


def _parse_record(raw: dict) -> DatasetRecord | None:
    rec_id = raw.get("id")
    title = raw.get("title")
    url = raw.get("url")
    if not rec_id or not title or not url:
        return None
    return DatasetRecord(
        id=str(rec_id),
        title=str(title),
        description=str(raw.get("description", "")),
        tags=tuple(str(t) for t in raw.get("tags", [])),
        locations=tuple(str(loc) for loc in raw.get("locations", [])),
        url=str(url),
        portal=str(raw.get("portal", "")),
    )


def load_catalog(path: str | Path) -> Index:
    """Read newline-delimited JSON records and build the index.

    Malformed lines and records missing title/url are skipped (with the line
    number logged); duplicate ids abort the load.
    """
    path = Path(path)
    records: list[DatasetRecord] = []
    seen: set[str] = set()
    skipped = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError:
                logger.warning("%s:%d: malformed record skipped", path, lineno)
                skipped += 1
                continue
            record = _parse_record(raw)
            if record is None:
                logger.warning(
                    "%s:%d: record missing id/title/url skipped", path, lineno
                )
                skipped += 1
                continue
            if record.id in seen:
                raise CatalogError(f"duplicate dataset id {record.id!r} on line {lineno}")
            seen.add(record.id)
            records.append(record)
    return Index(records=records, skipped=skipped)


def score(record: DatasetRecord, query: SearchQuery, index: Index | None = None) -> float:
    """Field-weighted keyword score; zero when the location filter misses.

    Per keyword: +3 for a title token match, +2 for a tag token match, +1 for
    a description token match. A set location must match one of the record's
    locations case-insensitively or the score is 0 regardless of keywords.
    """
    if query.location is not None:
        if query.location not in (loc.lower() for loc in record.locations):
            return 0.0
    if index is not None:
        title_toks, tag_toks, desc_toks = index.record_tokens(record)
    else:
        title_toks = {t.lower for t in tokenize(record.title)}
        tag_toks = {t.lower for tag in record.tags for t in tokenize(tag)}
        desc_toks = {t.lower for t in tokenize(record.description)}
    total = 0.0
    for kw in query.keywords:
        if kw in title_toks:
            total += TITLE_WEIGHT
        if kw in tag_toks:
            total += TAG_WEIGHT
        if kw in desc_toks:
            total += DESCRIPTION_WEIGHT
    return total


def search(index: Index, query: SearchQuery) -> list[DatasetRecord]:
    """Positive-scoring records ordered by (score desc, id asc), top five."""
    scored = [
        (record, score(record, query, index))
        for record in index.records
    ]
    hits = [(r, s) for r, s in scored if s > 0]
    hits.sort(key=lambda pair: (-pair[1], pair[0].id))
    return [r for r, _ in hits[:MAX_RESULTS]]


def list_topics(index: Index, limit: int) -> list[str]:
    """Most frequent tags across records, ties alphabetical."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    counts = Counter(tag for record in index.records for tag in set(record.tags))
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [tag for tag, _ in ordered[:limit]]


def list_locations(index: Index, limit: int) -> list[str]:
    """Most frequent location annotations, ties alphabetical."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    counts = Counter(
        loc for record in index.records for loc in set(record.locations)
    )
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [loc for loc, _ in ordered[:limit]]
