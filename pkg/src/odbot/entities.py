"""Entity mention extraction: trained tagger plus gazetteer lookup.

The tagger handles open-vocabulary topic keywords and the locations it saw
during training; the gazetteer catches curated place names the tagger misses.
When both fire on overlapping spans the gazetteer wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .crf import CrfModel, log_partition, viterbi_with_score
from .text import Token, tokenize

TOPIC = "topic"
LOCATION = "location"
ENTITY_TYPES = (TOPIC, LOCATION)


@dataclass(frozen=True)
class EntityMention:
    """A typed span of the source message.

    ``surface`` always equals the source text slice [start, end).
    """

    entity_type: str
    surface: str
    start: int
    end: int
    extractor: str  # "crf" or "gazetteer"
    confidence: float


class Gazetteer:
    """Exact-match lookup table of location names.

    Entries are stored as tuples of lowercased tokens; matching is
    longest-match, left to right, with matched tokens consumed.
    """

    def __init__(self, names: Iterable[str] = ()):
        self.entries: set[tuple[str, ...]] = set()
        self.max_entry_length = 0
        for name in names:
            self.add(name)

    def add(self, name: str) -> None:
        toks = tuple(t.lower for t in tokenize(name))
        if not toks:
            raise ValueError(f"gazetteer entry {name!r} has no tokens")
        self.entries.add(toks)
        self.max_entry_length = max(self.max_entry_length, len(toks))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: str) -> bool:
        return tuple(t.lower for t in tokenize(name)) in self.entries

    @classmethod
    def from_file(cls, path: str | Path) -> "Gazetteer":
        """Load one location name per line; '#' comments and blanks ignored."""
        gaz = cls()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            gaz.add(stripped)
        return gaz


def gazetteer_lookup(
    gazetteer: Gazetteer, tokens: Sequence[Token], text: str
) -> list[EntityMention]:
    """Longest-match scan emitting location mentions with confidence 1.0."""
    mentions: list[EntityMention] = []
    lowers = [t.lower for t in tokens]
    i = 0
    n = len(tokens)
    while i < n:
        matched = 0
        for length in range(min(gazetteer.max_entry_length, n - i), 0, -1):
            if tuple(lowers[i : i + length]) in gazetteer.entries:
                matched = length
                break
        if matched:
            start = tokens[i].start
            end = tokens[i + matched - 1].end
            mentions.append(
                EntityMention(
                    entity_type=LOCATION,
                    surface=text[start:end],
                    start=start,
                    end=end,
                    extractor="gazetteer",
                    confidence=1.0,
                )
            )
            i += matched
        else:
            i += 1
    return mentions


def spans_from_labels(labels: Sequence[str]) -> list[tuple[str, int, int]]:
    """Collapse a BIO label sequence to (type, first_token, last_token) spans.

    A dangling I-x (no preceding B-x/I-x of the same type) starts a new span.
    """
    spans: list[tuple[str, int, int]] = []
    open_type: str | None = None
    open_start = 0
    for i, label in enumerate(labels):
        if label == "O":
            if open_type:
                spans.append((open_type, open_start, i - 1))
                open_type = None
            continue
        prefix, kind = label.split("-", 1)
        if prefix == "B" or open_type != kind:
            if open_type:
                spans.append((open_type, open_start, i - 1))
            open_type = kind
            open_start = i
    if open_type:
        spans.append((open_type, open_start, len(labels) - 1))
    return spans


def extract_entities(
    model: CrfModel, gazetteer: Gazetteer, text: str
) -> list[EntityMention]:
    """All mentions in ``text``, sorted by start and non-overlapping.

    Tagger mentions carry the decoded path's probability as confidence;
    gazetteer mentions overlapping a tagger mention replace it.
    """
    tokens = tokenize(text)
    if not tokens:
        return []
    labels, best_score = viterbi_with_score(model, tokens)
    confidence = min(1.0, max(0.0, math.exp(best_score - log_partition(model, tokens))))
    crf_mentions = []
    for kind, first, last in spans_from_labels(labels):
        start = tokens[first].start
        end = tokens[last].end
        crf_mentions.append(
            EntityMention(
                entity_type=kind,
                surface=text[start:end],
                start=start,
                end=end,
                extractor="crf",
                confidence=confidence,
            )
        )
    gaz_mentions = gazetteer_lookup(gazetteer, tokens, text)
    kept = [
        m
        for m in crf_mentions
        if not any(m.start < g.end and g.start < m.end for g in gaz_mentions)
    ]
    return sorted(kept + gaz_mentions, key=lambda m: m.start)
