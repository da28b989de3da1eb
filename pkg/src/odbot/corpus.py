"""Bundled NLU training corpus: loading, validation, and BIO conversion.

The corpus file is JSON with a list of annotated examples. Validation
enforces the data contract the models rely on: span sanity per example and
the corpus-level count floors (total size, entity coverage, per-intent
minimums).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .entities import ENTITY_TYPES
from .intents import INTENTS
from .text import Token, tokenize

MIN_EXAMPLES = 250
MIN_TOPIC_EXAMPLES = 121
MIN_LOCATION_EXAMPLES = 18
MIN_PER_INTENT = 6


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class EntityAnnotation:
    start: int
    end: int
    entity_type: str


@dataclass(frozen=True)
class NluExample:
    text: str
    intent: str
    entities: tuple[EntityAnnotation, ...] = ()


@dataclass
class NluCorpus:
    examples: list[NluExample]
    notes: str = ""


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "corpus ok"
        return "\n".join(self.violations)


def load_corpus(path: str | Path) -> NluCorpus:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or "examples" not in raw:
        raise CorpusError(f"{path}: expected an object with an 'examples' list")
    examples = []
    for i, item in enumerate(raw["examples"]):
        try:
            entities = tuple(
                EntityAnnotation(
                    start=int(e["start"]), end=int(e["end"]), entity_type=e["type"]
                )
                for e in item.get("entities", [])
            )
            examples.append(
                NluExample(
                    text=item["text"], intent=item["intent"], entities=entities
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"{path}: example {i} is malformed: {exc}") from exc
    return NluCorpus(examples=examples, notes=str(raw.get("notes", "")))


def validate_corpus(corpus: NluCorpus) -> ValidationReport:
    """Check span rules and the corpus-level count floors."""
    report = ValidationReport()
    intent_counts = {intent: 0 for intent in INTENTS}
    with_topic = 0
    with_location = 0
    for i, example in enumerate(corpus.examples):
        if example.intent in intent_counts:
            intent_counts[example.intent] += 1
        else:
            report.violations.append(
                f"example {i}: unknown intent {example.intent!r}"
            )
        spans = sorted(example.entities, key=lambda e: e.start)
        for e in spans:
            if e.entity_type not in ENTITY_TYPES:
                report.violations.append(
                    f"example {i}: unknown entity type {e.entity_type!r}"
                )
            if not (0 <= e.start < e.end <= len(example.text)):
                report.violations.append(
                    f"example {i}: span [{e.start},{e.end}) out of bounds"
                )
        for prev, cur in zip(spans, spans[1:]):
            if cur.start < prev.end:
                report.violations.append(f"example {i}: overlapping entity spans")
        if any(e.entity_type == "topic" for e in example.entities):
            with_topic += 1
        if any(e.entity_type == "location" for e in example.entities):
            with_location += 1
    if len(corpus.examples) < MIN_EXAMPLES:
        report.violations.append(
            f"corpus has {len(corpus.examples)} examples < {MIN_EXAMPLES}"
        )
    if with_topic < MIN_TOPIC_EXAMPLES:
        report.violations.append(
            f"{with_topic} examples with a topic entity < {MIN_TOPIC_EXAMPLES}"
        )
    if with_location < MIN_LOCATION_EXAMPLES:
        report.violations.append(
            f"{with_location} examples with a geo-entity < {MIN_LOCATION_EXAMPLES}"
        )
    for intent in INTENTS:
        if intent_counts[intent] < MIN_PER_INTENT:
            report.violations.append(
                f"{intent} has {intent_counts[intent]} < {MIN_PER_INTENT}"
            )
    return report


def example_to_bio(example: NluExample) -> tuple[list[Token], list[str]]:
    """Token sequence and aligned BIO labels for one example.

    Entity spans must start and end on token boundaries.
    """
    tokens = tokenize(example.text)
    labels = ["O"] * len(tokens)
    for e in example.entities:
        covered = [
            i for i, t in enumerate(tokens) if t.start >= e.start and t.end <= e.end
        ]
        if not covered:
            raise CorpusError(
                f"span [{e.start},{e.end}) in {example.text!r} covers no tokens"
            )
        if tokens[covered[0]].start != e.start or tokens[covered[-1]].end != e.end:
            raise CorpusError(
                f"span [{e.start},{e.end}) in {example.text!r} "
                "does not align with token boundaries"
            )
        labels[covered[0]] = f"B-{e.entity_type}"
        for i in covered[1:]:
            labels[i] = f"I-{e.entity_type}"
    return tokens, labels


def corpus_to_bio(corpus: NluCorpus) -> list[tuple[list[Token], list[str]]]:
    return [example_to_bio(example) for example in corpus.examples]


def corpus_to_intent_pairs(corpus: NluCorpus) -> list[tuple[str, str]]:
    return [(example.text, example.intent) for example in corpus.examples]
