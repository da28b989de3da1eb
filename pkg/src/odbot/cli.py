"""Command line entry points: train, serve, chat, validate-data, eval.

Every flag can also be set through an ODBOT_-prefixed environment variable
(e.g. ODBOT_MODEL_DIR). Data flags default to the bundled files so the demo
runs out of the box.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .bundle import file_sha256, load_bundle, save_bundle
from .corpus import corpus_to_bio, corpus_to_intent_pairs, load_corpus, validate_corpus
from .crf import train_crf, viterbi_decode
from .entities import spans_from_labels
from .intents import classify_intent, train_intent_model
from .policy import story_replay_accuracy, train_policy
from .service import ServiceConfig, create_app
from .stories import StoryError, load_stories, unroll_stories
from .text import tokenize

DATA_DIR = Path(__file__).parent / "data"

DEFAULT_NLU = DATA_DIR / "nlu.json"
DEFAULT_STORIES = DATA_DIR / "stories.yaml"
DEFAULT_TEMPLATES = DATA_DIR / "templates.yaml"
DEFAULT_GAZETTEER = DATA_DIR / "gazetteer.txt"
DEFAULT_CATALOG = DATA_DIR / "catalog.jsonl"


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise click.ClickException(f"missing file: {p}")
    return p


def opt(flag: str, **kwargs):
    """Flag with an environment override mirroring its name (ODBOT_...)."""
    envvar = "ODBOT_" + flag.lstrip("-").upper().replace("-", "_")
    return click.option(flag, envvar=envvar, show_default=True, **kwargs)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Conversational search over an open data catalog."""


@main.command()
@opt("--nlu", default=str(DEFAULT_NLU))
@opt("--stories", default=str(DEFAULT_STORIES))
@opt("--templates", default=str(DEFAULT_TEMPLATES))
@opt("--model-dir", default="model")
@opt("--seed", default=13, type=int)
def train(nlu: str, stories: str, templates: str, model_dir: str, seed: int) -> None:
    """Train all models and write a versioned bundle."""
    nlu_path = _existing(nlu)
    stories_path = _existing(stories)
    templates_path = _existing(templates)
    corpus = load_corpus(nlu_path)
    report = validate_corpus(corpus)
    if not report.ok:
        raise click.ClickException(f"corpus invalid:\n{report}")
    story_list = load_stories(stories_path)
    click.echo(f"training entity tagger on {len(corpus.examples)} examples ...")
    crf_model = train_crf(corpus_to_bio(corpus))
    click.echo("training intent classifier ...")
    intent_model = train_intent_model(corpus_to_intent_pairs(corpus), seed=seed)
    click.echo(f"training policy on {len(story_list)} stories ...")
    try:
        policy_model = train_policy(story_list, seed=seed)
    except StoryError as exc:
        raise click.ClickException(str(exc))
    out = save_bundle(
        model_dir,
        crf_model,
        intent_model,
        policy_model,
        seed=seed,
        data_hashes={
            "nlu": file_sha256(nlu_path),
            "stories": file_sha256(stories_path),
        },
        templates_hash=file_sha256(templates_path),
    )
    click.echo(f"bundle written to {out}")


def _service_config(
    model_dir: str,
    catalog: str,
    gazetteer: str,
    templates: str,
    ttl_minutes: float,
    allowed_origin: str | None,
) -> ServiceConfig:
    return ServiceConfig(
        model_dir=_existing(model_dir),
        catalog_path=_existing(catalog),
        gazetteer_path=_existing(gazetteer),
        templates_path=_existing(templates),
        ttl_minutes=ttl_minutes,
        allowed_origin=allowed_origin,
    )


@main.command()
@opt("--model-dir", default="model")
@opt("--catalog", default=str(DEFAULT_CATALOG))
@opt("--gazetteer", default=str(DEFAULT_GAZETTEER))
@opt("--templates", default=str(DEFAULT_TEMPLATES))
@opt("--port", default=8000, type=int)
@opt("--ttl-minutes", default=30.0, type=float)
@opt("--allowed-origin", default=None)
def serve(
    model_dir: str,
    catalog: str,
    gazetteer: str,
    templates: str,
    port: int,
    ttl_minutes: float,
    allowed_origin: str | None,
) -> None:
    """Start the HTTP chat service."""
    import uvicorn

    config = _service_config(
        model_dir, catalog, gazetteer, templates, ttl_minutes, allowed_origin
    )
    load_bundle(config.model_dir)  # fail fast before binding the port
    app = create_app(config)
    uvicorn.run(app, host="0.0.0.0", port=port)


@main.command()
@opt("--model-dir", default="model")
@opt("--catalog", default=str(DEFAULT_CATALOG))
@opt("--gazetteer", default=str(DEFAULT_GAZETTEER))
@opt("--templates", default=str(DEFAULT_TEMPLATES))
def chat(model_dir: str, catalog: str, gazetteer: str, templates: str) -> None:
    """Talk to the trained bot in the terminal."""
    from .service import build_runtime

    config = _service_config(model_dir, catalog, gazetteer, templates, 30.0, None)
    runtime = build_runtime(config)
    session_id = runtime.store.create()
    session = runtime.store.get(session_id)
    click.echo("type a message ('quit' to leave)")
    while True:
        try:
            line = input("> ").strip()
        except (EOFError, KeyboardInterrupt):
            break
        if line in ("quit", "exit"):
            break
        if not line:
            continue
        for response in runtime.pipeline.handle_message(session.tracker, line):
            click.echo(f"bot: {response.text}")
            for button in response.buttons:
                click.echo(f"   [{button.title}] -> {button.payload}")
            for link in response.links:
                click.echo(f"   - {link.title}: {link.url}")


@main.command("validate-data")
@opt("--nlu", default=str(DEFAULT_NLU))
@opt("--stories", default=str(DEFAULT_STORIES))
def validate_data(nlu: str, stories: str) -> None:
    """Check the corpus count floors, span rules, and story consistency."""
    corpus = load_corpus(_existing(nlu))
    report = validate_corpus(corpus)
    if not report.ok:
        raise click.ClickException(f"corpus invalid:\n{report}")
    click.echo(f"nlu: {len(corpus.examples)} examples ok")
    try:
        corpus_to_bio(corpus)
    except Exception as exc:
        raise click.ClickException(f"entity spans do not align with tokens: {exc}")
    story_list = load_stories(_existing(stories))
    try:
        pairs = unroll_stories(story_list)
    except StoryError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"stories: {len(story_list)} stories, {len(pairs)} steps ok")


@main.command()
@opt("--model-dir", default="model")
@opt("--nlu", default=str(DEFAULT_NLU))
@opt("--stories", default=str(DEFAULT_STORIES))
def eval(model_dir: str, nlu: str, stories: str) -> None:
    """Print training-fit metrics for a bundle."""
    bundle = load_bundle(_existing(model_dir))
    corpus = load_corpus(_existing(nlu))
    story_list = load_stories(_existing(stories))

    pairs = corpus_to_intent_pairs(corpus)
    hits = sum(
        1
        for text, intent in pairs
        if classify_intent(bundle.intent_model, text).intent == intent
    )
    click.echo(f"intent accuracy: {hits}/{len(pairs)} = {hits / len(pairs):.3f}")

    tp = fp = fn = 0
    for example in corpus.examples:
        tokens = tokenize(example.text)
        gold = {
            (e.entity_type, e.start, e.end) for e in example.entities
        }
        predicted = set()
        if tokens:
            labels = viterbi_decode(bundle.crf_model, tokens)
            for kind, first, last in spans_from_labels(labels):
                predicted.add((kind, tokens[first].start, tokens[last].end))
        tp += len(gold & predicted)
        fp += len(predicted - gold)
        fn += len(gold - predicted)
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    click.echo(f"entity span F1: {f1:.3f} (p={precision:.3f}, r={recall:.3f})")

    replay = story_replay_accuracy(bundle.policy_model, story_list)
    click.echo(f"story replay: {replay:.3f}")
    if replay < 1.0:
        sys.exit(1)


if __name__ == "__main__":
    main()
