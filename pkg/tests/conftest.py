"""Shared fixtures: the bundled data and the models trained on it.

Training runs once per session; the CRF is the slow part (~15 s).
"""

import pytest

from odbot.bundle import file_sha256, save_bundle
from odbot.catalog import load_catalog
from odbot.cli import (
    DEFAULT_CATALOG,
    DEFAULT_GAZETTEER,
    DEFAULT_NLU,
    DEFAULT_STORIES,
    DEFAULT_TEMPLATES,
)
from odbot.corpus import corpus_to_bio, corpus_to_intent_pairs, load_corpus
from odbot.crf import train_crf
from odbot.entities import Gazetteer
from odbot.intents import train_intent_model
from odbot.manager import DialogueManager
from odbot.policy import train_policy
from odbot.responses import Renderer, load_templates
from odbot.stories import load_stories

SEED = 13


@pytest.fixture(scope="session")
def nlu_corpus():
    return load_corpus(DEFAULT_NLU)


@pytest.fixture(scope="session")
def bundled_stories():
    return load_stories(DEFAULT_STORIES)


@pytest.fixture(scope="session")
def crf_model(nlu_corpus):
    return train_crf(corpus_to_bio(nlu_corpus))


@pytest.fixture(scope="session")
def intent_model(nlu_corpus):
    return train_intent_model(corpus_to_intent_pairs(nlu_corpus), seed=SEED)


@pytest.fixture(scope="session")
def policy_model(bundled_stories):
    return train_policy(bundled_stories, seed=SEED)


@pytest.fixture(scope="session")
def catalog_index():
    return load_catalog(DEFAULT_CATALOG)


@pytest.fixture(scope="session")
def gazetteer():
    return Gazetteer.from_file(DEFAULT_GAZETTEER)


@pytest.fixture(scope="session")
def templates():
    return load_templates(DEFAULT_TEMPLATES)


@pytest.fixture(scope="session")
def manager(policy_model, templates, catalog_index):
    return DialogueManager(
        policy=policy_model,
        renderer=Renderer(templates, catalog_index),
        index=catalog_index,
    )


@pytest.fixture(scope="session")
def bundle_dir(tmp_path_factory, crf_model, intent_model, policy_model):
    directory = tmp_path_factory.mktemp("bundle")
    save_bundle(
        directory,
        crf_model,
        intent_model,
        policy_model,
        seed=SEED,
        data_hashes={
            "nlu": file_sha256(DEFAULT_NLU),
            "stories": file_sha256(DEFAULT_STORIES),
        },
        templates_hash=file_sha256(DEFAULT_TEMPLATES),
    )
    return directory
