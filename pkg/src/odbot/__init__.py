"""Conversational search over an open government data catalog."""

__version__ = "0.1.0"

from .catalog import DatasetRecord, SearchQuery, load_catalog, search
from .crf import CrfModel, log_partition, train_crf, viterbi_decode
from .dialogue import Tracker, featurize_state, new_tracker, update_tracker
from .entities import EntityMention, Gazetteer, extract_entities, gazetteer_lookup
from .intents import IntentPrediction, classify_intent, parse_payload, train_intent_model
from .policy import PolicyModel, train_policy
from .responses import BotResponse
from .text import Token, crf_features, message_vector, tokenize

__all__ = [
    "BotResponse",
    "CrfModel",
    "DatasetRecord",
    "EntityMention",
    "Gazetteer",
    "IntentPrediction",
    "PolicyModel",
    "SearchQuery",
    "Token",
    "Tracker",
    "classify_intent",
    "crf_features",
    "extract_entities",
    "featurize_state",
    "gazetteer_lookup",
    "load_catalog",
    "log_partition",
    "message_vector",
    "new_tracker",
    "parse_payload",
    "search",
    "tokenize",
    "train_crf",
    "train_intent_model",
    "train_policy",
    "update_tracker",
]
