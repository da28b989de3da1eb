"""Versioned model bundle: one directory holding all trained artifacts.

The manifest records the format version, training seed, and content hashes
of the training inputs; loading refuses bundles written under a different
format version so stale artifacts fail fast instead of misbehaving.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .crf import NEG_INF, CrfModel
from .intents import IntentModel
from .policy import PolicyModel
from .text import Vocabulary

FORMAT_VERSION = 1

MANIFEST_FILE = "manifest.json"
CRF_FILE = "entity_tagger.json"
INTENT_FILE = "intent_classifier.json"
POLICY_FILE = "policy.json"


class BundleError(RuntimeError):
    pass


@dataclass
class Bundle:
    crf_model: CrfModel
    intent_model: IntentModel
    policy_model: PolicyModel
    manifest: dict

    @property
    def model_version(self) -> str:
        return self.manifest["model_version"]


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _crf_payload(model: CrfModel) -> dict:
    transitions = [
        [None if value == NEG_INF else value for value in row]
        for row in model.transitions.tolist()
    ]
    return {
        "labels": list(model.labels),
        "feature_ids": model.feature_ids,
        "state_weights": model.state_weights.tolist(),
        "transitions": transitions,
        "l2": model.l2,
    }


def _crf_from_payload(raw: dict) -> CrfModel:
    transitions = np.array(
        [[NEG_INF if v is None else v for v in row] for row in raw["transitions"]]
    )
    return CrfModel(
        feature_ids={k: int(v) for k, v in raw["feature_ids"].items()},
        state_weights=np.array(raw["state_weights"]),
        transitions=transitions,
        l2=float(raw["l2"]),
        labels=tuple(raw["labels"]),
    )


def save_bundle(
    directory: str | Path,
    crf_model: CrfModel,
    intent_model: IntentModel,
    policy_model: PolicyModel,
    seed: int,
    data_hashes: dict[str, str],
    templates_hash: str,
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / CRF_FILE).write_text(json.dumps(_crf_payload(crf_model)))
    (directory / INTENT_FILE).write_text(
        json.dumps(
            {
                "intents": list(intent_model.intents),
                "vocabulary": intent_model.vocabulary.ngram_ids,
                "weights": intent_model.weights.tolist(),
                "bias": intent_model.bias.tolist(),
            }
        )
    )
    (directory / POLICY_FILE).write_text(
        json.dumps(
            {
                "layout_version": policy_model.layout_version,
                "seed": policy_model.seed,
                "w1": policy_model.w1.tolist(),
                "b1": policy_model.b1.tolist(),
                "w2": policy_model.w2.tolist(),
                "b2": policy_model.b2.tolist(),
            }
        )
    )
    version_basis = json.dumps(
        {"seed": seed, "data": data_hashes, "templates": templates_hash},
        sort_keys=True,
    )
    manifest = {
        "format_version": FORMAT_VERSION,
        "seed": seed,
        "data_hashes": data_hashes,
        "templates_hash": templates_hash,
        "model_version": hashlib.sha256(version_basis.encode()).hexdigest()[:12],
    }
    (directory / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2))
    return directory


def load_bundle(directory: str | Path) -> Bundle:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_FILE
    if not manifest_path.exists():
        raise BundleError(f"no model bundle at {directory} (missing {MANIFEST_FILE})")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("format_version") != FORMAT_VERSION:
        raise BundleError(
            f"bundle format version {manifest.get('format_version')} "
            f"!= supported {FORMAT_VERSION}"
        )
    crf_model = _crf_from_payload(json.loads((directory / CRF_FILE).read_text()))
    raw_intent = json.loads((directory / INTENT_FILE).read_text())
    intent_model = IntentModel(
        vocabulary=Vocabulary({k: int(v) for k, v in raw_intent["vocabulary"].items()}),
        weights=np.array(raw_intent["weights"]),
        bias=np.array(raw_intent["bias"]),
        intents=tuple(raw_intent["intents"]),
    )
    raw_policy = json.loads((directory / POLICY_FILE).read_text())
    policy_model = PolicyModel(
        w1=np.array(raw_policy["w1"]),
        b1=np.array(raw_policy["b1"]),
        w2=np.array(raw_policy["w2"]),
        b2=np.array(raw_policy["b2"]),
        seed=int(raw_policy["seed"]),
        layout_version=int(raw_policy["layout_version"]),
    )
    return Bundle(
        crf_model=crf_model,
        intent_model=intent_model,
        policy_model=policy_model,
        manifest=manifest,
    )
