"""Intent classification over the fixed nine-intent set.

One-vs-rest linear SVM with hinge loss and L2 regularization, trained by
deterministic dual coordinate descent (the standard solver for this model;
subgradient schedules need orders of magnitude more passes to separate this
corpus). Confidences come from a softmax over the nine decision scores.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from .text import Vocabulary, message_vector

INTENTS = (
    "greeting",
    "goodbye",
    "add_keyword",
    "add_location",
    "search",
    "explore",
    "thank_you",
    "affirm",
    "deny",
)
INTENT_INDEX = {name: i for i, name in enumerate(INTENTS)}

# Synthetic signal handed to the dialogue layer when the classifier is unsure.
LOW_CONFIDENCE = "low_confidence"
DEFAULT_CONFIDENCE_THRESHOLD = 0.3


class IntentError(ValueError):
    """Invalid intent training corpus."""


class PayloadError(ValueError):
    """A '/'-prefixed message that does not parse as a button payload."""


@dataclass
class IntentModel:
    """Per-intent weight vectors and biases over the shared n-gram registry."""

    vocabulary: Vocabulary
    weights: np.ndarray  # (num intents, num features)
    bias: np.ndarray  # (num intents,)
    intents: tuple[str, ...] = INTENTS


@dataclass(frozen=True)
class IntentPrediction:
    intent: str
    confidence: float
    ranking: tuple[tuple[str, float], ...]


def _dense(vec: dict[int, float], width: int) -> np.ndarray:
    x = np.zeros(width)
    for fid, count in vec.items():
        if fid < width:
            x[fid] = count
    return x


def total_hinge_objective(
    x: np.ndarray, y: np.ndarray, w: np.ndarray, lam: float
) -> float:
    """lam/2 ||w||^2 plus the summed hinge loss (bias folded into w)."""
    margins = y * (x @ w)
    return 0.5 * lam * float(w @ w) + float(np.maximum(0.0, 1.0 - margins).sum())


def train_intent_model(
    corpus: list[tuple[str, str]],
    epochs: int = 100,
    regularization: float = 0.1,
    seed: int = 0,
) -> IntentModel:
    """Train one binary hinge-loss scorer per intent on (text, intent) pairs.

    Dual coordinate descent with a fixed sweep order and zero init; fully
    deterministic (the seed is recorded in bundle manifests but does not
    influence the result). The bias is a regularized constant feature. Each
    scorer's total regularized hinge loss can only end at or below its value
    at zero weights: the zero solution is kept if descent somehow fails to
    beat it.
    """
    if not corpus:
        raise IntentError("empty training corpus")
    for text, intent in corpus:
        if intent not in INTENT_INDEX:
            raise IntentError(f"unknown intent label {intent!r}")
    vocabulary = Vocabulary()
    rows = [message_vector(text, vocabulary, frozen=False) for text, _ in corpus]
    n, width = len(corpus), len(vocabulary)
    x = np.zeros((n, width + 1))
    for i, vec in enumerate(rows):
        for fid, count in vec.items():
            x[i, fid] = count
    x[:, -1] = 1.0  # bias feature
    lam = regularization
    big_c = 1.0 / lam  # dual box constraint for sum-hinge primal
    q_ii = (x * x).sum(axis=1)
    weights = np.zeros((len(INTENTS), width))
    bias = np.zeros(len(INTENTS))
    for c, intent in enumerate(INTENTS):
        y = np.array([1.0 if lab == intent else -1.0 for _, lab in corpus])
        w = np.zeros(width + 1)
        alpha = np.zeros(n)
        for _ in range(epochs):
            moved = 0.0
            for i in range(n):
                gradient = y[i] * (w @ x[i]) - 1.0
                projected = min(max(alpha[i] - gradient / q_ii[i], 0.0), big_c)
                delta = projected - alpha[i]
                if delta != 0.0:
                    w += delta * y[i] * x[i]
                    alpha[i] = projected
                    moved += abs(delta)
            if moved < 1e-10:
                break
        if total_hinge_objective(x, y, w, lam) > total_hinge_objective(
            x, y, np.zeros(width + 1), lam
        ):
            w = np.zeros(width + 1)
        weights[c] = w[:-1]
        bias[c] = w[-1]
    return IntentModel(vocabulary=vocabulary, weights=weights, bias=bias)


def decision_scores(model: IntentModel, text: str) -> np.ndarray:
    vec = message_vector(text, model.vocabulary, frozen=True)
    x = _dense(vec, model.weights.shape[1])
    return model.weights @ x + model.bias


def classify_intent(model: IntentModel, text: str) -> IntentPrediction:
    """Softmax the nine decision scores into a normalized ranking.

    Exact ties order by canonical intent declaration order.
    """
    scores = decision_scores(model, text)
    shifted = scores - scores.max()
    probs = np.exp(shifted)
    probs /= probs.sum()
    order = sorted(range(len(INTENTS)), key=lambda i: (-probs[i], i))
    ranking = tuple((INTENTS[i], float(probs[i])) for i in order)
    return IntentPrediction(
        intent=ranking[0][0], confidence=ranking[0][1], ranking=ranking
    )


_PAYLOAD_RE = re.compile(r"^/([a-z_]+)\s*(\{.*\})?$", re.DOTALL)


def parse_payload(text: str) -> tuple[str, dict[str, str]] | None:
    """Parse a button payload like '/explore' or '/add_keyword{"topic":"x"}'.

    Returns None for ordinary messages (no leading slash). Raises
    PayloadError for anything slash-prefixed that does not match the grammar,
    names an unknown intent, or carries a non-object/non-string slot body.
    """
    stripped = text.strip()
    if not stripped.startswith("/"):
        return None
    m = _PAYLOAD_RE.match(stripped)
    if not m:
        raise PayloadError(f"malformed payload: {text!r}")
    name = m.group(1)
    if name not in INTENT_INDEX:
        raise PayloadError(f"unknown intent in payload: {name!r}")
    slots: dict[str, str] = {}
    if m.group(2):
        try:
            parsed = json.loads(m.group(2))
        except json.JSONDecodeError as exc:
            raise PayloadError(f"malformed payload slots: {text!r}") from exc
        if not isinstance(parsed, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in parsed.items()
        ):
            raise PayloadError(f"payload slots must map names to strings: {text!r}")
        slots = parsed
    return name, slots
