"""Next-action policy: a small feedforward network trained on stories.

One hidden tanh layer, softmax output over the twelve actions, full-batch
gradient descent on cross-entropy. The story set is tiny and conflict-free
by construction, so training must reach exact fit on every unrolled pair;
anything less raises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dialogue import ACTIONS, STATE_SIZE
from .stories import Story, TrainingPair, unroll_stories

HIDDEN_UNITS = 16
# 500 epochs leaves one story state misfit at this width; 1000 reaches exact
# fit for every seed tried.
EPOCHS = 1000
LEARNING_RATE = 0.1


class PolicyTrainingError(RuntimeError):
    """Training finished without reproducing every story step."""


@dataclass
class PolicyModel:
    w1: np.ndarray  # (state size, hidden)
    b1: np.ndarray
    w2: np.ndarray  # (hidden, num actions)
    b2: np.ndarray
    seed: int
    layout_version: int = 1

    def predict_probs(self, state: np.ndarray) -> np.ndarray:
        """Distribution over actions for one state vector."""
        hidden = np.tanh(state @ self.w1 + self.b1)
        scores = hidden @ self.w2 + self.b2
        scores = scores - scores.max()
        probs = np.exp(scores)
        return probs / probs.sum()

    def predict_action(self, state: np.ndarray) -> str:
        return ACTIONS[int(np.argmax(self.predict_probs(state)))]


def _forward(x: np.ndarray, w1, b1, w2, b2):
    hidden = np.tanh(x @ w1 + b1)
    scores = hidden @ w2 + b2
    scores = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(scores)
    probs = exp / exp.sum(axis=1, keepdims=True)
    return hidden, probs


def train_policy(
    stories: list[Story],
    seed: int = 0,
    epochs: int = EPOCHS,
    learning_rate: float = LEARNING_RATE,
) -> PolicyModel:
    """Fit the policy to the unrolled stories; exact fit or failure."""
    pairs = unroll_stories(stories)
    # Identical (state, action) pairs from different stories collapse to one
    # training row; conflicting ones were already rejected.
    unique: dict[bytes, TrainingPair] = {}
    for pair in pairs:
        unique.setdefault(pair.state.tobytes(), pair)
    rows = list(unique.values())
    x = np.stack([pair.state for pair in rows])
    y = np.array([pair.action for pair in rows], dtype=int)
    n = len(rows)
    rng = np.random.default_rng(seed)
    w1 = rng.normal(0.0, 0.1, size=(STATE_SIZE, HIDDEN_UNITS))
    b1 = np.zeros(HIDDEN_UNITS)
    w2 = rng.normal(0.0, 0.1, size=(HIDDEN_UNITS, len(ACTIONS)))
    b2 = np.zeros(len(ACTIONS))
    onehot = np.zeros((n, len(ACTIONS)))
    onehot[np.arange(n), y] = 1.0
    for _ in range(epochs):
        hidden, probs = _forward(x, w1, b1, w2, b2)
        delta_out = (probs - onehot) / n
        grad_w2 = hidden.T @ delta_out
        grad_b2 = delta_out.sum(axis=0)
        delta_hidden = (delta_out @ w2.T) * (1.0 - hidden**2)
        grad_w1 = x.T @ delta_hidden
        grad_b1 = delta_hidden.sum(axis=0)
        w1 -= learning_rate * grad_w1
        b1 -= learning_rate * grad_b1
        w2 -= learning_rate * grad_w2
        b2 -= learning_rate * grad_b2
    model = PolicyModel(w1=w1, b1=b1, w2=w2, b2=b2, seed=seed)
    _, probs = _forward(x, w1, b1, w2, b2)
    predicted = probs.argmax(axis=1)
    misses = np.nonzero(predicted != y)[0]
    if len(misses):
        details = ", ".join(
            f"{rows[i].story}: wanted {ACTIONS[y[i]]} got {ACTIONS[predicted[i]]}"
            for i in misses[:5]
        )
        raise PolicyTrainingError(
            f"policy failed to fit {len(misses)}/{n} story states ({details})"
        )
    return model


def story_replay_accuracy(model: PolicyModel, stories: list[Story]) -> float:
    """Fraction of unrolled story steps the policy reproduces."""
    pairs = unroll_stories(stories)
    if not pairs:
        return 1.0
    hits = sum(
        1
        for pair in pairs
        if int(np.argmax(model.predict_probs(pair.state))) == pair.action
    )
    return hits / len(pairs)
