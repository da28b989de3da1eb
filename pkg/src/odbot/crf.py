"""Linear-chain CRF tagger over BIO labels for topic keywords and locations.

The model scores a label sequence as the sum of per-position state weights
(one weight per active feature and label) plus label-to-label transition
weights, globally normalized. Transitions into I-x from anything other than
B-x/I-x are pinned to -inf, so decoded sequences are BIO-valid by
construction. Training maximizes the L2-regularized conditional
log-likelihood by full-batch gradient ascent with forward-backward
gradients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .text import Token, crf_features

LABELS = ("O", "B-topic", "I-topic", "B-location", "I-location")
LABEL_INDEX = {name: i for i, name in enumerate(LABELS)}
NUM_LABELS = len(LABELS)

NEG_INF = float("-inf")


class CrfError(ValueError):
    """Invalid training corpus or decoding input."""


def transition_mask() -> np.ndarray:
    """Boolean (prev, cur) matrix of allowed transitions.

    I-x is reachable only from B-x or I-x; every other move is allowed.
    """
    allowed = np.ones((NUM_LABELS, NUM_LABELS), dtype=bool)
    for kind in ("topic", "location"):
        inside = LABEL_INDEX[f"I-{kind}"]
        legal_prev = {LABEL_INDEX[f"B-{kind}"], inside}
        for prev in range(NUM_LABELS):
            if prev not in legal_prev:
                allowed[prev, inside] = False
    return allowed

_ALLOWED = transition_mask()


@dataclass
class CrfModel:
    """Trained tagger parameters.

    ``feature_ids`` maps feature names to rows of ``state_weights``
    (one column per label). ``transitions`` is the dense (prev, cur) weight
    matrix with blocked entries at -inf.
    """

    feature_ids: dict[str, int]
    state_weights: np.ndarray
    transitions: np.ndarray
    l2: float = 1.0
    labels: tuple[str, ...] = LABELS

    def emissions(self, tokens: Sequence[Token]) -> np.ndarray:
        """Per-position label scores; unknown features contribute nothing."""
        emit = np.zeros((len(tokens), NUM_LABELS))
        for t in range(len(tokens)):
            for name in crf_features(tokens, t):
                row = self.feature_ids.get(name)
                if row is not None:
                    emit[t] += self.state_weights[row]
        return emit


def sequence_score(model: CrfModel, tokens: Sequence[Token], labels: Sequence[str]) -> float:
    """Unnormalized score of one (tokens, labels) path; -inf if BIO-invalid."""
    if len(tokens) != len(labels):
        raise CrfError("token and label sequences differ in length")
    if not tokens:
        raise CrfError("empty sequence")
    emit = model.emissions(tokens)
    idx = [LABEL_INDEX[y] for y in labels]
    total = emit[0, idx[0]]
    for t in range(1, len(idx)):
        total += model.transitions[idx[t - 1], idx[t]] + emit[t, idx[t]]
    return float(total)


def log_partition(model: CrfModel, tokens: Sequence[Token]) -> float:
    """log of the sum of exp(score) over all label sequences."""
    if not tokens:
        raise CrfError("empty sequence")
    emit = model.emissions(tokens)
    alpha = emit[0].copy()
    for t in range(1, len(tokens)):
        alpha = emit[t] + np.logaddexp.reduce(alpha[:, None] + model.transitions, axis=0)
    return float(np.logaddexp.reduce(alpha))


def viterbi_decode(model: CrfModel, tokens: Sequence[Token]) -> list[str]:
    """Highest-scoring BIO-valid label sequence.

    Score ties resolve to the earliest label in declaration order at every
    backtracking step (np.argmax picks the first maximum).
    """
    labels, _ = viterbi_with_score(model, tokens)
    return labels


def viterbi_with_score(
    model: CrfModel, tokens: Sequence[Token]
) -> tuple[list[str], float]:
    if not tokens:
        raise CrfError("empty sequence")
    emit = model.emissions(tokens)
    n = len(tokens)
    best = emit[0].copy()
    back = np.zeros((n, NUM_LABELS), dtype=int)
    for t in range(1, n):
        cand = best[:, None] + model.transitions
        back[t] = np.argmax(cand, axis=0)
        best = emit[t] + np.max(cand, axis=0)
    last = int(np.argmax(best))
    path = [last]
    for t in range(n - 1, 0, -1):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return [LABELS[i] for i in path], float(np.max(best))


# --- training ---------------------------------------------------------------


@dataclass
class _Encoded:
    """One training example with features resolved to ids."""

    feats: list[np.ndarray]  # per position: int array of feature rows
    labels: np.ndarray  # int array of gold label indices


def _encode_corpus(
    corpus: Sequence[tuple[Sequence[Token], Sequence[str]]],
) -> tuple[dict[str, int], list[_Encoded]]:
    feature_ids: dict[str, int] = {}
    encoded: list[_Encoded] = []
    for i, (tokens, labels) in enumerate(corpus):
        if len(tokens) != len(labels):
            raise CrfError(
                f"example {i}: {len(tokens)} tokens but {len(labels)} labels"
            )
        if not tokens:
            raise CrfError(f"example {i}: empty sequence")
        idx = []
        for y in labels:
            if y not in LABEL_INDEX:
                raise CrfError(f"example {i}: unknown label {y!r}")
            idx.append(LABEL_INDEX[y])
        for prev, cur in zip(idx, idx[1:]):
            if not _ALLOWED[prev, cur]:
                raise CrfError(
                    f"example {i}: invalid BIO transition "
                    f"{LABELS[prev]} -> {LABELS[cur]}"
                )
        feats = []
        for t in range(len(tokens)):
            rows = []
            for name in crf_features(tokens, t):
                if name not in feature_ids:
                    feature_ids[name] = len(feature_ids)
                rows.append(feature_ids[name])
            feats.append(np.array(sorted(rows), dtype=int))
        encoded.append(_Encoded(feats=feats, labels=np.array(idx, dtype=int)))
    return feature_ids, encoded


def _example_emissions(weights: np.ndarray, ex: _Encoded) -> np.ndarray:
    emit = np.zeros((len(ex.feats), NUM_LABELS))
    for t, rows in enumerate(ex.feats):
        emit[t] = weights[rows].sum(axis=0)
    return emit


def objective_and_gradient(
    weights: np.ndarray,
    transitions: np.ndarray,
    encoded: Sequence[_Encoded],
    l2: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Regularized conditional log-likelihood and its gradient.

    Returns (objective, grad wrt state weights, grad wrt transitions); the
    transition gradient is zero at blocked entries, which stay at -inf.
    """
    grad_w = np.zeros_like(weights)
    grad_t = np.zeros_like(transitions)
    total = 0.0
    for ex in encoded:
        emit = _example_emissions(weights, ex)
        n = len(ex.feats)
        # forward / backward in log space
        alpha = np.empty((n, NUM_LABELS))
        alpha[0] = emit[0]
        for t in range(1, n):
            alpha[t] = emit[t] + np.logaddexp.reduce(
                alpha[t - 1][:, None] + transitions, axis=0
            )
        log_z = float(np.logaddexp.reduce(alpha[-1]))
        beta = np.zeros((n, NUM_LABELS))
        for t in range(n - 2, -1, -1):
            beta[t] = np.logaddexp.reduce(
                transitions + (emit[t + 1] + beta[t + 1])[None, :], axis=1
            )
        # gold path score
        idx = ex.labels
        score = emit[0, idx[0]]
        for t in range(1, n):
            score += transitions[idx[t - 1], idx[t]] + emit[t, idx[t]]
        total += float(score) - log_z
        # observed minus expected feature counts
        node = np.exp(alpha + beta - log_z)  # (n, labels)
        for t, rows in enumerate(ex.feats):
            grad_w[rows] -= node[t]
            grad_w[rows, idx[t]] += 1.0
        for t in range(1, n):
            pair = np.exp(
                alpha[t - 1][:, None]
                + transitions
                + (emit[t] + beta[t])[None, :]
                - log_z
            )
            pair[~_ALLOWED] = 0.0
            grad_t -= pair
            grad_t[idx[t - 1], idx[t]] += 1.0
    finite_t = np.where(_ALLOWED, transitions, 0.0)
    total -= 0.5 * l2 * (float(np.sum(weights**2)) + float(np.sum(finite_t**2)))
    grad_w -= l2 * weights
    grad_t -= l2 * finite_t
    grad_t[~_ALLOWED] = 0.0
    return total, grad_w, grad_t


def train_crf(
    corpus: Sequence[tuple[Sequence[Token], Sequence[str]]],
    regularization: float = 1.0,
    iterations: int = 200,
    step: float = 0.1,
    trace: list[float] | None = None,
) -> CrfModel:
    """Fit the tagger by full-batch gradient ascent.

    Each iteration starts from the base step size and halves it until the
    objective does not decrease, so the regularized log-likelihood is
    non-decreasing across iterations. Pass ``trace`` to collect the
    per-iteration objective values.
    """
    if not corpus:
        raise CrfError("empty training corpus")
    feature_ids, encoded = _encode_corpus(corpus)
    weights = np.zeros((len(feature_ids), NUM_LABELS))
    transitions = np.where(_ALLOWED, 0.0, NEG_INF)
    obj, grad_w, grad_t = objective_and_gradient(
        weights, transitions, encoded, regularization
    )
    if trace is not None:
        trace.append(obj)
    for _ in range(iterations):
        eta = step
        while True:
            new_w = weights + eta * grad_w
            new_t = np.where(_ALLOWED, transitions + eta * grad_t, NEG_INF)
            new_obj, new_gw, new_gt = objective_and_gradient(
                new_w, new_t, encoded, regularization
            )
            if new_obj >= obj or eta < 1e-12:
                break
            eta /= 2.0
        if new_obj < obj:
            break  # converged: even a tiny step cannot improve
        weights, transitions = new_w, new_t
        obj, grad_w, grad_t = new_obj, new_gw, new_gt
        if trace is not None:
            trace.append(obj)
    return CrfModel(
        feature_ids=feature_ids,
        state_weights=weights,
        transitions=transitions,
        l2=regularization,
    )
