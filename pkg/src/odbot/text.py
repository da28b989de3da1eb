"""Tokenization and feature extraction shared by the entity tagger and the
intent classifier.

Everything here is deterministic: no stemming, no stopword removal, plain
lowercase folding. The vocabulary registry is the only mutable piece and is
only ever grown during (single-threaded) training.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

# A token is either a maximal run of letters/digits, or a single other
# non-space character (underscore included, since \w would swallow it).
_TOKEN_RE = re.compile(r"[^\W_]+|[^\w\s]|_")


@dataclass(frozen=True)
class Token:
    """One token with offsets into the original message string."""

    text: str
    lower: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens.

    Whitespace separates tokens, each maximal run of letters/digits forms one
    token, and every remaining character stands alone. Offsets index the
    original string, so ``text[tok.start:tok.end] == tok.text`` always holds.
    Empty input yields an empty list.
    """
    return [
        Token(text=m.group(), lower=m.group().lower(), start=m.start(), end=m.end())
        for m in _TOKEN_RE.finditer(text)
    ]


def crf_features(tokens: Sequence[Token], position: int) -> frozenset[str]:
    """Binary indicator features for one token position.

    The template set is fixed: current lower form, suffixes of length 2 and 3,
    prefix of length 2, titlecase flag, digit flag, previous/next lower forms
    and begin/end-of-sequence flags. Affixes of short tokens degrade to the
    whole token. Flags are emitted only when true.
    """
    if not 0 <= position < len(tokens):
        raise IndexError(
            f"position {position} out of range for sequence of {len(tokens)} tokens"
        )
    tok = tokens[position]
    feats = {
        f"w0={tok.lower}",
        f"suf2={tok.lower[-2:]}",
        f"suf3={tok.lower[-3:]}",
        f"pre2={tok.lower[:2]}",
    }
    if tok.text.istitle():
        feats.add("title=1")
    if tok.text.isdigit():
        feats.add("digit=1")
    if position == 0:
        feats.add("BOS=1")
    else:
        feats.add(f"w-1={tokens[position - 1].lower}")
    if position == len(tokens) - 1:
        feats.add("EOS=1")
    else:
        feats.add(f"w+1={tokens[position + 1].lower}")
    return frozenset(feats)


class Vocabulary:
    """Registry mapping n-gram strings to stable integer feature ids."""

    def __init__(self, ngram_ids: dict[str, int] | None = None):
        self.ngram_ids: dict[str, int] = dict(ngram_ids or {})

    def __len__(self) -> int:
        return len(self.ngram_ids)

    def __contains__(self, ngram: str) -> bool:
        return ngram in self.ngram_ids

    def intern(self, ngram: str) -> int:
        """Return the id for ``ngram``, assigning a fresh one if unseen."""
        if ngram not in self.ngram_ids:
            self.ngram_ids[ngram] = len(self.ngram_ids)
        return self.ngram_ids[ngram]

    def get(self, ngram: str) -> int | None:
        return self.ngram_ids.get(ngram)


def message_vector(
    text: str, vocabulary: Vocabulary, frozen: bool = True
) -> dict[int, float]:
    """Sparse bag of lowercased unigrams and bigrams with raw counts.

    With ``frozen=True`` (inference) unknown n-grams are dropped; otherwise
    (training) new n-grams are assigned fresh ids in the registry.
    """
    lowers = [tok.lower for tok in tokenize(text)]
    grams = list(lowers)
    grams.extend(f"{a} {b}" for a, b in zip(lowers, lowers[1:]))
    vec: dict[int, float] = {}
    for gram in grams:
        fid = vocabulary.get(gram) if frozen else vocabulary.intern(gram)
        if fid is None:
            continue
        vec[fid] = vec.get(fid, 0.0) + 1.0
    return vec
