"""Tokenization, vocabulary and featurization for the NLU models.

Two featurizers live here: the bag-of-words counter feeding the intent
classifier, and the sliding-window token feature template feeding the CRF
entity extractor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

_TOKEN_RE = re.compile(r"\S+")

# Window slots of the CRF feature template, keyed by offset from the
# current token.
_WINDOW_PREFIXES = {-1: "before", 0: "token", 1: "after"}


@dataclass(frozen=True)
class Token:
    """A whitespace-delimited token with exact character offsets."""

    surface: str
    start: int
    end: int


class Vocabulary:
    """Dense token-string-to-id mapping, deterministic for a given corpus.

    Tokens are lowercased and ids are assigned in lexicographic order, so
    two builds over the same corpus produce identical mappings.
    """

    def __init__(self, tokens: Iterable[str]):
        unique = sorted({t.lower() for t in tokens})
        self._ids = {tok: i for i, tok in enumerate(unique)}

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, token: str) -> bool:
        return token.lower() in self._ids

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self._ids == other._ids

    @property
    def size(self) -> int:
        return len(self._ids)

    def id_of(self, token: str) -> int | None:
        return self._ids.get(token.lower())

    def tokens(self) -> list[str]:
        """All tokens in id order."""
        return sorted(self._ids, key=self._ids.__getitem__)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into maximal runs of non-whitespace.

    Original casing is preserved; offsets index into ``text`` exactly, so
    ``text[tok.start:tok.end] == tok.surface`` always holds.
    """
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def build_vocab(texts: Iterable[str]) -> Vocabulary:
    """Build a vocabulary from an iterable of raw sentences."""
    tokens: list[str] = []
    for text in texts:
        tokens.extend(tok.surface for tok in tokenize(text))
    if not tokens:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    return Vocabulary(tokens)


def featurize_bow(tokens: list[Token], vocab: Vocabulary) -> dict[int, int]:
    """Count in-vocabulary tokens; out-of-vocabulary tokens are dropped."""
    counts: dict[int, int] = {}
    for tok in tokens:
        tid = vocab.id_of(tok.surface)
        if tid is not None:
            counts[tid] = counts.get(tid, 0) + 1
    return counts


def _single_token_features(surface: str) -> list[tuple[str, object]]:
    low = surface.lower()
    return [
        ("lowercase", surface.islower()),
        ("uppercase", surface.isupper()),
        ("title", surface.istitle()),
        ("digit", surface.isdigit()),
        ("prefix5", low[:5]),
        ("prefix2", low[:2]),
        ("suffix5", low[-5:]),
        ("suffix3", low[-3:]),
        ("suffix2", low[-2:]),
        ("suffix1", low[-1:]),
        ("bias", "1"),
    ]


def crf_token_features(tokens: list[Token], index: int) -> list[tuple[str, object]]:
    """Sliding-window feature set for one token position.

    For each of the previous, current and next token that exists, emits the
    eleven template features (four case/digit flags, prefix and suffix
    slices of the lowercased surface, and a constant bias), each name
    prefixed with its window slot. Sequence boundaries contribute BOS/EOS
    markers in place of the missing neighbour's features.
    """
    if not 0 <= index < len(tokens):
        raise IndexError(f"token index {index} out of range for {len(tokens)} tokens")

    features: list[tuple[str, object]] = []
    for offset, prefix in _WINDOW_PREFIXES.items():
        pos = index + offset
        if pos < 0:
            features.append(("before:BOS", True))
        elif pos >= len(tokens):
            features.append(("after:EOS", True))
        else:
            for name, value in _single_token_features(tokens[pos].surface):
                features.append((f"{prefix}:{name}", value))
    return features
