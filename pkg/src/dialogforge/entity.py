"""Linear-chain CRF entity extractor.

Entity spans in training text become BIO tag sequences over whitespace
tokens; emissions come from sparse string features, transitions from a
dense tag-by-tag matrix. Training maximizes the L2-penalized conditional
log-likelihood with full-batch Adam, decoding is Viterbi, and per-entity
confidence is the mean of the positional marginals along the span.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import Domain, UtteranceExample
from .modelio import load_model, save_model
from .neuralcore import AdamState, Array, adam_update
from .textproc import Token, crf_token_features, tokenize

SECTION = "crf-v1"

OUTSIDE = "O"


class TagSet:
    """Dense BIO tag inventory: O first, then B-t/I-t per entity type."""

    def __init__(self, entity_types: "tuple[str, ...] | list[str]"):
        tags = [OUTSIDE]
        for etype in entity_types:
            tags.append(f"B-{etype}")
            tags.append(f"I-{etype}")
        self.tags: tuple[str, ...] = tuple(tags)
        self._ids = {tag: i for i, tag in enumerate(self.tags)}

    @property
    def size(self) -> int:
        return len(self.tags)

    def id_of(self, tag: str) -> int:
        try:
            return self._ids[tag]
        except KeyError:
            raise KeyError(f"unknown tag {tag!r}") from None

    def tag_of(self, tag_id: int) -> str:
        return self.tags[tag_id]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TagSet) and self.tags == other.tags


@dataclass(frozen=True)
class CrfConfig:
    epochs: int = 100
    learning_rate: float = 0.05
    l2: float = 0.01
    grad_tol: float = 1e-4


@dataclass
class CrfModel:
    tag_set: TagSet
    feature_ids: dict[str, int]
    emissions: Array  # (features, tags)
    transitions: Array  # (tags, tags)
    l2: float = 0.01


@dataclass(frozen=True)
class EntitySpan:
    entity_type: str
    value: str
    surface: str
    start: int
    end: int
    confidence: float


def _feature_key(name: str, value: object) -> str:
    return f"{name}={value}"


def _position_keys(features: "list[tuple[str, object]]") -> list[str]:
    return [_feature_key(name, value) for name, value in features]


def spans_to_bio(tokens: list[Token], spans) -> list[str]:
    """Project character-offset entity spans onto per-token BIO tags.

    Every span must cover whole tokens exactly; overlapping or misaligned
    spans raise with the offending span in the message.
    """
    tags = [OUTSIDE] * len(tokens)
    for span in sorted(spans, key=lambda s: (s.start, s.end)):
        covered = [
            i for i, tok in enumerate(tokens) if tok.start >= span.start and tok.end <= span.end
        ]
        label = f"({span.start},{span.end},{span.entity_type})"
        aligned = (
            covered
            and covered == list(range(covered[0], covered[-1] + 1))
            and tokens[covered[0]].start == span.start
            and tokens[covered[-1]].end == span.end
        )
        if not aligned:
            raise ValueError(f"entity span {label} does not align with token boundaries")
        if any(tags[i] != OUTSIDE for i in covered):
            raise ValueError(f"entity span {label} overlaps another span")
        tags[covered[0]] = f"B-{span.entity_type}"
        for i in covered[1:]:
            tags[i] = f"I-{span.entity_type}"
    return tags


def merge_bio_runs(tags: list[str]) -> list[tuple[int, int, str]]:
    """Merge BIO tags into (start_token, end_token_exclusive, type) runs.

    An I tag without a matching preceding tag opens a new run rather than
    being dropped.
    """
    runs: list[tuple[int, int, str]] = []
    open_type: str | None = None
    open_start = 0
    for i, tag in enumerate(tags + [OUTSIDE]):
        if tag.startswith("I-") and tag[2:] == open_type:
            continue
        if open_type is not None:
            runs.append((open_start, i, open_type))
            open_type = None
        if tag != OUTSIDE:
            open_type = tag[2:]
            open_start = i
    return runs


# ---------------------------------------------------------------------------
# inference arithmetic (log space throughout)


def _logsumexp(a: Array, axis: int) -> Array:
    m = np.max(a, axis=axis, keepdims=True)
    return np.squeeze(m + np.log(np.exp(a - m).sum(axis=axis, keepdims=True)), axis=axis)


def _emission_matrix(model: CrfModel, token_features) -> Array:
    """Stack per-position emission score vectors; unknown features skipped."""
    if not token_features:
        raise ValueError("need at least one token position")
    rows = []
    for features in token_features:
        ids = [
            model.feature_ids[key]
            for key in _position_keys(features)
            if key in model.feature_ids
        ]
        rows.append(model.emissions[ids].sum(axis=0) if ids else np.zeros(model.tag_set.size))
    return np.stack(rows)


def _forward(emit: Array, trans: Array) -> tuple[Array, float]:
    n, _ = emit.shape
    alpha = np.empty_like(emit)
    alpha[0] = emit[0]
    for t in range(1, n):
        alpha[t] = emit[t] + _logsumexp(alpha[t - 1][:, None] + trans, axis=0)
    return alpha, float(_logsumexp(alpha[-1][None, :], axis=1)[0])


def _backward(emit: Array, trans: Array) -> Array:
    n, _ = emit.shape
    beta = np.zeros_like(emit)
    for t in range(n - 2, -1, -1):
        beta[t] = _logsumexp(trans + (emit[t + 1] + beta[t + 1])[None, :], axis=1)
    return beta


def marginals(model: CrfModel, token_features) -> Array:
    """Per-position tag marginals P(y_t = k | x), rows summing to 1."""
    emit = _emission_matrix(model, token_features)
    alpha, log_z = _forward(emit, model.transitions)
    beta = _backward(emit, model.transitions)
    return np.exp(alpha + beta - log_z)


def _sequence_grads(
    emit: Array,
    trans: Array,
    tag_ids: Array,
    position_ids: "list[Array]",
    grad_w: Array,
    grad_t: Array,
) -> float:
    """Accumulate d log p / d (W, T) for one sequence; returns log p."""
    n = emit.shape[0]
    alpha, log_z = _forward(emit, trans)
    beta = _backward(emit, trans)

    gamma = np.exp(alpha + beta - log_z)
    score = float(emit[np.arange(n), tag_ids].sum())
    for t in range(n):
        delta = -gamma[t]
        delta[tag_ids[t]] += 1.0
        if position_ids[t].size:
            np.add.at(grad_w, position_ids[t], delta)
    for t in range(1, n):
        score += float(trans[tag_ids[t - 1], tag_ids[t]])
        xi = np.exp(alpha[t - 1][:, None] + trans + (emit[t] + beta[t])[None, :] - log_z)
        grad_t -= xi
        grad_t[tag_ids[t - 1], tag_ids[t]] += 1.0
    return score - log_z


def crf_log_likelihood(model: CrfModel, token_features, tags: list[str]):
    """Penalized log p(tags | x) and its gradient for one sequence.

    Returns (value, {"emissions": dW, "transitions": dT}) where value is
    log p minus l2 * (||W||^2 + ||T||^2).
    """
    emit = _emission_matrix(model, token_features)
    if emit.shape[0] != len(tags):
        raise ValueError("tag sequence length does not match token positions")
    tag_ids = np.array([model.tag_set.id_of(t) for t in tags])
    position_ids = [
        np.array(
            [model.feature_ids[k] for k in _position_keys(f) if k in model.feature_ids],
            dtype=np.intp,
        )
        for f in token_features
    ]
    grad_w = np.zeros_like(model.emissions)
    grad_t = np.zeros_like(model.transitions)
    loglik = _sequence_grads(emit, model.transitions, tag_ids, position_ids, grad_w, grad_t)
    penalty = model.l2 * (
        float((model.emissions**2).sum()) + float((model.transitions**2).sum())
    )
    grad_w -= 2.0 * model.l2 * model.emissions
    grad_t -= 2.0 * model.l2 * model.transitions
    return loglik - penalty, {"emissions": grad_w, "transitions": grad_t}


def viterbi_decode(model: CrfModel, token_features) -> tuple[list[str], float]:
    """Highest-scoring tag path; among ties, the lexicographically
    smallest by tag id.

    The max scores are computed backwards so the path can be rebuilt
    front to first-argmax, which realizes the tie-break exactly.
    """
    emit = _emission_matrix(model, token_features)
    trans = model.transitions
    n, _ = emit.shape
    best = np.empty_like(emit)
    best[n - 1] = emit[n - 1]
    for t in range(n - 2, -1, -1):
        best[t] = emit[t] + np.max(trans + best[t + 1][None, :], axis=1)
    path = [int(np.argmax(best[0]))]
    for t in range(1, n):
        path.append(int(np.argmax(trans[path[-1]] + best[t])))
    return [model.tag_set.tag_of(i) for i in path], float(best[0][path[0]])


# ---------------------------------------------------------------------------
# training


def train_crf(
    examples: list[UtteranceExample],
    domain: Domain,
    config: CrfConfig | None = None,
) -> CrfModel:
    """Fit emissions and transitions on the whole corpus at once.

    The objective is the summed log-likelihood minus one L2 penalty for
    the dataset (rescaled by corpus size, which Adam's per-parameter
    normalization makes equivalent); optimization stops early once the
    gradient's max-norm drops under config.grad_tol. Zero initialization
    plus a fixed example order make the result deterministic.
    """
    config = config or CrfConfig()
    tag_set = TagSet(tuple(domain.entity_types))
    if not any(ex.entities for ex in examples):
        warnings.warn("no entity annotations in corpus; model will tag everything O")

    sequences = []
    all_keys: set[str] = set()
    for ex in examples:
        tokens = tokenize(ex.text)
        if not tokens:
            continue
        features = [crf_token_features(tokens, i) for i in range(len(tokens))]
        keys = [_position_keys(f) for f in features]
        tags = spans_to_bio(tokens, ex.entities)
        for position in keys:
            all_keys.update(position)
        sequences.append((keys, np.array([tag_set.id_of(t) for t in tags])))

    feature_ids = {key: i for i, key in enumerate(sorted(all_keys))}
    params = {
        "emissions": np.zeros((len(feature_ids), tag_set.size)),
        "transitions": np.zeros((tag_set.size, tag_set.size)),
    }
    indexed = [
        ([np.array([feature_ids[k] for k in pos], dtype=np.intp) for pos in keys], tags)
        for keys, tags in sequences
    ]
    state = AdamState(lr=config.learning_rate)

    for _ in range(config.epochs):
        grad_w = np.zeros_like(params["emissions"])
        grad_t = np.zeros_like(params["transitions"])
        for position_ids, tag_ids in indexed:
            emit = np.stack([params["emissions"][ids].sum(axis=0) for ids in position_ids])
            _sequence_grads(emit, params["transitions"], tag_ids, position_ids, grad_w, grad_t)
        penalty = 2.0 * config.l2 / len(indexed)
        grad_w = grad_w / len(indexed) - penalty * params["emissions"]
        grad_t = grad_t / len(indexed) - penalty * params["transitions"]
        if max(np.abs(grad_w).max(), np.abs(grad_t).max()) < config.grad_tol:
            break
        params = adam_update(
            params, {"emissions": -grad_w, "transitions": -grad_t}, state
        )

    return CrfModel(
        tag_set=tag_set,
        feature_ids=feature_ids,
        emissions=params["emissions"],
        transitions=params["transitions"],
        l2=config.l2,
    )


def extract_entities(model: CrfModel, text: str, synonyms: dict[str, str]) -> list[EntitySpan]:
    """Decode, merge tag runs into spans, attach marginal confidence and
    the synonym-canonicalized value."""
    tokens = tokenize(text)
    if not tokens:
        return []
    features = [crf_token_features(tokens, i) for i in range(len(tokens))]
    path, _ = viterbi_decode(model, features)
    gamma = marginals(model, features)
    spans: list[EntitySpan] = []
    for first, last, etype in merge_bio_runs(path):
        start = tokens[first].start
        end = tokens[last - 1].end
        surface = text[start:end]
        chosen = [gamma[t][model.tag_set.id_of(path[t])] for t in range(first, last)]
        spans.append(
            EntitySpan(
                entity_type=etype,
                value=synonyms.get(surface.lower(), surface),
                surface=surface,
                start=start,
                end=end,
                confidence=float(np.mean(chosen)),
            )
        )
    return spans


# ---------------------------------------------------------------------------
# persistence


def save_crf_model(model: CrfModel, path) -> None:
    ordered = sorted(model.feature_ids, key=model.feature_ids.__getitem__)
    meta = {
        "tags": list(model.tag_set.tags),
        "features": ordered,
        "l2": model.l2,
    }
    save_model(
        path,
        SECTION,
        meta,
        {"emissions": model.emissions, "transitions": model.transitions},
    )


def load_crf_model(path) -> CrfModel:
    _, meta, arrays = load_model(path, expect_section=SECTION)
    tags = meta["tags"]
    entity_types = tuple(tag[2:] for tag in tags if tag.startswith("B-"))
    tag_set = TagSet(entity_types)
    if list(tag_set.tags) != tags:
        raise ValueError("stored tag list is not a BIO layout")
    return CrfModel(
        tag_set=tag_set,
        feature_ids={key: i for i, key in enumerate(meta["features"])},
        emissions=arrays["emissions"],
        transitions=arrays["transitions"],
        l2=float(meta["l2"]),
    )
