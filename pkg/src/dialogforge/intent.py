"""Supervised-embeddings intent classifier.

User messages (as bag-of-words count vectors) and intent labels are
embedded into one space by two towers; training maximizes the cosine
similarity of matching pairs and pushes the hardest mismatching label
below a margin. Prediction ranks every intent by similarity.

The message tower is deliberately bias-free: it is then positively
homogeneous, so scaling a count vector by any c > 0 leaves all cosines,
and therefore the predicted intent, unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Domain, UtteranceExample
from .modelio import load_model, save_model
from .neuralcore import (
    AdamState,
    Array,
    Rng,
    adam_update,
    dropout_forward,
    glorot_uniform,
    make_rng,
)
from .textproc import Vocabulary, build_vocab, featurize_bow, tokenize

SECTION = "intent-v1"
LOW_CONFIDENCE_THRESHOLD = 0.3


@dataclass(frozen=True)
class IntentConfig:
    epochs: int = 300
    hidden1: int = 256
    hidden2: int = 128
    embed_dim: int = 20
    batch_start: int = 64
    batch_end: int = 256
    learning_rate: float = 0.001
    mu_pos: float = 0.8
    mu_neg: float = -0.4
    max_negatives: int = 20
    dropout: float = 0.2


@dataclass
class IntentModel:
    vocab: Vocabulary
    intents: tuple[str, ...]
    params: dict[str, Array]  # w1, w2, w3, label_embed
    config: IntentConfig = field(default_factory=IntentConfig)

    @property
    def embed_dim(self) -> int:
        return self.params["w3"].shape[0]


@dataclass(frozen=True)
class IntentPrediction:
    intent: str
    confidence: float
    ranking: tuple[tuple[str, float], ...]
    low_confidence: bool


def similarity(a: Array, b: Array) -> float:
    """Cosine similarity; zero vectors compare as 0 by convention."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < 1e-12 or nb < 1e-12:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def ranking_loss(
    sim_pos: float,
    sims_neg: "list[float] | Array",
    mu_pos: float = 0.8,
    mu_neg: float = -0.4,
) -> float:
    """Hinge pair: pull the true label above mu_pos, push the hardest
    wrong label below -mu_neg."""
    loss = max(0.0, mu_pos - sim_pos)
    sims_neg = np.asarray(sims_neg, dtype=np.float64)
    if sims_neg.size:
        loss += max(0.0, mu_neg + float(sims_neg.max()))
    return loss


def _dense_bow(text: str, vocab: Vocabulary) -> Array:
    vec = np.zeros(vocab.size)
    for tid, count in featurize_bow(tokenize(text), vocab).items():
        vec[tid] = count
    return vec


def _embed_messages(
    params: dict[str, Array],
    X: Array,
    dropout: float = 0.0,
    rng: Rng | None = None,
) -> tuple[Array, dict]:
    """Forward through the message tower; cache feeds the backward pass."""
    training = dropout > 0.0 and rng is not None
    z1 = X @ params["w1"].T
    h1 = np.maximum(z1, 0.0)
    d1, mask1 = dropout_forward(h1, dropout, rng, training)
    z2 = d1 @ params["w2"].T
    h2 = np.maximum(z2, 0.0)
    d2, mask2 = dropout_forward(h2, dropout, rng, training)
    a = d2 @ params["w3"].T
    cache = {"X": X, "h1": h1, "d1": d1, "mask1": mask1, "h2": h2, "d2": d2, "mask2": mask2}
    return a, cache


def _backprop_messages(params: dict[str, Array], cache: dict, da: Array) -> dict[str, Array]:
    dd2 = da @ params["w3"]
    dw3 = da.T @ cache["d2"]
    dh2 = dd2 if cache["mask2"] is None else dd2 * cache["mask2"]
    dz2 = dh2 * (cache["h2"] > 0.0)
    dd1 = dz2 @ params["w2"]
    dw2 = dz2.T @ cache["d1"]
    dh1 = dd1 if cache["mask1"] is None else dd1 * cache["mask1"]
    dz1 = dh1 * (cache["h1"] > 0.0)
    dw1 = dz1.T @ cache["X"]
    return {"w1": dw1, "w2": dw2, "w3": dw3}


def _cosine_rows(A: Array, B: Array) -> tuple[Array, Array, Array]:
    """Row-wise cosine of paired rows plus the norms (zero-safe)."""
    na = np.linalg.norm(A, axis=-1)
    nb = np.linalg.norm(B, axis=-1)
    denom = np.maximum(na * nb, 1e-12)
    sims = np.where((na < 1e-12) | (nb < 1e-12), 0.0, (A * B).sum(axis=-1) / denom)
    return sims, na, nb


def _cosine_grads(A: Array, B: Array, sims: Array, na: Array, nb: Array) -> tuple[Array, Array]:
    live = ((na >= 1e-12) & (nb >= 1e-12)).astype(np.float64)[:, None]
    na_ = np.maximum(na, 1e-12)[:, None]
    nb_ = np.maximum(nb, 1e-12)[:, None]
    dA = live * (B / (na_ * nb_) - sims[:, None] * A / na_**2)
    dB = live * (A / (na_ * nb_) - sims[:, None] * B / nb_**2)
    return dA, dB


def loss_and_grads(
    params: dict[str, Array],
    X: Array,
    labels: Array,
    negatives: Array,
    config: IntentConfig,
    rng: Rng | None = None,
) -> tuple[float, dict[str, Array]]:
    """Mean ranking loss over a batch and gradients for every parameter.

    ``negatives`` is a (batch, n_neg) matrix of wrong-label ids. Dropout is
    active only when an rng is supplied.
    """
    E = params["label_embed"]
    a, cache = _embed_messages(params, X, config.dropout, rng)
    B = X.shape[0]

    pos_vecs = E[labels]
    sim_pos, na_p, nb_p = _cosine_rows(a, pos_vecs)

    neg_vecs = E[negatives]  # (B, n_neg, d)
    a_exp = np.broadcast_to(a[:, None, :], neg_vecs.shape)
    flat_sims, na_n, nb_n = _cosine_rows(
        a_exp.reshape(-1, a.shape[1]), neg_vecs.reshape(-1, a.shape[1])
    )
    sim_neg = flat_sims.reshape(B, -1)
    hardest = sim_neg.argmax(axis=1)
    sim_hardest = sim_neg[np.arange(B), hardest]

    losses = np.maximum(0.0, config.mu_pos - sim_pos) + np.maximum(
        0.0, config.mu_neg + sim_hardest
    )
    loss = float(losses.mean())

    # d loss / d sim
    dpos = np.where(sim_pos < config.mu_pos, -1.0, 0.0) / B
    dneg = np.where(config.mu_neg + sim_hardest > 0.0, 1.0, 0.0) / B

    da = np.zeros_like(a)
    dE = np.zeros_like(E)
    gA_pos, gB_pos = _cosine_grads(a, pos_vecs, sim_pos, na_p, nb_p)
    da += dpos[:, None] * gA_pos
    np.add.at(dE, labels, dpos[:, None] * gB_pos)

    hard_ids = negatives[np.arange(B), hardest]
    hard_vecs = E[hard_ids]
    sim_h, na_h, nb_h = _cosine_rows(a, hard_vecs)
    gA_neg, gB_neg = _cosine_grads(a, hard_vecs, sim_h, na_h, nb_h)
    da += dneg[:, None] * gA_neg
    np.add.at(dE, hard_ids, dneg[:, None] * gB_neg)

    grads = _backprop_messages(params, cache, da)
    grads["label_embed"] = dE
    return loss, grads


def _batch_size_for_epoch(config: IntentConfig, epoch: int, corpus_size: int) -> int:
    if config.epochs <= 1:
        size = config.batch_start
    else:
        frac = epoch / (config.epochs - 1)
        size = round(config.batch_start + (config.batch_end - config.batch_start) * frac)
    return max(1, min(size, corpus_size))


def init_params(vocab_size: int, n_intents: int, config: IntentConfig, rng: Rng) -> dict[str, Array]:
    return {
        "w1": glorot_uniform(rng, (config.hidden1, vocab_size)),
        "w2": glorot_uniform(rng, (config.hidden2, config.hidden1)),
        "w3": glorot_uniform(rng, (config.embed_dim, config.hidden2)),
        "label_embed": glorot_uniform(rng, (n_intents, config.embed_dim)),
    }


def train_intent(
    examples: list[UtteranceExample],
    domain: Domain,
    config: IntentConfig | None = None,
    seed: int = 0,
) -> IntentModel:
    """Train the two-tower model; deterministic for a given seed."""
    config = config or IntentConfig()
    intents = tuple(domain.intents)
    if len(intents) < 2:
        raise ValueError("intent training needs at least two intents")
    intent_ids = {name: i for i, name in enumerate(intents)}

    vocab = build_vocab(ex.text for ex in examples)
    X_all = np.stack([_dense_bow(ex.text, vocab) for ex in examples])
    y_all = np.array([intent_ids[ex.intent] for ex in examples])

    rng = make_rng(seed)
    params = init_params(vocab.size, len(intents), config, rng)
    state = AdamState(lr=config.learning_rate)
    n = len(examples)
    n_neg = min(len(intents) - 1, config.max_negatives)
    all_labels = np.arange(len(intents))

    for epoch in range(config.epochs):
        size = _batch_size_for_epoch(config, epoch, n)
        order = rng.permutation(n)
        for start in range(0, n, size):
            batch = order[start : start + size]
            X, y = X_all[batch], y_all[batch]
            if n_neg == len(intents) - 1:
                negatives = np.stack([all_labels[all_labels != yi] for yi in y])
            else:
                negatives = np.stack(
                    [rng.choice(all_labels[all_labels != yi], size=n_neg, replace=False) for yi in y]
                )
            _, grads = loss_and_grads(params, X, y, negatives, config, rng)
            params = adam_update(params, grads, state)

    return IntentModel(vocab=vocab, intents=intents, params=params, config=config)


def embed_message_vector(model: IntentModel, bow: Array) -> Array:
    """Embed an already-featurized count vector (inference path)."""
    a, _ = _embed_messages(model.params, np.asarray(bow, dtype=np.float64)[None, :])
    return a[0]


def predict_intent(model: IntentModel, text: str) -> IntentPrediction:
    a = embed_message_vector(model, _dense_bow(text, model.vocab))
    sims = np.array([similarity(a, model.params["label_embed"][k]) for k in range(len(model.intents))])
    raw = (sims + 1.0) / 2.0
    total = raw.sum()
    conf = raw / total if total > 0 else np.full_like(raw, 1.0 / len(raw))
    order = sorted(range(len(model.intents)), key=lambda k: (-conf[k], k))
    ranking = tuple((model.intents[k], float(conf[k])) for k in order)
    top_name, top_conf = ranking[0]
    return IntentPrediction(
        intent=top_name,
        confidence=top_conf,
        ranking=ranking,
        low_confidence=top_conf < LOW_CONFIDENCE_THRESHOLD,
    )


# ---------------------------------------------------------------------------
# persistence


def save_intent_model(model: IntentModel, path) -> None:
    meta = {
        "intents": list(model.intents),
        "vocab": model.vocab.tokens(),
        "config": {k: getattr(model.config, k) for k in IntentConfig.__dataclass_fields__},
    }
    save_model(path, SECTION, meta, model.params)


def load_intent_model(path) -> IntentModel:
    _, meta, arrays = load_model(path, expect_section=SECTION)
    return IntentModel(
        vocab=Vocabulary(meta["vocab"]),
        intents=tuple(meta["intents"]),
        params=arrays,
        config=IntentConfig(**meta["config"]),
    )
