import math

import numpy as np
import pytest

from dialogforge.corpus import Domain, UtteranceExample
from dialogforge.intent import (
    IntentConfig,
    _batch_size_for_epoch,
    _dense_bow,
    init_params,
    load_intent_model,
    loss_and_grads,
    predict_intent,
    ranking_loss,
    save_intent_model,
    similarity,
    train_intent,
)
from dialogforge.neuralcore import grad_check, make_rng
from dialogforge.textproc import build_vocab


def toy_domain(intents):
    return Domain(
        intents=tuple(intents),
        entity_types=(),
        slots=(),
        actions=("action_listen",),
        templates={},
        synonyms={},
    )


def separable_corpus():
    """Two intents with disjoint single-word vocabularies."""
    examples = []
    for word in ("alpha", "beton", "citra", "delta", "endah"):
        examples.append(UtteranceExample(text=f"{word} satu", intent="a"))
        examples.append(UtteranceExample(text=f"{word} satu lagi", intent="a"))
        examples.append(UtteranceExample(text=f"kata {word.upper()}x dua", intent="b"))
        examples.append(UtteranceExample(text=f"{word.upper()}x dua", intent="b"))
    return examples


class TestSimilarity:
    def test_identical_vectors(self):
        v = np.array([0.3, -0.7, 2.0])
        assert math.isclose(similarity(v, v), 1.0, abs_tol=1e-12)

    def test_orthogonal(self):
        assert similarity(np.array([1.0, 0.0]), np.array([0.0, 5.0])) == pytest.approx(0.0)

    def test_closed_form(self):
        a = np.array([1.0, 0.0])
        b = np.array([1.0, 1.0]) / math.sqrt(2)
        assert similarity(a, b) == pytest.approx(0.7071, abs=1e-4)

    def test_zero_vector_convention(self):
        assert similarity(np.zeros(3), np.array([1.0, 2.0, 3.0])) == 0.0
        assert similarity(np.zeros(3), np.zeros(3)) == 0.0

    def test_range(self):
        rng = make_rng(0)
        for _ in range(50):
            s = similarity(rng.normal(size=4), rng.normal(size=4))
            assert -1.0 - 1e-12 <= s <= 1.0 + 1e-12


class TestRankingLoss:
    def test_both_hinges_inactive(self):
        assert ranking_loss(1.0, np.array([0.4, -0.2, 0.1])) == 0.0

    def test_boundary_is_zero(self):
        assert ranking_loss(0.8, np.array([0.4])) == pytest.approx(0.0)

    def test_hinge_arithmetic(self):
        assert ranking_loss(0.5, np.array([0.9, 0.1])) == pytest.approx(0.8)

    def test_empty_negatives(self):
        assert ranking_loss(0.5, np.array([])) == pytest.approx(0.3)

    def test_only_hardest_negative_counts(self):
        low = ranking_loss(1.0, np.array([0.5, 0.5]))
        assert low == ranking_loss(1.0, np.array([0.5]))


class TestBatchSchedule:
    def test_endpoints(self):
        config = IntentConfig()
        assert _batch_size_for_epoch(config, 0, 10_000) == 64
        assert _batch_size_for_epoch(config, config.epochs - 1, 10_000) == 256

    def test_monotone_non_decreasing(self):
        config = IntentConfig()
        sizes = [_batch_size_for_epoch(config, e, 10_000) for e in range(config.epochs)]
        assert all(b >= a for a, b in zip(sizes, sizes[1:]))

    def test_clamped_to_corpus(self):
        config = IntentConfig()
        assert _batch_size_for_epoch(config, config.epochs - 1, 165) == 165


class TestLossGradients:
    def test_grad_check_on_three_intent_toy(self):
        intents = ("a", "b", "c")
        texts = ["satu dua", "tiga empat", "lima enam"]
        vocab = build_vocab(texts)
        X = np.stack([_dense_bow(t, vocab) for t in texts])
        labels = np.array([0, 1, 2])
        negatives = np.array([[1, 2], [0, 2], [0, 1]])
        config = IntentConfig(dropout=0.0)
        params = init_params(vocab.size, len(intents), config, make_rng(9))

        def f(p):
            return loss_and_grads(p, X, labels, negatives, config, rng=None)

        assert grad_check(f, params) < 1e-4


class TestTraining:
    def test_separable_toy_reaches_full_accuracy(self):
        examples = separable_corpus()
        domain = toy_domain(["a", "b"])
        config = IntentConfig(epochs=120)
        model = train_intent(examples, domain, config=config, seed=0)
        hits = sum(
            1 for ex in examples if predict_intent(model, ex.text).intent == ex.intent
        )
        assert hits == len(examples)

    def test_training_reduces_loss(self):
        examples = separable_corpus()
        domain = toy_domain(["a", "b"])
        config = IntentConfig(epochs=120, dropout=0.0)
        vocab = build_vocab([ex.text for ex in examples])
        X = np.stack([_dense_bow(ex.text, vocab) for ex in examples])
        labels = np.array([domain.intents.index(ex.intent) for ex in examples])
        negatives = (1 - labels)[:, None]

        start_params = init_params(vocab.size, 2, IntentConfig(), make_rng(0))
        loss_start, _ = loss_and_grads(start_params, X, labels, negatives, config, None)
        model = train_intent(examples, domain, config=config, seed=0)
        loss_end, _ = loss_and_grads(model.params, X, labels, negatives, config, None)
        assert loss_end < loss_start

    def test_single_intent_rejected(self):
        with pytest.raises(ValueError):
            train_intent(
                [UtteranceExample(text="halo", intent="only")],
                toy_domain(["only"]),
                seed=0,
            )

    def test_same_seed_identical_files(self, tmp_path):
        examples = separable_corpus()
        domain = toy_domain(["a", "b"])
        config = IntentConfig(epochs=10)
        for name in ("one", "two"):
            model = train_intent(examples, domain, config=config, seed=5)
            save_intent_model(model, tmp_path / name)
        assert (tmp_path / "one").read_bytes() == (tmp_path / "two").read_bytes()

    def test_save_load_round_trip(self, tmp_path):
        model = train_intent(
            separable_corpus(), toy_domain(["a", "b"]), config=IntentConfig(epochs=5), seed=1
        )
        save_intent_model(model, tmp_path / "m")
        loaded = load_intent_model(tmp_path / "m")
        assert loaded.intents == model.intents
        assert loaded.vocab == model.vocab
        for key, value in model.params.items():
            assert np.array_equal(loaded.params[key], value)


class TestPrediction:
    def test_ranking_covers_all_intents_and_sums_to_one(self, intent_model):
        prediction = predict_intent(intent_model, "jadwal kuliah dong")
        assert len(prediction.ranking) == len(intent_model.intents)
        assert sum(c for _, c in prediction.ranking) == pytest.approx(1.0, abs=1e-9)
        confidences = [c for _, c in prediction.ranking]
        assert confidences == sorted(confidences, reverse=True)
        assert prediction.ranking[0] == (prediction.intent, prediction.confidence)

    def test_schedule_request_top_intent(self, intent_model):
        assert predict_intent(intent_model, "jadwal kuliah dong").intent == "requests_a_schedule"

    def test_shared_phrase_lands_on_either_greeting(self, intent_model):
        top = predict_intent(intent_model, "assalamu alaikum").intent
        assert top in ("muslim_greeting", "greeting")

    def test_word_count_scaling_keeps_argmax(self, intent_model):
        once = predict_intent(intent_model, "jadwal kuliah dong")
        tripled = predict_intent(intent_model, " ".join(["jadwal kuliah dong"] * 3))
        assert once.intent == tripled.intent

    def test_empty_string_is_uniform_and_low_confidence(self, intent_model):
        prediction = predict_intent(intent_model, "")
        n = len(intent_model.intents)
        assert prediction.confidence == pytest.approx(1.0 / n, abs=1e-9)
        assert prediction.low_confidence

    def test_self_evaluation_on_bundle(self, intent_model, examples):
        hits = sum(
            1 for ex in examples if predict_intent(intent_model, ex.text).intent == ex.intent
        )
        assert hits == len(examples)
