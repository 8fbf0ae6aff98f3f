"""Evaluation metrics: confusion matrices, per-class precision/recall/F1
with macro averages and confused-with maps, plus harnesses that score the
intent model, the entity model, and the policy ensemble from bundled
data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Domain, Story, UtteranceExample
from .dialogue import ensemble_select, memo_predict, rnn_predict, stories_to_training
from .entity import CrfModel, extract_entities
from .intent import IntentModel, predict_intent


class ConfusionMatrix:
    """counts[actual][predicted] over a fixed label order."""

    def __init__(self, labels, counts=None):
        self.labels = tuple(labels)
        n = len(self.labels)
        self.counts = np.zeros((n, n), dtype=int) if counts is None else np.asarray(counts, dtype=int)
        if self.counts.shape != (n, n):
            raise ValueError(f"counts shape {self.counts.shape} does not match {n} labels")
        self._ids = {label: i for i, label in enumerate(self.labels)}

    def add(self, actual: str, predicted: str) -> None:
        self.counts[self._index(actual), self._index(predicted)] += 1

    def _index(self, label: str) -> int:
        try:
            return self._ids[label]
        except KeyError:
            raise ValueError(f"label {label!r} not in matrix") from None

    def tp(self, label: str) -> int:
        i = self._index(label)
        return int(self.counts[i, i])

    def fp(self, label: str) -> int:
        i = self._index(label)
        return int(self.counts[:, i].sum()) - self.tp(label)

    def fn(self, label: str) -> int:
        i = self._index(label)
        return int(self.counts[i, :].sum()) - self.tp(label)

    def support(self, label: str) -> int:
        return int(self.counts[self._index(label), :].sum())

    def is_diagonal(self) -> bool:
        return bool((self.counts == np.diag(np.diag(self.counts))).all())

    def total(self) -> int:
        return int(self.counts.sum())


def confusion_matrix(truth: list[str], predicted: list[str], labels) -> ConfusionMatrix:
    if len(truth) != len(predicted):
        raise ValueError(f"{len(truth)} truth values vs {len(predicted)} predictions")
    matrix = ConfusionMatrix(labels)
    for actual, pred in zip(truth, predicted):
        matrix.add(actual, pred)
    return matrix


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    classes: dict[str, ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confused_with: dict[str, dict[str, int]]

    def to_dict(self) -> dict:
        return {
            "classes": {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for name, m in self.classes.items()
            },
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
            "confused_with": self.confused_with,
        }

    def format_table(self) -> str:
        width = max([len(name) for name in self.classes] + [len("macro avg")])
        header = f"{'':{width}}  precision  recall  f1      support  confused with"
        lines = [header]
        for name, m in self.classes.items():
            confused = self.confused_with.get(name, {})
            lines.append(
                f"{name:{width}}  {m.precision:9.3f}  {m.recall:6.3f}  {m.f1:6.3f}"
                f"  {m.support:7d}  {confused if confused else '{}'}"
            )
        lines.append(
            f"{'macro avg':{width}}  {self.macro_precision:9.3f}  {self.macro_recall:6.3f}"
            f"  {self.macro_f1:6.3f}  {sum(m.support for m in self.classes.values()):7d}"
        )
        return "\n".join(lines)


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _metrics_from_counts(tp: int, fp: int, fn: int, support: int) -> ClassMetrics:
    precision = _safe_div(tp, tp + fp)
    recall = _safe_div(tp, tp + fn)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return ClassMetrics(precision=precision, recall=recall, f1=f1, support=support)


def precision_recall_f1(matrix: ConfusionMatrix) -> EvalReport:
    """Per-class P/R/F1 from the matrix; zero denominators score 0 and
    the macro averages are unweighted means."""
    classes: dict[str, ClassMetrics] = {}
    confused: dict[str, dict[str, int]] = {}
    for label in matrix.labels:
        classes[label] = _metrics_from_counts(
            matrix.tp(label), matrix.fp(label), matrix.fn(label), matrix.support(label)
        )
        i = matrix._index(label)
        wrong = {
            other: int(matrix.counts[i, j])
            for j, other in enumerate(matrix.labels)
            if j != i and matrix.counts[i, j] > 0
        }
        if wrong:
            confused[label] = wrong
    n = len(matrix.labels)
    return EvalReport(
        classes=classes,
        macro_precision=_safe_div(sum(m.precision for m in classes.values()), n),
        macro_recall=_safe_div(sum(m.recall for m in classes.values()), n),
        macro_f1=_safe_div(sum(m.f1 for m in classes.values()), n),
        confused_with=confused,
    )


def evaluate_nlu(model: IntentModel, examples: list[UtteranceExample]) -> EvalReport:
    if not examples:
        raise ValueError("cannot evaluate on an empty dataset")
    truth = [ex.intent for ex in examples]
    predicted = [predict_intent(model, ex.text).intent for ex in examples]
    return precision_recall_f1(confusion_matrix(truth, predicted, model.intents))


def evaluate_entities(model: CrfModel, examples: list[UtteranceExample]) -> EvalReport:
    """Exact-match span scoring: a prediction counts only if start, end
    and type all agree with a gold annotation."""
    if not examples:
        raise ValueError("cannot evaluate on an empty dataset")
    types = [tag[2:] for tag in model.tag_set.tags if tag.startswith("B-")]
    tp = {t: 0 for t in types}
    fp = {t: 0 for t in types}
    fn = {t: 0 for t in types}
    support = {t: 0 for t in types}
    confused: dict[str, dict[str, int]] = {}

    for ex in examples:
        gold = {(a.start, a.end, a.entity_type) for a in ex.entities}
        predicted = {
            (s.start, s.end, s.entity_type)
            for s in extract_entities(model, ex.text, {})
        }
        for start, end, etype in gold:
            support[etype] += 1
            if (start, end, etype) in predicted:
                tp[etype] += 1
            else:
                fn[etype] += 1
                for other in types:
                    if other != etype and (start, end, other) in predicted:
                        confused.setdefault(etype, {})
                        confused[etype][other] = confused[etype].get(other, 0) + 1
        for start, end, etype in predicted - gold:
            fp[etype] += 1

    classes = {
        t: _metrics_from_counts(tp[t], fp[t], fn[t], support[t]) for t in types
    }
    n = len(types)
    return EvalReport(
        classes=classes,
        macro_precision=_safe_div(sum(m.precision for m in classes.values()), n),
        macro_recall=_safe_div(sum(m.recall for m in classes.values()), n),
        macro_f1=_safe_div(sum(m.f1 for m in classes.values()), n),
        confused_with=confused,
    )


def evaluate_policy(engine, stories: list[Story]) -> ConfusionMatrix:
    """Replay stories turn by turn and compare the ensemble's choice with
    the story's action at every bot step, implicit listens included."""
    domain: Domain = engine.domain
    samples = stories_to_training(stories, domain, engine.memo.max_history)
    matrix = ConfusionMatrix(domain.actions)
    for window, label in samples:
        predictions = [memo_predict(engine.memo, window)]
        if engine.rnn is not None:
            predictions.append(rnn_predict(engine.rnn, window))
        selection = ensemble_select(predictions)
        matrix.add(domain.actions[label], selection.action)
    return matrix
