"""Conversation tracking and next-action selection.

A tracker is an append-only event log per sender; everything else is
derived from it. Stories become (window, action) training samples where a
window is the last five featurized dialogue states. Two policies vote on
the next action: exact-window memoization (confidence 1.0 or nothing) and
a small LSTM over the window. The engine runs the act-until-listen loop.
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .corpus import ACTION_LISTEN, BotStep, Domain, Story, UserStep
from .entity import EntitySpan, extract_entities
from .intent import predict_intent
from .modelio import load_model, save_model
from .neuralcore import (
    AdamState,
    Array,
    LstmParams,
    adam_update,
    affine_apply,
    affine_backward,
    dropout_forward,
    glorot_uniform,
    lstm_step_backward,
    lstm_step_forward,
    make_rng,
    softmax,
    softmax_xent_batch,
)

MEMO_SECTION = "memo-v1"
RNN_SECTION = "rnnpolicy-v1"

MEMO_POLICY = "memoization"
RNN_POLICY = "recurrent"
FALLBACK_POLICY = "fallback"
FALLBACK_ACTION = "utter_default"

MEMO_PRIORITY = 2
RNN_PRIORITY = 1

MAX_ACTIONS_PER_MESSAGE = 10
ERROR_MESSAGE = "maaf, terjadi kesalahan"


# ---------------------------------------------------------------------------
# events and tracker


@dataclass(frozen=True)
class UserUttered:
    text: str
    intent: str | None
    entities: tuple[EntitySpan, ...] = ()
    confidence: float = 0.0


@dataclass(frozen=True)
class ActionExecuted:
    action: str


@dataclass(frozen=True)
class BotUttered:
    text: str


@dataclass(frozen=True)
class SlotSet:
    slot: str
    value: str | None


@dataclass(frozen=True)
class Restarted:
    pass


DialogueEvent = "UserUttered | ActionExecuted | BotUttered | SlotSet | Restarted"


class DialogueTracker:
    """Event log plus the state derived from folding it.

    The derived fields are updated incrementally on apply and must always
    equal a full replay of the log (tested as a property).
    """

    def __init__(self, sender_id: str):
        self.sender_id = sender_id
        self.events: list = []
        self.slots: dict[str, str | None] = {}
        self.latest_intent: str | None = None
        self.latest_entities: tuple[EntitySpan, ...] = ()
        self.last_action: str = ACTION_LISTEN

    def apply(self, event) -> None:
        self.events.append(event)
        if isinstance(event, UserUttered):
            self.latest_intent = event.intent
            self.latest_entities = tuple(event.entities)
        elif isinstance(event, ActionExecuted):
            self.last_action = event.action
        elif isinstance(event, SlotSet):
            self.slots[event.slot] = event.value
        elif isinstance(event, Restarted):
            self.slots = {}
            self.latest_intent = None
            self.latest_entities = ()
            self.last_action = ACTION_LISTEN


def tracker_apply(tracker: DialogueTracker, event) -> DialogueTracker:
    tracker.apply(event)
    return tracker


def replay(sender_id: str, events: Iterable) -> DialogueTracker:
    """Rebuild a tracker purely from its event log."""
    tracker = DialogueTracker(sender_id)
    for event in events:
        tracker.apply(event)
    return tracker


# ---------------------------------------------------------------------------
# event (de)serialization for the per-sender log files


def event_to_dict(event) -> dict:
    if isinstance(event, UserUttered):
        return {
            "event": "user",
            "text": event.text,
            "intent": event.intent,
            "confidence": event.confidence,
            "entities": [
                {
                    "entity_type": e.entity_type,
                    "value": e.value,
                    "surface": e.surface,
                    "start": e.start,
                    "end": e.end,
                    "confidence": e.confidence,
                }
                for e in event.entities
            ],
        }
    if isinstance(event, ActionExecuted):
        return {"event": "action", "action": event.action}
    if isinstance(event, BotUttered):
        return {"event": "bot", "text": event.text}
    if isinstance(event, SlotSet):
        return {"event": "slot", "slot": event.slot, "value": event.value}
    if isinstance(event, Restarted):
        return {"event": "restarted"}
    raise TypeError(f"not a dialogue event: {event!r}")


def event_from_dict(record: dict):
    kind = record.get("event")
    if kind == "user":
        return UserUttered(
            text=record["text"],
            intent=record["intent"],
            confidence=record.get("confidence", 0.0),
            entities=tuple(EntitySpan(**e) for e in record.get("entities", [])),
        )
    if kind == "action":
        return ActionExecuted(record["action"])
    if kind == "bot":
        return BotUttered(record["text"])
    if kind == "slot":
        return SlotSet(record["slot"], record["value"])
    if kind == "restarted":
        return Restarted()
    raise ValueError(f"unknown event kind {kind!r}")


def append_event_log(path, events) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for event in events:
            fh.write(json.dumps(event_to_dict(event), ensure_ascii=False) + "\n")


def read_event_log(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [event_from_dict(json.loads(line)) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# featurization


def state_dim(domain: Domain) -> int:
    return (
        len(domain.actions)
        + len(domain.intents)
        + len(domain.entity_types)
        + len(domain.slots)
    )


def featurize_state(tracker: DialogueTracker, domain: Domain) -> Array:
    """Binary state: one-hot previous action, one-hot latest intent,
    entity-presence flags, slot-filled flags."""
    vec = np.zeros(state_dim(domain))
    offset = 0

    if tracker.last_action not in domain.actions:
        raise ValueError(f"action {tracker.last_action!r} not in domain")
    vec[offset + domain.actions.index(tracker.last_action)] = 1.0
    offset += len(domain.actions)

    if tracker.latest_intent is not None:
        if tracker.latest_intent not in domain.intents:
            raise ValueError(f"intent {tracker.latest_intent!r} not in domain")
        vec[offset + domain.intents.index(tracker.latest_intent)] = 1.0
    offset += len(domain.intents)

    present = {e.entity_type for e in tracker.latest_entities}
    for i, etype in enumerate(domain.entity_types):
        if etype in present:
            vec[offset + i] = 1.0
    offset += len(domain.entity_types)

    for i, slot in enumerate(domain.slots):
        if tracker.slots.get(slot.name) is not None:
            vec[offset + i] = 1.0
    return vec


def decision_states(tracker: DialogueTracker, domain: Domain) -> list[Array]:
    """State snapshots at every past decision point plus the pending one.

    Walks the event log folding state; each ActionExecuted marks a
    decision that saw the state just before it. Restarted discards the
    accumulated history.
    """
    shadow = DialogueTracker(tracker.sender_id)
    states: list[Array] = []
    for event in tracker.events:
        if isinstance(event, Restarted):
            states = []
        elif isinstance(event, ActionExecuted):
            states.append(featurize_state(shadow, domain))
        shadow.apply(event)
    states.append(featurize_state(shadow, domain))
    return states


def stack_window(states: list[Array], dim: int, max_history: int = 5) -> Array:
    """Most recent ≤max_history states as a zero-padded matrix, oldest
    first, padding rows on top."""
    window = np.zeros((max_history, dim))
    tail = states[-max_history:]
    if tail:
        window[max_history - len(tail) :] = np.stack(tail)
    return window


def apply_user_step(tracker: DialogueTracker, step: UserStep, domain: Domain) -> None:
    """Apply a story user turn: the utterance event plus slot fills for
    every entity whose type names a slot (case-insensitive)."""
    spans = tuple(
        EntitySpan(entity_type=etype, value=value, surface=value, start=0, end=0, confidence=1.0)
        for etype, value in step.entities.items()
    )
    tracker.apply(UserUttered(text="", intent=step.intent, entities=spans, confidence=1.0))
    for span in spans:
        slot = domain.slot_for_entity(span.entity_type)
        if slot is not None:
            tracker.apply(SlotSet(slot, span.value))


def stories_to_training(
    stories: list[Story], domain: Domain, max_history: int = 5
) -> list[tuple[Array, int]]:
    """One (window, action id) sample per bot step, plus an implicit
    action_listen sample closing every bot-turn run."""
    dim = state_dim(domain)
    samples: list[tuple[Array, int]] = []

    for story in stories:
        tracker = DialogueTracker(story.name)

        def emit(action: str) -> None:
            states = decision_states(tracker, domain)
            samples.append((stack_window(states, dim, max_history), domain.actions.index(action)))
            tracker.apply(ActionExecuted(action))

        previous_was_bot = False
        for step in story.steps:
            if isinstance(step, UserStep):
                if previous_was_bot:
                    emit(ACTION_LISTEN)
                apply_user_step(tracker, step, domain)
                previous_was_bot = False
            elif isinstance(step, BotStep):
                emit(step.action)
                previous_was_bot = True
        if previous_was_bot:
            emit(ACTION_LISTEN)
    return samples


# ---------------------------------------------------------------------------
# policies


@dataclass(frozen=True)
class PolicyPrediction:
    policy: str
    action: str | None
    confidence: float
    priority: int


@dataclass(frozen=True)
class PolicySelection:
    action: str
    confidence: float
    policy: str


def _window_key(window: Array) -> str:
    return np.asarray(window, dtype=np.uint8).tobytes().hex()


@dataclass
class MemoModel:
    table: dict[str, str]
    max_history: int
    dim: int


def memo_train(
    samples: list[tuple[Array, int]], actions: tuple[str, ...], max_history: int = 5
) -> MemoModel:
    table: dict[str, str] = {}
    dim = samples[0][0].shape[1] if samples else 0
    for window, label in samples:
        key = _window_key(window)
        action = actions[label]
        if key in table:
            if table[key] != action:
                warnings.warn(
                    f"conflicting stories: window already maps to {table[key]!r}, "
                    f"ignoring {action!r}"
                )
            continue
        table[key] = action
    return MemoModel(table=table, max_history=max_history, dim=dim)


def memo_predict(model: MemoModel, window: Array) -> PolicyPrediction:
    action = model.table.get(_window_key(window))
    if action is None:
        return PolicyPrediction(MEMO_POLICY, None, 0.0, MEMO_PRIORITY)
    return PolicyPrediction(MEMO_POLICY, action, 1.0, MEMO_PRIORITY)


@dataclass(frozen=True)
class PolicyConfig:
    max_history: int = 5
    hidden: int = 32
    dropout: float = 0.2
    epochs: int = 100
    learning_rate: float = 0.01
    batch_size: int = 32
    output_dim: int | None = None


@dataclass
class RnnPolicyModel:
    actions: tuple[str, ...]
    params: dict[str, Array]  # w_x, w_h, b, dense_w, dense_b
    config: PolicyConfig = field(default_factory=PolicyConfig)

    @property
    def input_dim(self) -> int:
        return self.params["w_x"].shape[1]


def _rnn_forward(
    params: dict[str, Array],
    windows: Array,
    dropout: float = 0.0,
    rng=None,
) -> tuple[Array, list, "Array | None", Array]:
    """Masked unroll over the window rows; all-zero rows leave the state
    untouched. Returns logits plus caches for the backward pass."""
    lstm = LstmParams(w_x=params["w_x"], w_h=params["w_h"], b=params["b"])
    batch, steps, _ = windows.shape
    hidden = lstm.hidden_size
    h = np.zeros((batch, hidden))
    c = np.zeros((batch, hidden))
    caches = []
    for t in range(steps):
        x_t = windows[:, t, :]
        mask = np.any(x_t != 0.0, axis=1).astype(np.float64)[:, None]
        h_new, c_new, cache = lstm_step_forward(lstm, x_t, h, c)
        h = mask * h_new + (1.0 - mask) * h
        c = mask * c_new + (1.0 - mask) * c
        caches.append((cache, mask))
    training = dropout > 0.0 and rng is not None
    dropped, drop_mask = dropout_forward(h, dropout, rng, training)
    logits = affine_apply(params["dense_w"], params["dense_b"], dropped)
    return logits, caches, drop_mask, dropped


def rnn_loss_and_grads(
    params: dict[str, Array],
    windows: Array,
    labels: Array,
    config: PolicyConfig,
    rng=None,
) -> tuple[float, dict[str, Array]]:
    logits, caches, drop_mask, dropped = _rnn_forward(params, windows, config.dropout, rng)
    loss, dlogits = softmax_xent_batch(logits, labels)
    ddropped, d_dense_w, d_dense_b = affine_backward(dlogits, dropped, params["dense_w"])
    dh = ddropped if drop_mask is None else ddropped * drop_mask
    dc = np.zeros_like(dh)

    lstm = LstmParams(w_x=params["w_x"], w_h=params["w_h"], b=params["b"])
    grads = {
        "w_x": np.zeros_like(params["w_x"]),
        "w_h": np.zeros_like(params["w_h"]),
        "b": np.zeros_like(params["b"]),
        "dense_w": d_dense_w,
        "dense_b": d_dense_b,
    }
    for cache, mask in reversed(caches):
        _, dh_step, dc_step, dw_x, dw_h, db = lstm_step_backward(
            lstm, cache, mask * dh, mask * dc
        )
        dh = dh_step + (1.0 - mask) * dh
        dc = dc_step + (1.0 - mask) * dc
        grads["w_x"] += dw_x
        grads["w_h"] += dw_h
        grads["b"] += db
    return loss, grads


def rnn_train(
    samples: list[tuple[Array, int]],
    actions: tuple[str, ...],
    config: PolicyConfig | None = None,
    seed: int = 0,
) -> RnnPolicyModel:
    """Train the window-to-action LSTM; deterministic for a given seed."""
    config = config or PolicyConfig()
    if not samples:
        raise ValueError("policy training needs at least one sample")
    if config.output_dim is not None and config.output_dim != len(actions):
        raise ValueError(
            f"config output dim {config.output_dim} does not match {len(actions)} actions"
        )
    windows = np.stack([w for w, _ in samples])
    labels = np.array([label for _, label in samples])
    dim = windows.shape[2]

    rng = make_rng(seed)
    hidden = config.hidden
    params = {
        "w_x": glorot_uniform(rng, (4 * hidden, dim)),
        "w_h": glorot_uniform(rng, (4 * hidden, hidden)),
        "b": np.zeros(4 * hidden),
        "dense_w": glorot_uniform(rng, (len(actions), hidden)),
        "dense_b": np.zeros(len(actions)),
    }
    params["b"][hidden : 2 * hidden] = 1.0  # forget gate open at init
    state = AdamState(lr=config.learning_rate)
    n = len(samples)
    batch = max(1, min(config.batch_size, n))

    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            _, grads = rnn_loss_and_grads(params, windows[idx], labels[idx], config, rng)
            params = adam_update(params, grads, state)
    return RnnPolicyModel(actions=tuple(actions), params=params, config=config)


def rnn_predict(model: RnnPolicyModel, window: Array) -> PolicyPrediction:
    logits, _, _, _ = _rnn_forward(model.params, window[None, :, :])
    probs = softmax(logits[0])
    best = int(np.argmax(probs))
    return PolicyPrediction(RNN_POLICY, model.actions[best], float(probs[best]), RNN_PRIORITY)


def ensemble_select(predictions: list[PolicyPrediction]) -> PolicySelection:
    """Highest confidence wins; exact ties go to the higher-priority
    policy; if nobody predicts, fall back to utter_default."""
    if not predictions:
        raise ValueError("ensemble needs at least one prediction")
    best = max(predictions, key=lambda p: (p.confidence, p.priority))
    if best.action is None:
        return PolicySelection(FALLBACK_ACTION, 0.0, FALLBACK_POLICY)
    return PolicySelection(best.action, best.confidence, best.policy)


# ---------------------------------------------------------------------------
# policy persistence


def save_memo_model(model: MemoModel, path) -> None:
    meta = {
        "entries": [[key, action] for key, action in model.table.items()],
        "max_history": model.max_history,
        "dim": model.dim,
    }
    save_model(path, MEMO_SECTION, meta, {})


def load_memo_model(path) -> MemoModel:
    _, meta, _ = load_model(path, expect_section=MEMO_SECTION)
    return MemoModel(
        table={key: action for key, action in meta["entries"]},
        max_history=meta["max_history"],
        dim=meta["dim"],
    )


def save_rnn_model(model: RnnPolicyModel, path) -> None:
    meta = {
        "actions": list(model.actions),
        "config": {
            k: getattr(model.config, k) for k in PolicyConfig.__dataclass_fields__
        },
    }
    save_model(path, RNN_SECTION, meta, model.params)


def load_rnn_model(path) -> RnnPolicyModel:
    _, meta, arrays = load_model(path, expect_section=RNN_SECTION)
    return RnnPolicyModel(
        actions=tuple(meta["actions"]),
        params=arrays,
        config=PolicyConfig(**meta["config"]),
    )


# ---------------------------------------------------------------------------
# engine


@dataclass
class Engine:
    """Everything needed to turn one inbound text into bot replies."""

    domain: Domain
    intent_model: object
    crf_model: object
    memo: MemoModel
    rnn: RnnPolicyModel | None = None
    custom_actions: dict[str, Callable[[DialogueTracker], object]] = field(default_factory=dict)
    log_dir: str | None = None
    trackers: dict[str, DialogueTracker] = field(default_factory=dict)
    debug_info: dict[str, dict] = field(default_factory=dict)

    def tracker_for(self, sender_id: str) -> DialogueTracker:
        tracker = self.trackers.get(sender_id)
        if tracker is None:
            tracker = DialogueTracker(sender_id)
            if self.log_dir:
                path = self._log_path(sender_id)
                if os.path.exists(path):
                    for event in read_event_log(path):
                        tracker.apply(event)
            self.trackers[sender_id] = tracker
        return tracker

    def _log_path(self, sender_id: str) -> str:
        safe = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in sender_id)
        return os.path.join(self.log_dir, f"{safe}.jsonl")

    def _persist(self, sender_id: str, events: list) -> None:
        if self.log_dir:
            os.makedirs(self.log_dir, exist_ok=True)
            append_event_log(self._log_path(sender_id), events)


def _predictions(engine: Engine, window: Array) -> list[PolicyPrediction]:
    preds = [memo_predict(engine.memo, window)]
    if engine.rnn is not None:
        preds.append(rnn_predict(engine.rnn, window))
    return preds


def _execute_action(engine: Engine, tracker: DialogueTracker, action: str) -> tuple[list[str], list]:
    """Run one action: template render or custom handler. Returns
    (messages, follow-up events); raises KeyError for unknown actions."""
    from .actions import render_utterance

    if action in engine.custom_actions:
        result = engine.custom_actions[action](tracker)
        return list(result.messages), list(result.events)
    if action in engine.domain.templates:
        messages = [
            render_utterance(template, tracker.slots)
            for template in engine.domain.templates[action]
        ]
        return messages, []
    raise KeyError(f"no handler or template for action {action!r}")


def handle_message(engine: Engine, sender_id: str, text: str) -> list[str]:
    """Parse one user message, then act until the policies choose to
    listen. Returns the bot messages in send order."""
    tracker = engine.tracker_for(sender_id)
    new_events: list = []

    def apply(event) -> None:
        tracker.apply(event)
        new_events.append(event)

    parse = predict_intent(engine.intent_model, text)
    spans = extract_entities(engine.crf_model, text, engine.domain.synonyms)
    apply(UserUttered(text=text, intent=parse.intent, entities=tuple(spans), confidence=parse.confidence))
    for span in spans:
        slot = engine.domain.slot_for_entity(span.entity_type)
        if slot is not None:
            apply(SlotSet(slot, span.value))

    debug: dict = {
        "intent": {"name": parse.intent, "confidence": parse.confidence},
        "intent_ranking": [{"name": n, "confidence": c} for n, c in parse.ranking],
        "entities": [
            {
                "entity_type": s.entity_type,
                "value": s.value,
                "surface": s.surface,
                "start": s.start,
                "end": s.end,
                "confidence": s.confidence,
            }
            for s in spans
        ],
        "policy": None,
        "actions": [],
    }

    dim = state_dim(engine.domain)
    max_history = engine.memo.max_history
    messages: list[str] = []

    for _ in range(MAX_ACTIONS_PER_MESSAGE):
        window = stack_window(decision_states(tracker, engine.domain), dim, max_history)
        selection = ensemble_select(_predictions(engine, window))
        debug["policy"] = {
            "name": selection.policy,
            "action": selection.action,
            "confidence": selection.confidence,
        }
        debug["actions"].append(selection.action)

        if selection.action == ACTION_LISTEN:
            apply(ActionExecuted(ACTION_LISTEN))
            break
        try:
            action_messages, extra_events = _execute_action(engine, tracker, selection.action)
        except KeyError:
            apply(Restarted())
            messages.append(ERROR_MESSAGE)
            apply(BotUttered(ERROR_MESSAGE))
            break
        apply(ActionExecuted(selection.action))
        for message in action_messages:
            messages.append(message)
            apply(BotUttered(message))
        for event in extra_events:
            apply(event)
        if selection.policy == FALLBACK_POLICY:
            # a fallback would never match a story, so stop the turn here
            apply(ActionExecuted(ACTION_LISTEN))
            break
    else:
        apply(Restarted())
        messages.append(ERROR_MESSAGE)
        apply(BotUttered(ERROR_MESSAGE))

    engine.debug_info[sender_id] = debug
    engine._persist(sender_id, new_events)
    return messages
