"""Parsing, validation and serialization of the training artifacts.

Three JSON documents make up a corpus bundle: ``nlu.json`` (annotated
example sentences), ``stories.json`` (conversation flows) and
``domain.json`` (the bot's universe of intents, entities, slots, actions
and response templates). See ``docs/formats.md`` for the schemas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from string import Formatter

ACTION_LISTEN = "action_listen"

_ESCAPABLE = set("[]()\\")
_SLOT_TYPES = ("text", "flag")


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus documents."""


@dataclass(frozen=True)
class EntityAnnotation:
    """A typed span inside an example sentence, offsets in the clean text."""

    start: int
    end: int
    entity_type: str
    surface: str


@dataclass(frozen=True)
class UtteranceExample:
    text: str
    intent: str
    entities: tuple[EntityAnnotation, ...] = ()


@dataclass(frozen=True)
class UserStep:
    intent: str
    entities: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class BotStep:
    action: str


@dataclass(frozen=True)
class Story:
    name: str
    steps: tuple[UserStep | BotStep, ...]


@dataclass(frozen=True)
class Slot:
    name: str
    type: str = "text"


@dataclass(frozen=True)
class Domain:
    intents: tuple[str, ...]
    entity_types: tuple[str, ...]
    slots: tuple[Slot, ...]
    actions: tuple[str, ...]
    templates: dict[str, tuple[str, ...]]
    synonyms: dict[str, str]

    def slot_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots)

    def slot_for_entity(self, entity_type: str) -> str | None:
        """Slot auto-filled by an entity of this type (name match, case-insensitive)."""
        for slot in self.slots:
            if slot.name.lower() == entity_type.lower():
                return slot.name
        return None


@dataclass
class ValidationReport:
    errors: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


# ---------------------------------------------------------------------------
# entity markup


def parse_entity_markup(raw: str) -> tuple[str, tuple[EntityAnnotation, ...]]:
    """Strip inline ``[surface](type)`` markup and recompute spans.

    Offsets count Unicode scalar values in the cleaned text. Only ``[``
    opens markup at the top level; stray ``]``, ``(`` and ``)`` are
    literal. Backslash escapes any of ``[ ] ( ) \\``.
    """
    out: list[str] = []
    spans: list[EntityAnnotation] = []
    i, n = 0, len(raw)
    while i < n:
        ch = raw[i]
        if ch == "\\":
            if i + 1 >= n or raw[i + 1] not in _ESCAPABLE:
                bad = raw[i + 1] if i + 1 < n else "<end>"
                raise CorpusError(f"unknown escape '\\{bad}' in {raw!r}")
            out.append(raw[i + 1])
            i += 2
        elif ch == "[":
            i += 1
            surface_chars: list[str] = []
            while i < n and raw[i] != "]":
                if raw[i] == "\\":
                    if i + 1 >= n or raw[i + 1] not in _ESCAPABLE:
                        raise CorpusError(f"unknown escape inside entity surface in {raw!r}")
                    surface_chars.append(raw[i + 1])
                    i += 2
                elif raw[i] == "[":
                    raise CorpusError(f"nested '[' in entity surface in {raw!r}")
                else:
                    surface_chars.append(raw[i])
                    i += 1
            if i >= n:
                raise CorpusError(f"unterminated entity surface in {raw!r}")
            i += 1  # past ']'
            if i >= n or raw[i] != "(":
                raise CorpusError(f"expected '(type)' after ']' in {raw!r}")
            i += 1
            type_chars: list[str] = []
            while i < n and raw[i] != ")":
                type_chars.append(raw[i])
                i += 1
            if i >= n:
                raise CorpusError(f"unterminated entity type in {raw!r}")
            i += 1  # past ')'
            surface = "".join(surface_chars)
            entity_type = "".join(type_chars)
            if not surface:
                raise CorpusError(f"empty entity surface in {raw!r}")
            if not entity_type.replace("_", "").replace("-", "").isalnum():
                raise CorpusError(f"invalid entity type {entity_type!r} in {raw!r}")
            start = len(out)
            out.extend(surface)
            spans.append(EntityAnnotation(start, start + len(surface), entity_type, surface))
        else:
            out.append(ch)
            i += 1
    return "".join(out), tuple(spans)


def render_entity_markup(text: str, entities: tuple[EntityAnnotation, ...]) -> str:
    """Inverse of :func:`parse_entity_markup`; reinserts markup and escapes."""

    def escape_plain(s: str) -> str:
        return s.replace("\\", "\\\\").replace("[", "\\[")

    def escape_surface(s: str) -> str:
        return s.replace("\\", "\\\\").replace("[", "\\[").replace("]", "\\]")

    parts: list[str] = []
    cursor = 0
    for ent in sorted(entities, key=lambda e: e.start):
        parts.append(escape_plain(text[cursor : ent.start]))
        parts.append(f"[{escape_surface(ent.surface)}]({ent.entity_type})")
        cursor = ent.end
    parts.append(escape_plain(text[cursor:]))
    return "".join(parts)


# ---------------------------------------------------------------------------
# document parsing


def _line_of_nth_key(doc: str, key: str, n: int) -> int:
    """1-based line of the n-th (0-based) occurrence of a quoted JSON key."""
    needle = f'"{key}"'
    pos = -1
    for _ in range(n + 1):
        pos = doc.find(needle, pos + 1)
        if pos < 0:
            return 0
    return doc.count("\n", 0, pos) + 1


def _load_json(doc: str, what: str):
    try:
        return json.loads(doc)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{what}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def parse_nlu_corpus(doc: str) -> list[UtteranceExample]:
    """Parse an ``nlu.json`` document into annotated examples."""
    data = _load_json(doc, "nlu corpus")
    if not isinstance(data, list):
        raise CorpusError("nlu corpus: top-level value must be an array")
    examples: list[UtteranceExample] = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or "intent" not in item or "text" not in item:
            raise CorpusError(f"nlu corpus: example {i} must be an object with 'intent' and 'text'")
        try:
            text, spans = parse_entity_markup(item["text"])
        except CorpusError as exc:
            line = _line_of_nth_key(doc, "text", i)
            raise CorpusError(f"nlu corpus line {line}: {exc}") from exc
        examples.append(UtteranceExample(text=text, intent=item["intent"], entities=spans))
    return examples


def parse_stories(doc: str) -> list[Story]:
    """Parse a ``stories.json`` document."""
    data = _load_json(doc, "stories")
    if not isinstance(data, list):
        raise CorpusError("stories: top-level value must be an array")
    stories: list[Story] = []
    for i, item in enumerate(data):
        name = item.get("name", f"story_{i}")
        raw_steps = item.get("steps", [])
        if not raw_steps:
            raise CorpusError(f"story {name!r}: empty story")
        steps: list[UserStep | BotStep] = []
        for j, raw in enumerate(raw_steps):
            if "user" in raw:
                user = raw["user"]
                steps.append(UserStep(intent=user["intent"], entities=dict(user.get("entities", {}))))
            elif "bot" in raw:
                if not steps:
                    raise CorpusError(f"story {name!r}: bot step before any user step")
                steps.append(BotStep(action=raw["bot"]))
            else:
                raise CorpusError(f"story {name!r}: step {j} must have a 'user' or 'bot' key")
        if not isinstance(steps[0], UserStep):
            raise CorpusError(f"story {name!r}: first step must be a user step")
        stories.append(Story(name=name, steps=tuple(steps)))
    return stories


def parse_domain(doc: str) -> Domain:
    """Parse a ``domain.json`` document and enforce its invariants."""
    data = _load_json(doc, "domain")
    intents = tuple(data.get("intents", []))
    entity_types = tuple(data.get("entities", []))
    slots = tuple(Slot(s["name"], s.get("type", "text")) for s in data.get("slots", []))
    actions = list(data.get("actions", []))
    templates = {k: tuple(v) for k, v in data.get("templates", {}).items()}
    synonyms = dict(data.get("synonyms", {}))

    for slot in slots:
        if slot.type not in _SLOT_TYPES:
            raise CorpusError(f"slot {slot.name!r}: unknown type {slot.type!r}")
    seen: set[str] = set()
    for action in actions:
        if action in seen:
            raise CorpusError(f"duplicate action name {action!r}")
        seen.add(action)
    if ACTION_LISTEN not in seen:
        actions.insert(0, ACTION_LISTEN)

    slot_names = {s.name for s in slots}
    for action, variants in templates.items():
        for template in variants:
            for _, placeholder, _, _ in Formatter().parse(template):
                if placeholder is None:
                    continue
                if not placeholder or placeholder not in slot_names:
                    raise CorpusError(
                        f"template for {action!r} references undeclared slot {placeholder!r}"
                    )

    return Domain(
        intents=intents,
        entity_types=entity_types,
        slots=slots,
        actions=tuple(actions),
        templates=templates,
        synonyms=synonyms,
    )


# ---------------------------------------------------------------------------
# serialization (inverse of the parsers; round-trips to equal values)


def serialize_nlu_corpus(examples: list[UtteranceExample]) -> str:
    data = [
        {"intent": ex.intent, "text": render_entity_markup(ex.text, ex.entities)}
        for ex in examples
    ]
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def serialize_stories(stories: list[Story]) -> str:
    data = []
    for story in stories:
        steps: list[dict] = []
        for step in story.steps:
            if isinstance(step, UserStep):
                user: dict = {"intent": step.intent}
                if step.entities:
                    user["entities"] = dict(step.entities)
                steps.append({"user": user})
            else:
                steps.append({"bot": step.action})
        data.append({"name": story.name, "steps": steps})
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def serialize_domain(domain: Domain) -> str:
    data = {
        "intents": list(domain.intents),
        "entities": list(domain.entity_types),
        "slots": [{"name": s.name, "type": s.type} for s in domain.slots],
        "actions": list(domain.actions),
        "templates": {k: list(v) for k, v in domain.templates.items()},
        "synonyms": dict(domain.synonyms),
    }
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# cross-validation of a full bundle


def validate(
    domain: Domain,
    stories: list[Story],
    examples: list[UtteranceExample],
) -> ValidationReport:
    """Cross-reference a parsed bundle; problems land in the report."""
    report = ValidationReport()
    intents = set(domain.intents)
    entity_types = set(domain.entity_types)
    actions = set(domain.actions)

    for i, ex in enumerate(examples):
        loc = f"nlu[{i}]"
        if ex.intent not in intents:
            report.errors.append((loc, f"unknown intent {ex.intent!r}"))
        for ent in ex.entities:
            if ent.entity_type not in entity_types:
                report.errors.append((loc, f"unknown entity type {ent.entity_type!r}"))

    story_intents: set[str] = set()
    for story in stories:
        loc = f"story {story.name!r}"
        for step in story.steps:
            if isinstance(step, UserStep):
                story_intents.add(step.intent)
                if step.intent not in intents:
                    report.errors.append((loc, f"unknown intent {step.intent!r}"))
                for etype in step.entities:
                    if etype not in entity_types:
                        report.errors.append((loc, f"unknown entity type {etype!r}"))
            else:
                if step.action not in actions:
                    report.errors.append((loc, f"unknown action {step.action!r}"))

    covered = {ex.intent for ex in examples}
    for intent in sorted(story_intents - covered):
        report.warnings.append(("nlu", f"intent {intent!r} is used in stories but has no examples"))
    return report


# ---------------------------------------------------------------------------
# file helpers


def load_bundle(data_dir: str | Path) -> tuple[Domain, list[Story], list[UtteranceExample]]:
    """Read and parse ``domain.json``, ``stories.json`` and ``nlu.json``."""
    data_dir = Path(data_dir)
    domain = parse_domain((data_dir / "domain.json").read_text(encoding="utf-8"))
    stories = parse_stories((data_dir / "stories.json").read_text(encoding="utf-8"))
    examples = parse_nlu_corpus((data_dir / "nlu.json").read_text(encoding="utf-8"))
    return domain, stories, examples
