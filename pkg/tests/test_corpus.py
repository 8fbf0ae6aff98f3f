import json

import pytest

from dialogforge.corpus import (
    ACTION_LISTEN,
    BotStep,
    CorpusError,
    EntityAnnotation,
    UserStep,
    parse_domain,
    parse_entity_markup,
    parse_nlu_corpus,
    parse_stories,
    render_entity_markup,
    serialize_domain,
    serialize_nlu_corpus,
    serialize_stories,
    validate,
)


class TestEntityMarkup:
    def test_single_span(self):
        text, spans = parse_entity_markup("schedule [ds](concentration)")
        assert text == "schedule ds"
        assert spans == (EntityAnnotation(9, 11, "concentration", "ds"),)
        assert text[9:11] == "ds"

    def test_multiple_spans_keep_order(self):
        text, spans = parse_entity_markup("jadwal [fd](concentration) dan [ds](concentration)")
        assert text == "jadwal fd dan ds"
        assert [s.surface for s in spans] == ["fd", "ds"]
        assert [(s.start, s.end) for s in spans] == [(7, 9), (14, 16)]

    def test_no_markup_passthrough(self):
        text, spans = parse_entity_markup("halo apa kabar")
        assert text == "halo apa kabar"
        assert spans == ()

    def test_stray_brackets_are_literal(self):
        text, spans = parse_entity_markup("a ) b ] c")
        assert text == "a ) b ] c"
        assert spans == ()

    def test_escapes(self):
        text, spans = parse_entity_markup(r"harga \[promo\] [a](x)")
        assert text == "harga [promo] a"
        assert spans[0].surface == "a"

    def test_unterminated_markup_rejected(self):
        with pytest.raises(CorpusError):
            parse_entity_markup("jadwal [fd(concentration)")
        with pytest.raises(CorpusError):
            parse_entity_markup("jadwal [fd](concentration")

    def test_missing_type_rejected(self):
        with pytest.raises(CorpusError):
            parse_entity_markup("jadwal [fd] dong")

    def test_round_trip(self):
        raw = "minta jadwal [sains data](concentration) sama [fd](concentration)"
        text, spans = parse_entity_markup(raw)
        assert render_entity_markup(text, spans) == raw


class TestParsers:
    def test_nlu_corpus(self):
        doc = json.dumps([{"intent": "greeting", "text": "halo [x](city)"}])
        examples = parse_nlu_corpus(doc)
        assert examples[0].intent == "greeting"
        assert examples[0].entities[0].entity_type == "city"

    def test_nlu_error_reports_line(self):
        doc = '[\n {"intent": "a", "text": "ok"},\n {"intent": "b", "text": "bad [x"}\n]'
        with pytest.raises(CorpusError, match="line 3"):
            parse_nlu_corpus(doc)

    def test_stories(self):
        doc = json.dumps(
            [
                {
                    "name": "s",
                    "steps": [
                        {"user": {"intent": "greeting"}},
                        {"bot": "utter_say_hello"},
                        {"user": {"intent": "only", "entities": {"concentration": "fd"}}},
                        {"bot": "action_schedule_list"},
                    ],
                }
            ]
        )
        (story,) = parse_stories(doc)
        assert isinstance(story.steps[0], UserStep)
        assert isinstance(story.steps[1], BotStep)
        assert story.steps[2].entities == {"concentration": "fd"}

    def test_story_must_start_with_user(self):
        doc = json.dumps([{"name": "s", "steps": [{"bot": "utter_x"}]}])
        with pytest.raises(CorpusError):
            parse_stories(doc)

    def test_empty_story_rejected(self):
        with pytest.raises(CorpusError):
            parse_stories(json.dumps([{"name": "s", "steps": []}]))

    def test_domain_injects_listen_first(self):
        domain = parse_domain(json.dumps({"actions": ["utter_a"]}))
        assert domain.actions[0] == ACTION_LISTEN

    def test_domain_keeps_explicit_listen_position(self):
        domain = parse_domain(json.dumps({"actions": ["utter_a", ACTION_LISTEN]}))
        assert domain.actions == ("utter_a", ACTION_LISTEN)

    def test_domain_duplicate_action_rejected(self):
        with pytest.raises(CorpusError):
            parse_domain(json.dumps({"actions": ["utter_a", "utter_a"]}))

    def test_domain_template_placeholder_must_be_slot(self):
        doc = json.dumps(
            {"slots": [{"name": "city"}], "templates": {"utter_x": ["halo {city}"]}}
        )
        parse_domain(doc)  # fine
        bad = json.dumps({"templates": {"utter_x": ["halo {nope}"]}})
        with pytest.raises(CorpusError):
            parse_domain(bad)

    def test_slot_for_entity_is_case_insensitive(self):
        domain = parse_domain(
            json.dumps({"entities": ["NIM"], "slots": [{"name": "nim"}]})
        )
        assert domain.slot_for_entity("NIM") == "nim"
        assert domain.slot_for_entity("unknown") is None

    def test_invalid_json_reports_line(self):
        with pytest.raises(CorpusError, match="line"):
            parse_domain('{\n "intents": [,]\n}')


class TestSerializers:
    def test_nlu_round_trip(self, examples):
        assert parse_nlu_corpus(serialize_nlu_corpus(examples)) == examples

    def test_stories_round_trip(self, stories):
        assert parse_stories(serialize_stories(stories)) == stories

    def test_domain_round_trip(self, domain):
        assert parse_domain(serialize_domain(domain)) == domain


class TestValidate:
    def test_bundle_is_clean(self, domain, stories, examples):
        report = validate(domain, stories, examples)
        assert report.ok
        assert report.warnings == []

    def test_unknown_intent_flagged(self, domain, stories, examples):
        from dialogforge.corpus import UtteranceExample

        broken = examples + [UtteranceExample(text="x", intent="no_such_intent")]
        report = validate(domain, stories, broken)
        assert not report.ok
        assert any("no_such_intent" in msg for _, msg in report.errors)

    def test_story_intent_without_examples_warns(self, domain, examples):
        from dialogforge.corpus import Story

        extra = Story(name="w", steps=(UserStep(intent="greeting"), BotStep("utter_say_hello")))
        covered = [ex for ex in examples if ex.intent != "greeting"]
        report = validate(domain, [extra], covered)
        assert report.ok
        assert any("greeting" in msg for _, msg in report.warnings)


class TestBundleShape:
    """The packaged corpus has a pinned shape that training relies on."""

    def test_example_counts(self, examples):
        assert len(examples) == 165
        by_intent = {}
        for ex in examples:
            by_intent[ex.intent] = by_intent.get(ex.intent, 0) + 1
        assert by_intent["requests_a_schedule"] == 100
        assert by_intent["request_a_worship_schedule"] == 11
        assert by_intent["request_grade_score"] == 10

    def test_annotation_counts(self, examples):
        by_type = {}
        for ex in examples:
            for ann in ex.entities:
                by_type[ann.entity_type] = by_type.get(ann.entity_type, 0) + 1
        assert by_type == {"concentration": 10, "program": 170, "city": 12, "NIM": 3}

    def test_domain_shape(self, domain):
        assert len(domain.intents) == 14
        assert len(domain.actions) == 17
        assert domain.actions[0] == ACTION_LISTEN
        assert domain.slot_names() == ("concentration", "city", "nim")
