"""Tests for utterance rendering, the record store, lookup clients, and
the four custom actions."""

from datetime import date

import pytest

from dialogforge.actions import (
    PRAYER_LABELS,
    UNAVAILABLE_MESSAGE,
    ActionResult,
    ClientError,
    FixturePrayerClient,
    FixtureWeatherClient,
    GradeRow,
    PrayerTimes,
    RecordStore,
    ScheduleRow,
    action_grade_list,
    action_schedule_list,
    action_weather,
    action_worship_schedule,
    build_action_registry,
    render_utterance,
    translate_weather_description,
)
from dialogforge.dialogue import DialogueTracker, SlotSet
from dialogforge.pipeline import bundled_data_dir

FIXED_DAY = date(2020, 9, 25)


def tracker_with(**slots):
    tracker = DialogueTracker("t")
    for name, value in slots.items():
        tracker.apply(SlotSet(name, value))
    return tracker


@pytest.fixture(scope="module")
def store():
    data = bundled_data_dir()
    return RecordStore.from_files(data / "schedules.tsv", data / "grades.tsv")


@pytest.fixture(scope="module")
def prayer_client():
    import json

    raw = (bundled_data_dir() / "prayer_fixtures.json").read_text(encoding="utf-8")
    return FixturePrayerClient(json.loads(raw))


@pytest.fixture(scope="module")
def weather_client():
    import json

    raw = (bundled_data_dir() / "weather_fixtures.json").read_text(encoding="utf-8")
    return FixtureWeatherClient(json.loads(raw))


class TestRenderUtterance:
    def test_plain_template_passes_through(self):
        assert render_utterance("halo!", {}) == "halo!"

    def test_placeholders_fill_from_slots(self):
        out = render_utterance("jadwal {concentration} siap", {"concentration": "ds"})
        assert out == "jadwal ds siap"

    def test_missing_slot_is_an_error(self):
        with pytest.raises(KeyError, match="city"):
            render_utterance("cuaca di {city}", {})

    def test_none_valued_slot_is_an_error(self):
        with pytest.raises(KeyError, match="city"):
            render_utterance("cuaca di {city}", {"city": None})

    def test_extra_slots_are_ignored(self):
        assert render_utterance("oke", {"city": "jogja"}) == "oke"


class TestRecordStore:
    def test_loads_bundled_tables(self, store):
        assert len(store.schedules) == 7
        assert len(store.grades) == 8
        assert store.schedules[0] == ScheduleRow(
            "digital forensic", "analisis forensik digital", "senin", "08:00", "fti-301"
        )
        assert store.grades[0] == GradeRow("18917101", "analisis forensik digital", "A")

    def test_schedule_lookup_sorts_by_weekday_then_time(self, store):
        rows = store.schedules_for("data science")
        assert [(r.day, r.time) for r in rows] == [
            ("senin", "09:00"),
            ("selasa", "10:00"),
            ("kamis", "08:00"),
            ("jumat", "10:00"),
        ]

    def test_schedule_lookup_is_case_insensitive(self, store):
        assert store.schedules_for("Digital Forensic") == store.schedules_for(
            "digital forensic"
        )

    def test_unknown_concentration_yields_no_rows(self, store):
        assert store.schedules_for("astrologi") == []

    def test_grades_keyed_by_exact_nim(self, store):
        rows = store.grades_for("18917102")
        assert [(r.course, r.grade) for r in rows] == [
            ("dasar sains data", "A"),
            ("pembelajaran mesin", "B+"),
        ]
        assert store.grades_for("00000000") == []

    def test_missing_column_is_an_error(self, tmp_path):
        bad = tmp_path / "schedules.tsv"
        bad.write_text("concentration\tcourse\tday\ttime\nx\ty\tz\tw\n", encoding="utf-8")
        with pytest.raises(ValueError, match="room"):
            RecordStore.from_files(bad, bundled_data_dir() / "grades.tsv")


class TestPrayerTimes:
    def test_pairs_follow_the_canonical_order(self):
        times = PrayerTimes(
            city="yogyakarta",
            date="2020-09-25",
            subuh="04:32",
            dzuhur="11:42",
            ashar="15:01",
            maghrib="17:38",
            isya="18:49",
        )
        assert [label for label, _ in times.as_pairs()] == list(PRAYER_LABELS)
        assert times.as_pairs()[0] == ("subuh", "04:32")

    def test_non_increasing_times_rejected(self):
        with pytest.raises(ValueError, match="not increasing"):
            PrayerTimes(
                city="x",
                date="2020-09-25",
                subuh="04:32",
                dzuhur="11:42",
                ashar="11:42",
                maghrib="17:38",
                isya="18:49",
            )

    def test_out_of_order_times_rejected(self):
        with pytest.raises(ValueError, match="not increasing"):
            PrayerTimes(
                city="x",
                date="2020-09-25",
                subuh="05:00",
                dzuhur="04:00",
                ashar="15:01",
                maghrib="17:38",
                isya="18:49",
            )


class TestFixtureClients:
    def test_prayer_lookup_by_city_and_day(self, prayer_client):
        times = prayer_client.times_for("yogyakarta", FIXED_DAY)
        assert times.city == "yogyakarta"
        assert times.date == "2020-09-25"
        assert times.subuh == "04:32"
        assert times.isya == "18:49"

    def test_prayer_lookup_ignores_case(self, prayer_client):
        assert prayer_client.times_for("Yogyakarta", FIXED_DAY).subuh == "04:32"

    def test_unknown_city_raises_client_error(self, prayer_client, weather_client):
        with pytest.raises(ClientError):
            prayer_client.times_for("atlantis", FIXED_DAY)
        with pytest.raises(ClientError):
            weather_client.weather_for("atlantis")

    def test_weather_lookup(self, weather_client):
        assert weather_client.weather_for("yogyakarta") == ("clear sky", 30.1)
        assert weather_client.weather_for("YOGYAKARTA") == ("clear sky", 30.1)


class TestTranslation:
    def test_known_phrases_translate(self):
        assert translate_weather_description("clear sky") == "langit cerah"
        assert translate_weather_description("Clear Sky") == "langit cerah"

    def test_unknown_phrases_pass_through(self):
        assert translate_weather_description("raining frogs") == "raining frogs"


class TestScheduleAction:
    def test_unset_slot_asks_for_the_concentration(self, domain, store):
        result = action_schedule_list(tracker_with(), domain, store)
        assert result.messages == [
            "boleh, konsentrasi program studi kamu apa? misalnya fd atau ds"
        ]

    def test_lists_the_schedule_for_the_slot_value(self, domain, store):
        result = action_schedule_list(
            tracker_with(concentration="digital forensic"), domain, store
        )
        assert result.messages == [
            "senin 08:00 analisis forensik digital (fti-301)\n"
            "rabu 10:00 keamanan jaringan (fti-204)\n"
            "jumat 13:00 investigasi siber (fti-105)"
        ]
        assert result.events == []

    def test_unknown_concentration_gets_a_not_found_message(self, domain, store):
        result = action_schedule_list(tracker_with(concentration="astrologi"), domain, store)
        assert result.messages == ["maaf, jadwal untuk konsentrasi astrologi tidak ditemukan"]


class TestGradeAction:
    def test_unset_slot_asks_for_the_nim(self, domain, store):
        result = action_grade_list(tracker_with(), domain, store)
        assert result.messages == ["boleh, berapa nim kamu?"]

    def test_lists_grades_for_the_nim(self, domain, store):
        result = action_grade_list(tracker_with(nim="18917101"), domain, store)
        assert result.messages == [
            "analisis forensik digital: A\n"
            "keamanan jaringan: A-\n"
            "investigasi siber: B+\n"
            "metodologi penelitian: A"
        ]

    def test_unknown_nim_gets_a_not_found_message(self, domain, store):
        result = action_grade_list(tracker_with(nim="99999999"), domain, store)
        assert result.messages == ["maaf, nilai untuk nim 99999999 tidak ditemukan"]


class TestWorshipAction:
    def test_unset_slot_asks_for_the_city(self, domain, prayer_client):
        result = action_worship_schedule(tracker_with(), domain, prayer_client)
        assert result.messages == ["untuk kota mana?"]

    def test_formats_the_five_daily_times(self, domain, prayer_client):
        result = action_worship_schedule(
            tracker_with(city="yogyakarta"), domain, prayer_client, clock=lambda: FIXED_DAY
        )
        assert result.messages == [
            "jadwal sholat yogyakarta (2020-09-25):\n"
            "subuh 04:32\n"
            "dzuhur 11:42\n"
            "ashar 15:01\n"
            "maghrib 17:38\n"
            "isya 18:49"
        ]

    def test_client_failure_becomes_unavailable_message(self, domain, prayer_client, caplog):
        import logging

        with caplog.at_level(logging.WARNING, logger="dialogforge.actions"):
            result = action_worship_schedule(
                tracker_with(city="atlantis"), domain, prayer_client, clock=lambda: FIXED_DAY
            )
        assert result.messages == [UNAVAILABLE_MESSAGE]
        assert "prayer lookup failed" in caplog.text


class TestWeatherAction:
    def test_unset_slot_asks_for_the_city(self, domain, weather_client):
        result = action_weather(tracker_with(), domain, weather_client)
        assert result.messages == ["untuk kota mana?"]

    def test_reports_translated_description_and_temperature(self, domain, weather_client):
        result = action_weather(tracker_with(city="yogyakarta"), domain, weather_client)
        assert result.messages == [
            "cuaca di yogyakarta saat ini langit cerah, suhu 30.1°C"
        ]

    def test_client_failure_becomes_unavailable_message(self, domain, weather_client, caplog):
        import logging

        with caplog.at_level(logging.WARNING, logger="dialogforge.actions"):
            result = action_weather(tracker_with(city="atlantis"), domain, weather_client)
        assert result.messages == [UNAVAILABLE_MESSAGE]
        assert "weather lookup failed" in caplog.text


class TestActionRegistry:
    def test_binds_exactly_the_four_custom_actions(
        self, domain, store, prayer_client, weather_client
    ):
        registry = build_action_registry(
            domain, store, prayer_client, weather_client, clock=lambda: FIXED_DAY
        )
        assert set(registry) == {
            "action_schedule_list",
            "action_grade_list",
            "action_worship_schedule",
            "action_weather",
        }

    def test_bound_actions_use_the_given_collaborators(
        self, domain, store, prayer_client, weather_client
    ):
        registry = build_action_registry(
            domain, store, prayer_client, weather_client, clock=lambda: FIXED_DAY
        )
        result = registry["action_worship_schedule"](tracker_with(city="solo"))
        assert result.messages[0].startswith("jadwal sholat solo (2020-09-25):")
        result = registry["action_weather"](tracker_with(city="yogyakarta"))
        assert "30.1°C" in result.messages[0]

    def test_registry_results_are_action_results(
        self, domain, store, prayer_client, weather_client
    ):
        registry = build_action_registry(domain, store, prayer_client, weather_client)
        for handler in registry.values():
            assert isinstance(handler(tracker_with()), ActionResult)
