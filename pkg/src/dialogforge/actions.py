"""Action execution: templated utterances, schedule and grade lookups
against a file-seeded store, and prayer-time/weather lookups through
pluggable clients (live HTTP or fixtures).

Custom actions never raise past their boundary: missing slots turn into
ask-messages, client failures into an unavailable-message, both logged.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from datetime import date
from importlib import resources
from string import Formatter
from typing import Callable

from .corpus import Domain
from .dialogue import DialogueTracker

log = logging.getLogger(__name__)

UNAVAILABLE_MESSAGE = "maaf, layanan tidak tersedia saat ini, coba lagi nanti ya"
PRAYER_LABELS = ("subuh", "dzuhur", "ashar", "maghrib", "isya")

# Indonesian weekday order for schedule listings
_DAY_ORDER = {day: i for i, day in enumerate(
    ["senin", "selasa", "rabu", "kamis", "jumat", "sabtu", "minggu"]
)}


class ClientError(Exception):
    """An external lookup failed (network, bad payload, unknown city)."""


@dataclass
class ActionResult:
    messages: list[str] = field(default_factory=list)
    events: list = field(default_factory=list)


def render_utterance(template: str, slots: dict) -> str:
    """Fill every {slot} placeholder; an unfilled slot is an error."""
    for _, name, _, _ in Formatter().parse(template):
        if name and slots.get(name) is None:
            raise KeyError(f"slot {name!r} is not set")
    return template.format(**{k: v for k, v in slots.items() if v is not None})


# ---------------------------------------------------------------------------
# record store


@dataclass(frozen=True)
class ScheduleRow:
    concentration: str
    course: str
    day: str
    time: str
    room: str


@dataclass(frozen=True)
class GradeRow:
    nim: str
    course: str
    grade: str


class RecordStore:
    """In-memory schedule and grade tables seeded from TSV files."""

    def __init__(self, schedules: list[ScheduleRow], grades: list[GradeRow]):
        self.schedules = tuple(schedules)
        self.grades = tuple(grades)

    @classmethod
    def from_files(cls, schedules_path, grades_path) -> "RecordStore":
        return cls(
            _read_tsv(schedules_path, ScheduleRow),
            _read_tsv(grades_path, GradeRow),
        )

    def schedules_for(self, concentration: str) -> list[ScheduleRow]:
        rows = [r for r in self.schedules if r.concentration.lower() == concentration.lower()]
        return sorted(rows, key=lambda r: (_DAY_ORDER.get(r.day.lower(), len(_DAY_ORDER)), r.time))

    def grades_for(self, nim: str) -> list[GradeRow]:
        return [r for r in self.grades if r.nim == nim]


def _read_tsv(path, row_type):
    fields = list(row_type.__dataclass_fields__)
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        missing = set(fields) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return [row_type(**{f: row[f] for f in fields}) for row in reader]


# ---------------------------------------------------------------------------
# external lookups


@dataclass(frozen=True)
class PrayerTimes:
    city: str
    date: str  # yyyy-mm-dd
    subuh: str
    dzuhur: str
    ashar: str
    maghrib: str
    isya: str

    def __post_init__(self):
        times = [getattr(self, label) for label in PRAYER_LABELS]
        minutes = []
        for value in times:
            hh, mm = value.split(":")
            minutes.append(int(hh) * 60 + int(mm))
        if minutes != sorted(minutes) or len(set(minutes)) != len(minutes):
            raise ValueError(f"prayer times not increasing: {times}")

    def as_pairs(self) -> list[tuple[str, str]]:
        return [(label, getattr(self, label)) for label in PRAYER_LABELS]


@dataclass(frozen=True)
class WeatherInfo:
    city: str
    description_en: str
    description_id: str
    temperature: float


class FixturePrayerClient:
    """Serves prayer times from a bundled city-keyed fixture mapping."""

    def __init__(self, fixtures: dict[str, dict[str, str]]):
        self._fixtures = {city.lower(): times for city, times in fixtures.items()}

    def times_for(self, city: str, day: date) -> PrayerTimes:
        times = self._fixtures.get(city.lower())
        if times is None:
            raise ClientError(f"no prayer fixture for city {city!r}")
        return PrayerTimes(city=city, date=day.isoformat(), **times)


class LivePrayerClient:  # pragma: no cover - needs network
    """Adapter for the public prayer-times API the fixtures mirror."""

    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def times_for(self, city: str, day: date) -> PrayerTimes:
        import requests

        url = f"{self.base_url}/sholat/format/json/jadwal/kota/{city}/tanggal/{day.isoformat()}"
        try:
            payload = requests.get(url, timeout=10).json()
            jadwal = payload["jadwal"]["data"]
            return PrayerTimes(
                city=city,
                date=day.isoformat(),
                subuh=jadwal["subuh"],
                dzuhur=jadwal["dzuhur"],
                ashar=jadwal["ashar"],
                maghrib=jadwal["maghrib"],
                isya=jadwal["isya"],
            )
        except Exception as exc:
            raise ClientError(f"prayer lookup failed for {city!r}: {exc}") from exc


class FixtureWeatherClient:
    def __init__(self, fixtures: dict[str, dict]):
        self._fixtures = {city.lower(): info for city, info in fixtures.items()}

    def weather_for(self, city: str) -> tuple[str, float]:
        info = self._fixtures.get(city.lower())
        if info is None:
            raise ClientError(f"no weather fixture for city {city!r}")
        return info["description"], float(info["temperature"])


class LiveWeatherClient:  # pragma: no cover - needs network
    BASE_URL = "https://api.openweathermap.org/data/2.5/weather"

    def __init__(self, api_key: str):
        self.api_key = api_key

    def weather_for(self, city: str) -> tuple[str, float]:
        import requests

        try:
            payload = requests.get(
                self.BASE_URL,
                params={"q": city, "appid": self.api_key, "units": "metric"},
                timeout=10,
            ).json()
            return payload["weather"][0]["description"], float(payload["main"]["temp"])
        except Exception as exc:
            raise ClientError(f"weather lookup failed for {city!r}: {exc}") from exc


_TRANSLATIONS: dict[str, str] | None = None


def _translation_table() -> dict[str, str]:
    global _TRANSLATIONS
    if _TRANSLATIONS is None:
        raw = resources.files("dialogforge.data").joinpath("weather_descriptions_id.json")
        _TRANSLATIONS = json.loads(raw.read_text(encoding="utf-8"))
    return _TRANSLATIONS


def translate_weather_description(description_en: str) -> str:
    """Map a standard weather-condition phrase to Indonesian; unknown
    phrases pass through unchanged."""
    return _translation_table().get(description_en.lower(), description_en)


# ---------------------------------------------------------------------------
# the four custom actions


def _ask(domain: Domain, action_name: str, slots: dict) -> ActionResult:
    templates = domain.templates.get(action_name, ())
    return ActionResult(messages=[render_utterance(t, slots) for t in templates])


def action_schedule_list(tracker: DialogueTracker, domain: Domain, store: RecordStore) -> ActionResult:
    concentration = tracker.slots.get("concentration")
    if concentration is None:
        return _ask(domain, "utter_asked_concentration_study_program", tracker.slots)
    rows = store.schedules_for(concentration)
    if not rows:
        return ActionResult(
            messages=[f"maaf, jadwal untuk konsentrasi {concentration} tidak ditemukan"]
        )
    lines = [f"{r.day} {r.time} {r.course} ({r.room})" for r in rows]
    return ActionResult(messages=["\n".join(lines)])


def action_grade_list(tracker: DialogueTracker, domain: Domain, store: RecordStore) -> ActionResult:
    nim = tracker.slots.get("nim")
    if nim is None:
        return _ask(domain, "utter_asked_nim", tracker.slots)
    rows = store.grades_for(nim)
    if not rows:
        return ActionResult(messages=[f"maaf, nilai untuk nim {nim} tidak ditemukan"])
    lines = [f"{r.course}: {r.grade}" for r in rows]
    return ActionResult(messages=["\n".join(lines)])


def action_worship_schedule(
    tracker: DialogueTracker,
    domain: Domain,
    client,
    clock: Callable[[], date] = date.today,
) -> ActionResult:
    city = tracker.slots.get("city")
    if city is None:
        return _ask(domain, "utter_asked_city", tracker.slots)
    try:
        times = client.times_for(city, clock())
    except Exception as exc:
        log.warning("prayer lookup failed: %s", exc)
        return ActionResult(messages=[UNAVAILABLE_MESSAGE])
    lines = [f"jadwal sholat {times.city} ({times.date}):"]
    lines.extend(f"{label} {value}" for label, value in times.as_pairs())
    return ActionResult(messages=["\n".join(lines)])


def action_weather(
    tracker: DialogueTracker,
    domain: Domain,
    client,
    translator: Callable[[str], str] = translate_weather_description,
) -> ActionResult:
    city = tracker.slots.get("city")
    if city is None:
        return _ask(domain, "utter_asked_city", tracker.slots)
    try:
        description_en, temperature = client.weather_for(city)
    except Exception as exc:
        log.warning("weather lookup failed: %s", exc)
        return ActionResult(messages=[UNAVAILABLE_MESSAGE])
    info = WeatherInfo(
        city=city,
        description_en=description_en,
        description_id=translator(description_en),
        temperature=temperature,
    )
    return ActionResult(
        messages=[f"cuaca di {info.city} saat ini {info.description_id}, suhu {info.temperature}°C"]
    )


def build_action_registry(
    domain: Domain,
    store: RecordStore,
    prayer_client,
    weather_client,
    clock: Callable[[], date] = date.today,
) -> dict[str, Callable[[DialogueTracker], ActionResult]]:
    """Bind the custom actions to their collaborators, keyed by the
    action names the policies predict."""
    return {
        "action_schedule_list": lambda t: action_schedule_list(t, domain, store),
        "action_grade_list": lambda t: action_grade_list(t, domain, store),
        "action_worship_schedule": lambda t: action_worship_schedule(
            t, domain, prayer_client, clock
        ),
        "action_weather": lambda t: action_weather(t, domain, weather_client),
    }
