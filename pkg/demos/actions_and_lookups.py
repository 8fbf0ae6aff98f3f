"""
Actions and lookups: records, prayer times, weather
===================================================

Runs each custom action against a hand-built tracker, backed by the
bundled record tables and offline lookup fixtures.
"""

import json
from datetime import date

from dialogforge import bundled_data_dir, load_bundle
from dialogforge.actions import (
    FixturePrayerClient,
    FixtureWeatherClient,
    RecordStore,
    action_grade_list,
    action_schedule_list,
    action_weather,
    action_worship_schedule,
    render_utterance,
    translate_weather_description,
)
from dialogforge.dialogue import DialogueTracker, SlotSet

data_dir = bundled_data_dir()
domain, _, _ = load_bundle(data_dir)

# the record store seeds from two TSV files
store = RecordStore.from_files(data_dir / "schedules.tsv", data_dir / "grades.tsv")
print(f"store: {len(store.schedules)} schedule rows, {len(store.grades)} grade rows")

rows = store.schedules_for("data science")
print("\ndata science courses, sorted by weekday then time:")
for row in rows:
    print(f"  {row.day:8s} {row.time}  {row.course} ({row.room})")

# lookup clients come in fixture and live flavors with one method each;
# the fixtures keep everything offline
prayer = FixturePrayerClient(json.loads((data_dir / "prayer_fixtures.json").read_text()))
weather = FixtureWeatherClient(json.loads((data_dir / "weather_fixtures.json").read_text()))

times = prayer.times_for("yogyakarta", date(2020, 9, 25))
print("\nprayer times for yogyakarta:")
for label, value in times.as_pairs():
    print(f"  {label:8s} {value}")

description, temp = weather.weather_for("yogyakarta")
print(f"\nweather: {description}, {temp}°C"
      f" -> '{translate_weather_description(description)}'")

# utterance templates fill from slots; a missing slot is a hard error
print("\n" + render_utterance("nilai untuk nim {nim}:", {"nim": "18917101"}))

# actions read their inputs off the tracker's slots
def tracker_with(**slots):
    tracker = DialogueTracker("demo")
    for name, value in slots.items():
        tracker.apply(SlotSet(name, value))
    return tracker

clock = lambda: date(2020, 9, 25)

# without the slot an action asks for it instead of failing
result = action_schedule_list(tracker_with(), domain, store)
print("\nno concentration slot ->", result.messages[0])

result = action_schedule_list(tracker_with(concentration="digital forensic"), domain, store)
print("\nwith the slot filled:")
print(result.messages[0])

result = action_grade_list(tracker_with(nim="18917101"), domain, store)
print("\ngrades for 18917101:")
print(result.messages[0])

result = action_worship_schedule(tracker_with(city="yogyakarta"), domain, prayer, clock)
print("\n" + result.messages[0])

result = action_weather(tracker_with(city="yogyakarta"), domain, weather)
print("\n" + result.messages[0])
