"""Regenerate the bundled data files under src/dialogforge/data/.

The corpus is simulated university-enquiry chat in informal Indonesian.
Its shape is load-bearing: tests assert the exact per-intent example
counts and per-type entity annotation counts, so this script asserts
them too and refuses to write anything inconsistent.

Run from the repository root:  python tools/make_corpus.py
"""

from __future__ import annotations

import json
import sys
import warnings
from collections import Counter
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from dialogforge.corpus import (  # noqa: E402
    parse_domain,
    parse_nlu_corpus,
    parse_stories,
    serialize_domain,
    serialize_nlu_corpus,
    serialize_stories,
    validate,
)
from dialogforge.dialogue import memo_train, stories_to_training  # noqa: E402
from dialogforge.entity import spans_to_bio  # noqa: E402
from dialogforge.textproc import tokenize  # noqa: E402

DATA_DIR = ROOT / "src" / "dialogforge" / "data"

# study programs mentioned in schedule chatter (entity type "program")
PROGRAMS = [
    "informatika",
    "sistem informasi",
    "teknik industri",
    "teknik kimia",
    "teknik elektro",
    "teknik mesin",
    "teknik sipil",
    "manajemen",
    "akuntansi",
    "farmasi",
    "psikologi",
    "statistika",
    "arsitektur",
    "hukum",
    "kedokteran",
]

SINGLE_TEMPLATES = [
    "jadwal kuliah {a} dong",
    "minta jadwal {a} ya",
    "kapan jadwal kelas {a}",
    "jadwal {a} minggu ini gimana",
    "mau lihat jadwal {a}",
    "jadwal kuliah untuk {a} apa saja",
    "tolong kirim jadwal {a}",
    "jadwal {a} hari senin apa saja",
    "boleh minta jadwal {a}",
    "jadwal perkuliahan {a} gimana ya",
    "lihat jadwal {a} dong kak",
    "jadwal {a} besok apa",
    "info jadwal {a} ya kak",
    "jadwalnya {a} kapan saja",
]

DUAL_TEMPLATES = [
    "jadwal {a} dan {b} dong",
    "minta jadwal {a} sama {b} ya",
    "jadwal kelas {a} dan {b} apa",
    "mau jadwal {a} juga {b}",
    "kirim jadwal {a} dan {b} kak",
    "jadwal minggu ini {a} dan {b}",
    "jadwal {a} dengan {b} gimana",
    "cek jadwal {a} dan {b} ya",
]

TRIPLE_TEMPLATES = [
    "jadwal {a} {b} dan {c} sekalian ya",
    "minta jadwal {a} {b} sama {c} dong",
    "jadwal kelas {a} {b} dan {c} minggu ini",
    "kirim jadwal {a} {b} dan {c} kak",
    "cek jadwal {a} {b} juga {c} ya",
]

PLAIN_SCHEDULE = [
    "jadwal kuliah dong",
    "minta jadwal kuliah ya",
    "jadwal kelas besok apa",
    "mau tanya jadwal kuliah",
    "kapan jadwal kuliahnya",
    "jadwal perkuliahan minggu depan gimana",
]


def mark(surface: str, etype: str) -> str:
    return f"[{surface}]({etype})"


def schedule_examples() -> list[tuple[str, str]]:
    """100 schedule requests: 42 single-, 32 dual-, 20 triple-program
    mentions plus 6 without any entity (166 program annotations)."""
    out = []
    for i, template in enumerate(SINGLE_TEMPLATES):
        for j in range(3):
            program = PROGRAMS[(i * 3 + j) % len(PROGRAMS)]
            out.append(template.format(a=mark(program, "program")))
    for k in range(32):
        template = DUAL_TEMPLATES[k % len(DUAL_TEMPLATES)]
        a = PROGRAMS[(2 * k) % len(PROGRAMS)]
        b = PROGRAMS[(2 * k + 1) % len(PROGRAMS)]
        out.append(template.format(a=mark(a, "program"), b=mark(b, "program")))
    for k in range(20):
        template = TRIPLE_TEMPLATES[k % len(TRIPLE_TEMPLATES)]
        base = (3 * k + k // 5) % len(PROGRAMS)
        a, b, c = (PROGRAMS[(base + n) % len(PROGRAMS)] for n in range(3))
        out.append(
            template.format(
                a=mark(a, "program"), b=mark(b, "program"), c=mark(c, "program")
            )
        )
    out.extend(PLAIN_SCHEDULE)
    return [("requests_a_schedule", text) for text in out]


def handwritten_examples() -> list[tuple[str, str]]:
    conc = lambda s: mark(s, "concentration")  # noqa: E731
    city = lambda s: mark(s, "city")  # noqa: E731
    nim = lambda s: mark(s, "NIM")  # noqa: E731
    return [
        ("agreed", "iya"),
        ("agreed", "ya boleh"),
        ("agreed", "oke sip"),
        ("agreed", "boleh banget"),
        ("agreed", "iya betul"),
        ("agreed", "setuju"),
        ("goodbye", "sampai jumpa"),
        ("goodbye", "dadah bot"),
        ("goodbye", "selamat tinggal"),
        ("muslim_greeting", "assalamu alaikum"),
        ("muslim_greeting", "assalamu alaikum wr wb"),
        ("muslim_greeting", "assalamu alaikum bot"),
        ("mood_unhappy", "aku sedih banget"),
        ("mood_unhappy", "lagi galau nih"),
        ("mood_unhappy", "kesal banget hari ini menyebalkan"),
        ("only_request_a_schedule", f"schedule {conc('ds')}"),
        ("only_request_a_schedule", f"{conc('fd')}"),
        (
            "only_request_a_schedule",
            f"jadwal {conc('fd')} dan {conc('ds')} sekalian dong",
        ),
        (
            "only_request_a_schedule",
            f"minta jadwal konsentrasi {conc('digital forensic')} sama {conc('sains data')}",
        ),
        ("weather_forecast", "cuaca hari ini gimana"),
        ("weather_forecast", "besok hujan nggak ya"),
        ("weather_forecast", f"cuaca di {city('jogja')} gimana"),
        ("weather_forecast", f"ramalan cuaca {city('bandung')} dong"),
        ("weather_forecast", f"cuaca {city('jakarta')} dan {city('surabaya')} hari ini"),
        ("request_a_worship_schedule", "jadwal sholat hari ini dong"),
        ("request_a_worship_schedule", "jam berapa adzan maghrib"),
        ("request_a_worship_schedule", "minta jadwal sholat ya"),
        ("request_a_worship_schedule", "kapan waktu sholat subuh"),
        ("request_a_worship_schedule", f"jadwal sholat di {city('yogyakarta')} dong"),
        ("request_a_worship_schedule", f"jadwal sholat {city('jakarta')} hari ini"),
        ("request_a_worship_schedule", f"jam sholat di {city('bandung')} berapa"),
        ("request_a_worship_schedule", f"minta jadwal sholat untuk {city('surabaya')}"),
        ("request_a_worship_schedule", f"waktu adzan di {city('semarang')} kapan"),
        ("request_a_worship_schedule", f"jadwal sholat kota {city('solo')} dong"),
        (
            "request_a_worship_schedule",
            f"jadwal sholat {city('jogja')} sama {city('jakarta')} dong",
        ),
        ("mood_happy", "senang sekali hari ini"),
        ("mood_happy", "aku bahagia banget"),
        ("mood_happy", "alhamdulillah lulus ujian aku gembira"),
        ("mood_happy", "hatiku senang hari ini"),
        ("greeting", "halo"),
        ("greeting", "hai bot"),
        ("greeting", "hi apa kabar"),
        ("greeting", "halo selamat pagi"),
        ("greeting", "halo assalamu alaikum kak"),
        ("greeting", f"hai saya anak {mark('manajemen', 'program')} mau tanya"),
        ("greeting", f"halo saya mahasiswa {mark('informatika', 'program')}"),
        ("thanks", "makasih ya"),
        ("thanks", "terima kasih banyak"),
        ("request_grade_score", "nilai saya berapa ya"),
        ("request_grade_score", "minta daftar nilai semester ini"),
        ("request_grade_score", "skor nilaiku gimana"),
        ("request_grade_score", f"nim saya {nim('18917101')}"),
        ("request_grade_score", f"nilai untuk nim {nim('18917102')} dong"),
        ("request_grade_score", f"cek nilai nim {nim('17523099')} ya"),
        (
            "request_grade_score",
            f"nilai kuliah konsentrasi {conc('digital forensic')} berapa",
        ),
        ("request_grade_score", f"skor mata kuliah {conc('data science')} saya gimana"),
        ("request_grade_score", f"nilai konsentrasi {conc('sains data')} semester ini"),
        (
            "request_grade_score",
            f"berapa nilai konsentrasi {conc('forensika digital')} punyaku",
        ),
        ("refuse", "tidak usah"),
        ("refuse", "nggak dulu deh"),
        ("refuse", "jangan sekarang"),
        ("challenge_bot", "kamu manusia atau bot"),
        ("challenge_bot", "kamu robot ya"),
        ("challenge_bot", f"kamu bot tau apa soal {mark('akuntansi', 'program')}"),
        ("challenge_bot", f"memang kamu bot paham {mark('statistika', 'program')}"),
    ]


EXPECTED_INTENT_COUNTS = {
    "agreed": 6,
    "requests_a_schedule": 100,
    "goodbye": 3,
    "muslim_greeting": 3,
    "mood_unhappy": 3,
    "only_request_a_schedule": 4,
    "weather_forecast": 5,
    "request_a_worship_schedule": 11,
    "mood_happy": 4,
    "greeting": 7,
    "thanks": 2,
    "request_grade_score": 10,
    "refuse": 3,
    "challenge_bot": 4,
}

EXPECTED_ENTITY_COUNTS = {"concentration": 10, "program": 170, "city": 12, "NIM": 3}


DOMAIN = {
    "intents": [
        "agreed",
        "requests_a_schedule",
        "goodbye",
        "muslim_greeting",
        "mood_unhappy",
        "only_request_a_schedule",
        "weather_forecast",
        "request_a_worship_schedule",
        "mood_happy",
        "greeting",
        "thanks",
        "request_grade_score",
        "refuse",
        "challenge_bot",
    ],
    "entities": ["concentration", "program", "city", "NIM"],
    "slots": [
        {"name": "concentration", "type": "text"},
        {"name": "city", "type": "text"},
        {"name": "nim", "type": "text"},
    ],
    "actions": [
        "action_schedule_list",
        "utter_did_it_help",
        "utter_goodbye",
        "utter_salam_replies",
        "utter_say_hello",
        "utter_cheers",
        "utter_im_bot",
        "utter_happy",
        "utter_asked_concentration_study_program",
        "utter_thank_you",
        "utter_asked_nim",
        "action_grade_list",
        "utter_asked_city",
        "action_worship_schedule",
        "action_weather",
        "utter_default",
    ],
    "templates": {
        "utter_say_hello": ["halo! ada yang bisa saya bantu?"],
        "utter_salam_replies": ["wa alaikumsalam, ada yang bisa saya bantu?"],
        "utter_goodbye": ["sampai jumpa, semoga harimu lancar!"],
        "utter_thank_you": ["sama-sama, senang bisa membantu!"],
        "utter_cheers": ["semangat ya, semoga harimu menyenangkan!"],
        "utter_did_it_help": ["baik, semoga jawabannya membantu ya"],
        "utter_happy": ["wah, ikut senang mendengarnya!"],
        "utter_im_bot": [
            "saya bot asisten kampus, bisa bantu jadwal kuliah, nilai, "
            "jadwal sholat, dan info cuaca"
        ],
        "utter_asked_concentration_study_program": [
            "boleh, konsentrasi program studi kamu apa? misalnya fd atau ds"
        ],
        "utter_asked_nim": ["boleh, berapa nim kamu?"],
        "utter_asked_city": ["untuk kota mana?"],
        "utter_default": ["maaf, saya belum paham maksudnya, bisa diulangi?"],
    },
    "synonyms": {
        "fd": "digital forensic",
        "ds": "data science",
        "forensika digital": "digital forensic",
        "sains data": "data science",
        "jogja": "yogyakarta",
    },
}


def user(intent: str, **entities) -> dict:
    step: dict = {"intent": intent}
    if entities:
        step["entities"] = entities
    return {"user": step}


def bot(action: str) -> dict:
    return {"bot": action}


STORIES = [
    {"name": "greet", "steps": [user("greeting"), bot("utter_say_hello")]},
    {"name": "salam", "steps": [user("muslim_greeting"), bot("utter_salam_replies")]},
    {"name": "farewell", "steps": [user("goodbye"), bot("utter_goodbye")]},
    {"name": "thank", "steps": [user("thanks"), bot("utter_thank_you")]},
    {"name": "agree", "steps": [user("agreed"), bot("utter_thank_you")]},
    {"name": "no_thanks", "steps": [user("refuse"), bot("utter_did_it_help")]},
    {"name": "good_mood", "steps": [user("mood_happy"), bot("utter_happy")]},
    {"name": "cheer_up", "steps": [user("mood_unhappy"), bot("utter_cheers")]},
    {"name": "who_are_you", "steps": [user("challenge_bot"), bot("utter_im_bot")]},
    {
        "name": "schedule_ask",
        "steps": [
            user("requests_a_schedule"),
            bot("utter_asked_concentration_study_program"),
        ],
    },
    {
        "name": "schedule_one_shot",
        "steps": [
            user("only_request_a_schedule", concentration="digital forensic"),
            bot("action_schedule_list"),
        ],
    },
    {
        "name": "grade_one_shot",
        "steps": [
            user("request_grade_score", NIM="18917101"),
            bot("action_grade_list"),
        ],
    },
    {
        "name": "worship_one_shot",
        "steps": [
            user("request_a_worship_schedule", city="yogyakarta"),
            bot("action_worship_schedule"),
        ],
    },
    {
        "name": "weather_one_shot",
        "steps": [user("weather_forecast", city="yogyakarta"), bot("action_weather")],
    },
    {
        "name": "schedule_with_program",
        "steps": [
            user("requests_a_schedule", program="informatika"),
            bot("utter_asked_concentration_study_program"),
        ],
    },
    {
        "name": "schedule_with_concentration",
        "steps": [
            user("requests_a_schedule", concentration="digital forensic"),
            bot("action_schedule_list"),
        ],
    },
    {
        "name": "schedule_program_then_concentration",
        "steps": [
            user("requests_a_schedule", program="informatika"),
            bot("utter_asked_concentration_study_program"),
            user("only_request_a_schedule", concentration="digital forensic"),
            bot("action_schedule_list"),
        ],
    },
    {
        "name": "lecture_schedule_flow",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("requests_a_schedule"),
            bot("utter_asked_concentration_study_program"),
            user("only_request_a_schedule", concentration="digital forensic"),
            bot("action_schedule_list"),
            user("thanks"),
            bot("utter_thank_you"),
            user("goodbye"),
            bot("utter_goodbye"),
        ],
    },
    {
        "name": "lecture_schedule_ds",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("requests_a_schedule"),
            bot("utter_asked_concentration_study_program"),
            user("only_request_a_schedule", concentration="data science"),
            bot("action_schedule_list"),
        ],
    },
    {
        "name": "schedule_direct_after_greet",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("only_request_a_schedule", concentration="data science"),
            bot("action_schedule_list"),
            user("goodbye"),
            bot("utter_goodbye"),
        ],
    },
    {
        "name": "grade_flow",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("request_grade_score"),
            bot("utter_asked_nim"),
            user("request_grade_score", NIM="18917101"),
            bot("action_grade_list"),
            user("thanks"),
            bot("utter_thank_you"),
        ],
    },
    {
        "name": "grade_short",
        "steps": [
            user("request_grade_score"),
            bot("utter_asked_nim"),
            user("request_grade_score", NIM="18917101"),
            bot("action_grade_list"),
        ],
    },
    {
        "name": "worship_flow",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("request_a_worship_schedule"),
            bot("utter_asked_city"),
            user("request_a_worship_schedule", city="yogyakarta"),
            bot("action_worship_schedule"),
            user("thanks"),
            bot("utter_thank_you"),
        ],
    },
    {
        "name": "worship_short",
        "steps": [
            user("request_a_worship_schedule"),
            bot("utter_asked_city"),
            user("request_a_worship_schedule", city="yogyakarta"),
            bot("action_worship_schedule"),
        ],
    },
    {
        "name": "weather_flow",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("weather_forecast"),
            bot("utter_asked_city"),
            user("weather_forecast", city="yogyakarta"),
            bot("action_weather"),
            user("thanks"),
            bot("utter_thank_you"),
            user("goodbye"),
            bot("utter_goodbye"),
        ],
    },
    {
        "name": "weather_short",
        "steps": [
            user("weather_forecast"),
            bot("utter_asked_city"),
            user("weather_forecast", city="yogyakarta"),
            bot("action_weather"),
        ],
    },
    {
        "name": "salam_schedule",
        "steps": [
            user("muslim_greeting"),
            bot("utter_salam_replies"),
            user("requests_a_schedule"),
            bot("utter_asked_concentration_study_program"),
            user("only_request_a_schedule", concentration="digital forensic"),
            bot("action_schedule_list"),
            user("goodbye"),
            bot("utter_goodbye"),
        ],
    },
    {
        "name": "sad_then_thanks",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("mood_unhappy"),
            bot("utter_cheers"),
            user("thanks"),
            bot("utter_thank_you"),
        ],
    },
    {
        "name": "happy_then_bye",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("mood_happy"),
            bot("utter_happy"),
            user("goodbye"),
            bot("utter_goodbye"),
        ],
    },
    {
        "name": "bot_challenge_agreed",
        "steps": [
            user("challenge_bot"),
            bot("utter_im_bot"),
            user("agreed"),
            bot("utter_thank_you"),
        ],
    },
    {
        "name": "refuse_after_ask",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("requests_a_schedule"),
            bot("utter_asked_concentration_study_program"),
            user("refuse"),
            bot("utter_did_it_help"),
            user("goodbye"),
            bot("utter_goodbye"),
        ],
    },
    {
        "name": "weather_then_agreed",
        "steps": [
            user("greeting"),
            bot("utter_say_hello"),
            user("weather_forecast", city="yogyakarta"),
            bot("action_weather"),
            user("agreed"),
            bot("utter_thank_you"),
        ],
    },
    {
        "name": "campus_tour",
        "steps": [
            user("muslim_greeting"),
            bot("utter_salam_replies"),
            user("request_grade_score", NIM="18917101"),
            bot("action_grade_list"),
            user("request_a_worship_schedule", city="yogyakarta"),
            bot("action_worship_schedule"),
            user("weather_forecast", city="yogyakarta"),
            bot("action_weather"),
            user("goodbye"),
            bot("utter_goodbye"),
        ],
    },
]


SCHEDULES_TSV = """concentration\tcourse\tday\ttime\troom
digital forensic\tanalisis forensik digital\tsenin\t08:00\tfti-301
digital forensic\tkeamanan jaringan\trabu\t10:00\tfti-204
digital forensic\tinvestigasi siber\tjumat\t13:00\tfti-105
data science\tdasar sains data\tsenin\t09:00\tfti-210
data science\tpembelajaran mesin\tselasa\t10:00\tfti-302
data science\tstatistika lanjut\tkamis\t08:00\tfti-101
data science\tvisualisasi data\tjumat\t10:00\tfti-220
"""

GRADES_TSV = """nim\tcourse\tgrade
18917101\tanalisis forensik digital\tA
18917101\tkeamanan jaringan\tA-
18917101\tinvestigasi siber\tB+
18917101\tmetodologi penelitian\tA
18917102\tdasar sains data\tA
18917102\tpembelajaran mesin\tB+
17523099\tstatistika lanjut\tA-
17523099\tvisualisasi data\tA
"""

PRAYER_FIXTURES = {
    "yogyakarta": {"subuh": "04:32", "dzuhur": "11:42", "ashar": "15:01", "maghrib": "17:38", "isya": "18:49"},
    "jakarta": {"subuh": "04:36", "dzuhur": "11:54", "ashar": "15:15", "maghrib": "17:48", "isya": "19:00"},
    "bandung": {"subuh": "04:33", "dzuhur": "11:50", "ashar": "15:11", "maghrib": "17:45", "isya": "18:57"},
    "surabaya": {"subuh": "04:12", "dzuhur": "11:31", "ashar": "14:52", "maghrib": "17:28", "isya": "18:40"},
    "semarang": {"subuh": "04:22", "dzuhur": "11:40", "ashar": "15:00", "maghrib": "17:36", "isya": "18:48"},
    "solo": {"subuh": "04:26", "dzuhur": "11:42", "ashar": "15:02", "maghrib": "17:38", "isya": "18:50"},
}

WEATHER_FIXTURES = {
    "yogyakarta": {"description": "clear sky", "temperature": 30.1},
    "jakarta": {"description": "scattered clouds", "temperature": 31.4},
    "bandung": {"description": "light rain", "temperature": 24.6},
    "surabaya": {"description": "broken clouds", "temperature": 32.2},
    "semarang": {"description": "haze", "temperature": 30.8},
    "solo": {"description": "few clouds", "temperature": 30.4},
}

WEATHER_DESCRIPTIONS_ID = {
    "clear sky": "langit cerah",
    "few clouds": "sedikit berawan",
    "scattered clouds": "awan tersebar",
    "broken clouds": "berawan sebagian",
    "overcast clouds": "berawan tebal",
    "mist": "berkabut tipis",
    "smoke": "berasap",
    "haze": "berkabut asap",
    "fog": "berkabut",
    "sand": "berpasir",
    "dust": "berdebu",
    "volcanic ash": "abu vulkanik",
    "squalls": "angin kencang",
    "tornado": "angin puting beliung",
    "sand/dust whirls": "pusaran pasir dan debu",
    "light rain": "hujan ringan",
    "moderate rain": "hujan sedang",
    "heavy intensity rain": "hujan lebat",
    "very heavy rain": "hujan sangat lebat",
    "extreme rain": "hujan ekstrem",
    "freezing rain": "hujan beku",
    "light intensity shower rain": "hujan gerimis ringan",
    "shower rain": "hujan deras singkat",
    "heavy intensity shower rain": "hujan deras lebat",
    "ragged shower rain": "hujan deras tidak merata",
    "light intensity drizzle": "gerimis ringan",
    "drizzle": "gerimis",
    "heavy intensity drizzle": "gerimis lebat",
    "light intensity drizzle rain": "hujan gerimis halus",
    "drizzle rain": "hujan gerimis",
    "heavy intensity drizzle rain": "hujan gerimis lebat",
    "shower rain and drizzle": "hujan singkat dan gerimis",
    "heavy shower rain and drizzle": "hujan singkat lebat dan gerimis",
    "shower drizzle": "gerimis singkat",
    "thunderstorm with light rain": "badai petir dengan hujan ringan",
    "thunderstorm with rain": "badai petir dengan hujan",
    "thunderstorm with heavy rain": "badai petir dengan hujan lebat",
    "light thunderstorm": "badai petir ringan",
    "thunderstorm": "badai petir",
    "heavy thunderstorm": "badai petir hebat",
    "ragged thunderstorm": "badai petir tidak merata",
    "thunderstorm with light drizzle": "badai petir dengan gerimis ringan",
    "thunderstorm with drizzle": "badai petir dengan gerimis",
    "thunderstorm with heavy drizzle": "badai petir dengan gerimis lebat",
    "light snow": "salju ringan",
    "snow": "salju",
    "heavy snow": "salju lebat",
    "sleet": "hujan es",
    "light shower sleet": "hujan es ringan singkat",
    "shower sleet": "hujan es singkat",
    "light rain and snow": "hujan ringan dan salju",
    "rain and snow": "hujan dan salju",
    "light shower snow": "salju singkat ringan",
    "shower snow": "salju singkat",
    "heavy shower snow": "salju singkat lebat",
}

MESSENGER_FIXTURES = {
    "text_message": {
        "object": "page",
        "entry": [
            {
                "id": "1122334455",
                "time": 1601000000000,
                "messaging": [
                    {
                        "sender": {"id": "9001"},
                        "recipient": {"id": "1122334455"},
                        "timestamp": 1601000000000,
                        "message": {"mid": "mid.fixture.1", "text": "halo"},
                    }
                ],
            }
        ],
    },
    "postback": {
        "object": "page",
        "entry": [
            {
                "id": "1122334455",
                "time": 1601000001000,
                "messaging": [
                    {
                        "sender": {"id": "9002"},
                        "recipient": {"id": "1122334455"},
                        "timestamp": 1601000001000,
                        "postback": {"title": "mulai", "payload": "halo"},
                    }
                ],
            }
        ],
    },
    "delivery_only": {
        "object": "page",
        "entry": [
            {
                "id": "1122334455",
                "time": 1601000002000,
                "messaging": [
                    {
                        "sender": {"id": "9003"},
                        "recipient": {"id": "1122334455"},
                        "timestamp": 1601000002000,
                        "delivery": {"mids": ["mid.fixture.1"], "watermark": 1601000000000},
                    }
                ],
            }
        ],
    },
}


def check_corpus(domain, stories, examples) -> None:
    intent_counts = Counter(ex.intent for ex in examples)
    assert intent_counts == Counter(EXPECTED_INTENT_COUNTS), intent_counts
    assert sum(intent_counts.values()) == 165

    entity_counts = Counter(a.entity_type for ex in examples for a in ex.entities)
    assert entity_counts == Counter(EXPECTED_ENTITY_COUNTS), entity_counts
    assert sum(entity_counts.values()) == 195

    texts = [ex.text for ex in examples]
    assert len(texts) == len(set(texts)), "duplicate example texts"

    for ex in examples:
        spans_to_bio(tokenize(ex.text), ex.entities)  # raises if misaligned
        annotated = {(a.start, a.end) for a in ex.entities}
        for tok in tokenize(ex.text):
            inside = any(s <= tok.start and tok.end <= e for s, e in annotated)
            if tok.surface in ("fd", "ds") and not inside:
                raise AssertionError(f"unannotated fd/ds in {ex.text!r}")
            if tok.surface.isdigit() and not inside:
                raise AssertionError(f"unannotated number in {ex.text!r}")

    report = validate(domain, stories, examples)
    assert report.ok, report.errors
    assert not report.warnings, report.warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        samples = stories_to_training(stories, domain)
        memo_train(samples, domain.actions)  # warns on conflicting stories

    listens = sum(1 for _, label in samples if domain.actions[label] == "action_listen")
    others = Counter(label for _, label in samples)
    busiest = max(others.values())
    assert listens == busiest and list(others.values()).count(busiest) == 1


def main() -> None:
    examples_raw = schedule_examples() + handwritten_examples()
    nlu_doc = (
        json.dumps(
            [{"intent": intent, "text": text} for intent, text in examples_raw],
            indent=2,
            ensure_ascii=False,
        )
        + "\n"
    )
    stories_doc = json.dumps(STORIES, indent=2, ensure_ascii=False) + "\n"
    domain_doc = json.dumps(DOMAIN, indent=2, ensure_ascii=False) + "\n"

    examples = parse_nlu_corpus(nlu_doc)
    stories = parse_stories(stories_doc)
    domain = parse_domain(domain_doc)
    check_corpus(domain, stories, examples)

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    (DATA_DIR / "nlu.json").write_text(serialize_nlu_corpus(examples), encoding="utf-8")
    (DATA_DIR / "stories.json").write_text(serialize_stories(stories), encoding="utf-8")
    (DATA_DIR / "domain.json").write_text(serialize_domain(domain), encoding="utf-8")
    (DATA_DIR / "schedules.tsv").write_text(SCHEDULES_TSV, encoding="utf-8")
    (DATA_DIR / "grades.tsv").write_text(GRADES_TSV, encoding="utf-8")
    for name, payload in [
        ("prayer_fixtures.json", PRAYER_FIXTURES),
        ("weather_fixtures.json", WEATHER_FIXTURES),
        ("weather_descriptions_id.json", WEATHER_DESCRIPTIONS_ID),
        ("messenger_fixtures.json", MESSENGER_FIXTURES),
    ]:
        (DATA_DIR / name).write_text(
            json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    print(f"wrote {len(examples)} examples, {len(stories)} stories -> {DATA_DIR}")


if __name__ == "__main__":
    main()
