"""End-to-end assembly: train every model from a corpus bundle, persist
the results as a model directory, and wire a ready-to-serve engine.

A model directory holds five files: ``domain.json`` plus one container
per model (``intent.model``, ``entity.model``, ``memo.model``,
``policy.model``). Training is deterministic for a fixed seed, so two
runs over the same bundle produce byte-identical directories.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import date
from importlib import resources
from pathlib import Path

from .actions import (
    FixturePrayerClient,
    FixtureWeatherClient,
    LivePrayerClient,
    LiveWeatherClient,
    RecordStore,
    build_action_registry,
)
from .corpus import Domain, Story, UtteranceExample, load_bundle, parse_domain, serialize_domain
from .dialogue import (
    Engine,
    MemoModel,
    PolicyConfig,
    RnnPolicyModel,
    load_memo_model,
    load_rnn_model,
    memo_train,
    rnn_train,
    save_memo_model,
    save_rnn_model,
    stories_to_training,
)
from .entity import CrfConfig, CrfModel, load_crf_model, save_crf_model, train_crf
from .intent import IntentConfig, IntentModel, load_intent_model, save_intent_model, train_intent

DEFAULT_SEED = 7

_DOMAIN_FILE = "domain.json"
_MODEL_FILES = {
    "intent": "intent.model",
    "entity": "entity.model",
    "memo": "memo.model",
    "policy": "policy.model",
}

PRAYER_API_BASE = "https://api.banghasan.com"


@dataclass
class TrainedModels:
    """The four trained models plus the domain they were trained against."""

    domain: Domain
    intent_model: IntentModel
    crf_model: CrfModel
    memo: MemoModel
    rnn: RnnPolicyModel


def bundled_data_dir() -> Path:
    """Directory of the corpus and fixtures shipped inside the package."""
    return Path(str(resources.files("dialogforge") / "data"))


def train_pipeline(
    data_dir: str | Path | None = None,
    seed: int = DEFAULT_SEED,
    intent_config: IntentConfig | None = None,
    crf_config: CrfConfig | None = None,
    policy_config: PolicyConfig | None = None,
) -> TrainedModels:
    """Train intent classifier, entity extractor and both policies from
    the bundle under ``data_dir`` (the packaged corpus by default)."""
    domain, stories, examples = load_bundle(data_dir or bundled_data_dir())
    intent_model = train_intent(examples, domain, config=intent_config, seed=seed)
    crf_model = train_crf(examples, domain, config=crf_config)
    config = policy_config or PolicyConfig()
    samples = stories_to_training(stories, domain, max_history=config.max_history)
    memo = memo_train(samples, domain.actions, max_history=config.max_history)
    rnn = rnn_train(samples, domain.actions, config=config, seed=seed)
    return TrainedModels(
        domain=domain, intent_model=intent_model, crf_model=crf_model, memo=memo, rnn=rnn
    )


def save_models(models: TrainedModels, model_dir: str | Path) -> None:
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    (model_dir / _DOMAIN_FILE).write_text(serialize_domain(models.domain), encoding="utf-8")
    save_intent_model(models.intent_model, model_dir / _MODEL_FILES["intent"])
    save_crf_model(models.crf_model, model_dir / _MODEL_FILES["entity"])
    save_memo_model(models.memo, model_dir / _MODEL_FILES["memo"])
    save_rnn_model(models.rnn, model_dir / _MODEL_FILES["policy"])


def load_models(model_dir: str | Path) -> TrainedModels:
    model_dir = Path(model_dir)
    missing = [
        name
        for name in [_DOMAIN_FILE, *_MODEL_FILES.values()]
        if not (model_dir / name).is_file()
    ]
    if missing:
        raise FileNotFoundError(f"model directory {model_dir} is missing {', '.join(missing)}")
    domain = parse_domain((model_dir / _DOMAIN_FILE).read_text(encoding="utf-8"))
    return TrainedModels(
        domain=domain,
        intent_model=load_intent_model(model_dir / _MODEL_FILES["intent"]),
        crf_model=load_crf_model(model_dir / _MODEL_FILES["entity"]),
        memo=load_memo_model(model_dir / _MODEL_FILES["memo"]),
        rnn=load_rnn_model(model_dir / _MODEL_FILES["policy"]),
    )


def _load_fixture(data_dir: Path, name: str) -> dict:
    return json.loads((data_dir / name).read_text(encoding="utf-8"))


def build_engine(
    models: TrainedModels,
    data_dir: str | Path | None = None,
    offline_fixtures: bool = True,
    clock=date.today,
    log_dir: str | None = None,
) -> Engine:
    """Attach the records store, external clients and action registry to
    the trained models. ``offline_fixtures`` swaps the live prayer and
    weather clients for the bundled canned responses."""
    data_dir = Path(data_dir) if data_dir else bundled_data_dir()
    store = RecordStore.from_files(data_dir / "schedules.tsv", data_dir / "grades.tsv")
    if offline_fixtures:
        prayer_client = FixturePrayerClient(_load_fixture(data_dir, "prayer_fixtures.json"))
        weather_client = FixtureWeatherClient(_load_fixture(data_dir, "weather_fixtures.json"))
    else:  # pragma: no cover - needs network
        prayer_client = LivePrayerClient(PRAYER_API_BASE)
        weather_client = LiveWeatherClient(os.environ.get("OPENWEATHER_API_KEY", ""))
    registry = build_action_registry(models.domain, store, prayer_client, weather_client, clock)
    return Engine(
        domain=models.domain,
        intent_model=models.intent_model,
        crf_model=models.crf_model,
        memo=models.memo,
        rnn=models.rnn,
        custom_actions=registry,
        log_dir=log_dir,
    )
