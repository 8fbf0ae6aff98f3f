"""Shared fixtures: the bundled corpus, and models trained once per session."""

from datetime import date

import pytest

from dialogforge.corpus import load_bundle
from dialogforge.pipeline import build_engine, bundled_data_dir, train_pipeline

FIXED_DAY = date(2020, 9, 25)


@pytest.fixture(scope="session")
def bundle():
    return load_bundle(bundled_data_dir())


@pytest.fixture(scope="session")
def domain(bundle):
    return bundle[0]


@pytest.fixture(scope="session")
def stories(bundle):
    return bundle[1]


@pytest.fixture(scope="session")
def examples(bundle):
    return bundle[2]


@pytest.fixture(scope="session")
def trained():
    """Full training run over the bundled corpus; shared by everything."""
    return train_pipeline(seed=7)


@pytest.fixture(scope="session")
def intent_model(trained):
    return trained.intent_model


@pytest.fixture(scope="session")
def crf_model(trained):
    return trained.crf_model


@pytest.fixture()
def engine(trained):
    """Fresh trackers per test over the shared trained models."""
    return build_engine(trained, clock=lambda: FIXED_DAY)
