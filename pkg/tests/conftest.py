from pathlib import Path

import pytest

from src.ingestion.load_plan import load_plan

PLANS = Path(__file__).resolve().parent.parent / "plans"


@pytest.fixture
def plans_dir() -> Path:
    return PLANS


@pytest.fixture
def worked_plan():
    return load_plan(PLANS / "worked_example.json")


@pytest.fixture
def split_plan():
    return load_plan(PLANS / "worked_example_split.json")


@pytest.fixture
def pi_plan():
    return load_plan(PLANS / "pi_pulse.json")
