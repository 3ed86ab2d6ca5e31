import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

DATA = Path(__file__).parent / "data"

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def db():
    from rungekit.sieve.db import load_db

    return load_db(DATA / "generators.jsonl")


@pytest.fixture(scope="session")
def configs_k11():
    from rungekit.sieve.configs import Configuration

    return [Configuration.from_json(c) for c in json.loads((DATA / "configs_k11.json").read_text())]


@pytest.fixture(scope="session")
def config_exceptional():
    from rungekit.sieve.configs import Configuration

    return Configuration.from_json(json.loads((DATA / "config_exceptional.json").read_text()))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
