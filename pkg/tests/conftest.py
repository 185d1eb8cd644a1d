import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "src"))

from runner import Scenarios  # noqa: E402
from sublevel import classify  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-resolution acceptance runs (minutes)")


@pytest.fixture(scope="session")
def scenarios():
    return Scenarios()


@pytest.fixture(scope="session")
def specs(scenarios):
    return {name: scenarios.build(name) for name in scenarios.names()}


@pytest.fixture(scope="session")
def reports(specs):
    cache = {}

    def report(name):
        if name not in cache:
            cache[name] = classify(specs[name])
        return cache[name]

    return report
