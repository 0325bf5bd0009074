import os
import random

import pytest
from hypothesis import settings

from adelic.cli import fixture_path
from adelic.wavefun import load_spec

SEED = int(os.environ.get("ADELIC_SEED", "0"))

settings.register_profile("adelic", derandomize=True, deadline=None, max_examples=40)
settings.load_profile("adelic")


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def fixtures():
    names = ("exp", "cm1", "dg139", "bessel32", "bessel52")
    return {n: load_spec(fixture_path(n + ".json")) for n in names}


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
