import random

import pytest

from ringveil.pairing import SUITES, get_suite

ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture(params=SUITES)
def suite(request):
    return get_suite(request.param)


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        verdict, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {title}")
