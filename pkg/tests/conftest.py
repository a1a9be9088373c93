import random

import pytest


def random_partition(rng: random.Random, width: int, k: int) -> list[int]:
    """Uniform ordered partition of 2^width into k positive parts."""
    cuts = sorted(rng.sample(range(1, 1 << width), k - 1))
    bounds = [0] + cuts + [1 << width]
    return [bounds[i + 1] - bounds[i] for i in range(k)]


@pytest.fixture
def rng():
    return random.Random(20240611)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
