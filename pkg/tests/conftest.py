import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA: list = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERIA:
        terminalreporter.write_line(line)


@pytest.fixture
def rng(request):
    # a fixed seed per test keeps failures reproducible
    return np.random.default_rng(abs(hash(request.node.name)) % 2**32)


def random_image(rng, h, w):
    return rng.integers(0, 256, size=(h, w), dtype=np.uint8)
