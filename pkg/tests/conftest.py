import random

import pytest

from sigenc.encoder import Encoding

import oracles

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def paper_enc():
    enc = Encoding(oracles.paper_grammar())
    enc.set_start(17)
    return enc


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
