import numpy as np
import pytest

from hardyverify.manifold import Region
from hardyverify.prober import CorpusSpec, generate_corpus

# acceptance lines collected by tests/test_acceptance.py, printed at the end
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def whole_corpus():
    return generate_corpus(CorpusSpec(seed=11, count=4, support=Region.annulus(0.2, 3.0)))


@pytest.fixture(scope="session")
def ball_corpus():
    return generate_corpus(CorpusSpec(seed=12, count=4, support=Region.annulus(0.1, 0.95)))


@pytest.fixture(scope="session")
def complex_corpus():
    return generate_corpus(CorpusSpec(seed=13, count=3, support=Region.annulus(0.2, 3.0),
                                      value_field="complex"))


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
