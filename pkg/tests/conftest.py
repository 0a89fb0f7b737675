from pathlib import Path

import numpy as np
import pytest

from qcoreset.data import load_dataset, normalize

DATA = Path(__file__).resolve().parent.parent / "data"

# filled by test_acceptance, printed after the run
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def iris():
    return load_dataset(DATA / "iris.csv")


@pytest.fixture(scope="session")
def pendigits():
    return load_dataset(DATA / "pendigits.csv")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_dataset(rng, n, d):
    return normalize(rng.normal(size=(n, d)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
