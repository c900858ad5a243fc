import numpy as np
import pytest

from metroscale import genspec, qcore

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def qubit():
    return genspec.preset("qubit-z")


@pytest.fixture
def qutrit():
    return genspec.preset("qutrit")


def random_hermitian(dim, seed):
    rng = qcore.make_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_state(dim, seed):
    rng = qcore.make_rng(seed)
    return qcore.normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))
