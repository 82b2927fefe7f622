import logging
import os
import random

import pytest

from documents import parse_transducer, parse_weighted_automaton
from settings import BASE_DIR

MACHINES_DIR = os.path.join(BASE_DIR, "machines")


def read_machine(name):
    with open(os.path.join(MACHINES_DIR, name), "r") as f:
        return f.read()


@pytest.fixture
def machines_dir():
    return MACHINES_DIR


@pytest.fixture
def three_state():
    return parse_transducer(read_machine("three_state.txt"))


@pytest.fixture
def identity():
    return parse_transducer(read_machine("identity.txt"))


@pytest.fixture
def b_deleting():
    return parse_transducer(read_machine("b_deleting.txt"))


@pytest.fixture
def all_empty():
    return parse_transducer(read_machine("all_empty.txt"))


@pytest.fixture
def two_components():
    return parse_transducer(read_machine("two_components.txt"))


@pytest.fixture
def binary_value():
    return parse_weighted_automaton(read_machine("binary_value.txt"))


@pytest.fixture
def rng():
    return random.Random(20240101)


@pytest.fixture
def quiet_logs(tmp_path, monkeypatch):
    """Send the CLI's file log to a temporary directory and drop handlers afterwards."""
    import normcheck

    monkeypatch.setattr(normcheck, "LOGS_DIR", str(tmp_path / "logs"))
    root = logging.getLogger("Normcheck")
    saved = list(root.handlers)
    for handler in saved:
        root.removeHandler(handler)
    yield tmp_path
    for handler in list(root.handlers):
        handler.close()
        root.removeHandler(handler)
    for handler in saved:
        root.addHandler(handler)
