import os
import sys
from importlib import resources

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ivif_lexopt import load, parse_tuple  # noqa: E402


def data_path(name):
    return str(resources.files("ivif_lexopt") / "data" / name)


@pytest.fixture(scope="session")
def example_path():
    return data_path("numerical_example.json")


@pytest.fixture(scope="session")
def bicycle_path():
    return data_path("bicycle_production.json")


@pytest.fixture(scope="session")
def example_problem(example_path):
    return load(example_path)


@pytest.fixture(scope="session")
def bicycle_problem(bicycle_path):
    return load(bicycle_path)


@pytest.fixture
def five():
    return parse_tuple("(5;2,2,3,3;5,5,5,4)")


@pytest.fixture
def eight():
    return parse_tuple("(8;1,1,2,2;4,4,2,3)")
