"""
Shared fixtures for the multistat test suite.
"""
import random

import pytest

from multistat.models import load_fixtures, parse_model, resolve_model
from multistat.services.elimination_service import reduce_model

TOY_MODEL = """\
# A + B <-> C with mass-action kinetics
model toy
vars x1 x2 x3
params k1 k2 c1 c2

ode x1 = k2*x3 - k1*x1*x2
ode x2 = k2*x3 - k1*x1*x2
ode x3 = k1*x1*x2 - k2*x3

law x1 + x3 = c1
law x2 + x3 = c2

value k1 = 1
value k2 = 0.5
"""


@pytest.fixture
def toy_model():
    return parse_model(TOY_MODEL)


@pytest.fixture(scope="session")
def model26():
    return resolve_model("model26")


@pytest.fixture(scope="session")
def model28():
    return resolve_model("model28")


@pytest.fixture(scope="session")
def fixture_set():
    return load_fixtures()


@pytest.fixture(scope="session")
def reduced26(model26):
    return reduce_model(model26)


@pytest.fixture(scope="session")
def reduced28(model28):
    return reduce_model(model28)


@pytest.fixture
def rng():
    return random.Random(20240517)


@pytest.fixture
def cache_dir(tmp_path):
    path = tmp_path / "cache"
    path.mkdir()
    return path
