import os
import sys
import random

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from lib.load import load_problem  # noqa: E402


def data_path(name):
    return os.path.join(ROOT, "data", name)


@pytest.fixture
def rng():
    return random.Random(42)


@pytest.fixture(scope="session")
def fin_spec():
    return load_problem(data_path("fin.pde")).spec


@pytest.fixture(scope="session")
def diffusion_spec():
    return load_problem(data_path("diffusion.pde")).spec


@pytest.fixture(scope="session")
def equiv_spec():
    return load_problem(data_path("fin_equiv.pde")).spec


@pytest.fixture(scope="session")
def g4():
    return load_problem(data_path("g4.alg"))
