"""
Shared fixtures: bundled algebras and their recollements
"""

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from algebra import Algebra  # noqa: E402
from recollement import build  # noqa: E402
from specio import load_algebra  # noqa: E402

DATA = ROOT / "data"

settings.register_profile(
    "toolkit",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("toolkit")


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def a2() -> Algebra:
    return load_algebra(DATA / "a2.json")


@pytest.fixture(scope="session")
def lambda_i() -> Algebra:
    return load_algebra(DATA / "lambda_i.json")


@pytest.fixture(scope="session")
def dual_numbers() -> Algebra:
    return load_algebra(DATA / "k_dual_numbers.json")


@pytest.fixture(scope="session")
def worked() -> Algebra:
    return load_algebra(DATA / "paper_example.json")


@pytest.fixture(scope="session")
def triangular() -> Algebra:
    return load_algebra(DATA / "triangular.json")


@pytest.fixture(scope="session")
def triangular_dual() -> Algebra:
    return load_algebra(DATA / "triangular_dual.json")


@pytest.fixture(scope="session")
def worked_rec(worked):
    return build(worked, ("1", "2", "3"))


@pytest.fixture(scope="session")
def a2_rec_1(a2):
    return build(a2, ("1",))


@pytest.fixture(scope="session")
def a2_rec_2(a2):
    return build(a2, ("2",))


@pytest.fixture(scope="session")
def lambda_i_rec(lambda_i):
    return build(lambda_i, ("1",))
