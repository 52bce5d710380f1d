"""
Settings from the environment, caps and soft validation
"""

import pytest
from pydantic import ValidationError

from config import Settings, create_env_template, load_settings, validate_settings
from models import Caps


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for key in ("RECOLL_PRIME", "RECOLL_SEED", "RECOLL_LOG_LEVEL", "RECOLL_PD_CAP"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)


def test_defaults():
    s = load_settings()
    assert s.prime == 32003
    assert s.seed == 0
    assert s.log_level == "WARNING"
    assert s.caps() == Caps()


def test_environment_and_overrides(monkeypatch):
    monkeypatch.setenv("RECOLL_SEED", "9")
    monkeypatch.setenv("RECOLL_PD_CAP", "12")
    s = load_settings(seed=None, log_level="debug")
    assert s.seed == 9
    assert s.caps().pd_cap == 12
    assert s.log_level == "DEBUG"
    assert load_settings(seed=4).seed == 4


@pytest.mark.parametrize(
    "field,value",
    [
        ("prime", 32004),
        ("prime", 2147483647),
        ("log_level", "LOUD"),
        ("seed", -1),
        ("tor_cap", 0),
        ("probe_count", -2),
    ],
)
def test_rejected_values(field, value):
    with pytest.raises(ValidationError):
        Settings(**{field: value})


def test_env_template_round_trip(tmp_path):
    path = create_env_template(str(tmp_path / ".env"))
    text = path.read_text()
    assert "RECOLL_PRIME=32003" in text
    s = Settings(_env_file=str(path))
    assert s.caps() == Caps()


def test_soft_validation(tmp_path):
    assert validate_settings(Settings()) == []
    problems = validate_settings(Settings(prime=7, log_file=str(tmp_path / "missing" / "run.log")))
    assert len(problems) == 2
