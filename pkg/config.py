"""
Configuration management for the recollement toolkit
"""

import logging
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from sympy import isprime

from exactla import MAX_PRIME
from models import Caps

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Run settings read from RECOLL_* environment variables and .env"""

    # Field
    prime: int = Field(32003, description="Characteristic of the ground field")
    seed: int = Field(0, description="Seed of every randomised step")

    # Caps
    pd_cap: int = Field(64, description="Projective dimension cap")
    decompose_trials: int = Field(64, description="Random trials in idempotent search")
    syzygy_depth_cap: int = Field(8, description="Deepest syzygy an oracle may use")
    closure_cap: int = Field(6, description="Omega-closure rounds for syzygy-finite oracles")
    tensor_power_cap: int = Field(4, description="Largest tensor power in nilpotency checks")
    tor_cap: int = Field(3, description="Largest Tor index in perfectness checks")
    random_panel_size: int = Field(2, description="Seeded random modules added to default panels")
    probe_count: int = Field(3, description="Random short exact sequences per exactness probe")

    # Logging
    log_level: str = Field("WARNING", description="Logging level")
    log_file: Optional[str] = Field(None, description="Log file path")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"log_level must be one of {valid_levels}")
        return v.upper()

    @field_validator("prime")
    @classmethod
    def validate_prime(cls, v):
        if not isprime(v):
            raise ValueError(f"prime must be a prime number, got {v}")
        if v > MAX_PRIME:
            raise ValueError(f"prime must not exceed {MAX_PRIME}, got {v}")
        return v

    @field_validator(
        "pd_cap", "syzygy_depth_cap", "closure_cap", "random_panel_size", "probe_count", "seed"
    )
    @classmethod
    def validate_non_negative(cls, v):
        if v < 0:
            raise ValueError("must be non-negative")
        return v

    @field_validator("decompose_trials", "tensor_power_cap", "tor_cap")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    model_config = SettingsConfigDict(
        env_prefix="RECOLL_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    def caps(self) -> Caps:
        return Caps(
            pd_cap=self.pd_cap,
            decompose_trials=self.decompose_trials,
            syzygy_depth_cap=self.syzygy_depth_cap,
            closure_cap=self.closure_cap,
            tensor_power_cap=self.tensor_power_cap,
            tor_cap=self.tor_cap,
            random_panel_size=self.random_panel_size,
            probe_count=self.probe_count,
        )


def load_settings(**overrides) -> Settings:
    """Load settings from the environment and .env; keyword overrides win"""
    try:
        return Settings(**{k: v for k, v in overrides.items() if v is not None})
    except Exception as e:
        logger.error(f"Error loading settings: {e}")
        raise


def create_env_template(path: str = ".env") -> Path:
    """Write a template .env with every setting at its default"""
    template = """# Recollement toolkit configuration

# Field
RECOLL_PRIME=32003
RECOLL_SEED=0

# Caps
RECOLL_PD_CAP=64
RECOLL_DECOMPOSE_TRIALS=64
RECOLL_SYZYGY_DEPTH_CAP=8
RECOLL_CLOSURE_CAP=6
RECOLL_TENSOR_POWER_CAP=4
RECOLL_TOR_CAP=3
RECOLL_RANDOM_PANEL_SIZE=2
RECOLL_PROBE_COUNT=3

# Logging
RECOLL_LOG_LEVEL=WARNING
RECOLL_LOG_FILE=
"""
    target = Path(path)
    target.write_text(template)
    logger.info(f"Template {target} created")
    return target


def validate_settings(settings: Settings) -> list:
    """Soft checks that do not block a run; returns the problems found"""
    errors = []
    if settings.prime < 1000:
        errors.append("small primes make random splitting and isomorphism search unreliable")
    if settings.closure_cap > settings.syzygy_depth_cap + 16:
        errors.append("closure_cap far above syzygy_depth_cap rarely helps")
    if settings.log_file:
        parent = Path(settings.log_file).parent
        if not parent.exists():
            errors.append(f"log directory {parent} does not exist")
    for error in errors:
        logger.warning(f"Settings: {error}")
    return errors


if __name__ == "__main__":
    try:
        settings = load_settings()
        print("Settings loaded successfully!")
        print(f"Prime: {settings.prime}")
        print(f"Seed: {settings.seed}")
        print(f"Log Level: {settings.log_level}")

        if not validate_settings(settings):
            print("Settings validation passed!")
        else:
            print("Settings validation reported problems!")

    except Exception as e:
        print(f"Error: {e}")
