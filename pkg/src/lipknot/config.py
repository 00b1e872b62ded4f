"""Configuration loading for lipknot."""

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from dotenv import load_dotenv

from lipknot.constants import (
    DEFAULT_ARC_SLACK,
    DEFAULT_BRUTEFORCE_LIMIT,
    DEFAULT_CROSSING_LIMIT,
    DEFAULT_GAUSS_TOLERANCE,
)


@dataclass(frozen=True)
class Config:
    """Runtime limits loaded from environment."""

    crossing_limit: int = DEFAULT_CROSSING_LIMIT
    bruteforce_limit: int = DEFAULT_BRUTEFORCE_LIMIT
    arc_slack: Fraction = DEFAULT_ARC_SLACK
    gauss_tolerance: float = DEFAULT_GAUSS_TOLERANCE


class ConfigError(ValueError):
    """Raised when a configuration variable cannot be parsed."""
    pass


_cached: Optional[Config] = None


def load_config(reload: bool = False) -> Config:
    """
    Load configuration from environment variables (and a .env file if present).

    Recognised variables:
        LIPKNOT_CROSSING_LIMIT, LIPKNOT_BRUTEFORCE_LIMIT,
        LIPKNOT_ARC_SLACK, LIPKNOT_GAUSS_TOLERANCE

    Unset variables fall back to the defaults in constants.py.

    Raises:
        ConfigError: listing every variable that failed to parse.
    """
    global _cached
    if _cached is not None and not reload:
        return _cached

    load_dotenv()

    values = {}
    errors = []

    def _read(name: str, field: str, parse, default):
        raw = os.environ.get(name)
        if raw is None or not raw.strip():
            values[field] = default
            return
        try:
            parsed = parse(raw.strip())
        except (ValueError, ZeroDivisionError):
            errors.append(f"{name}={raw!r} is not a valid {parse.__name__}")
            return
        if parsed <= 0:
            errors.append(f"{name}={raw!r} must be positive")
            return
        values[field] = parsed

    _read("LIPKNOT_CROSSING_LIMIT", "crossing_limit", int, DEFAULT_CROSSING_LIMIT)
    _read("LIPKNOT_BRUTEFORCE_LIMIT", "bruteforce_limit", int, DEFAULT_BRUTEFORCE_LIMIT)
    _read("LIPKNOT_ARC_SLACK", "arc_slack", Fraction, DEFAULT_ARC_SLACK)
    _read("LIPKNOT_GAUSS_TOLERANCE", "gauss_tolerance", float, DEFAULT_GAUSS_TOLERANCE)

    if errors:
        raise ConfigError(
            "Invalid configuration:\n"
            + "\n".join(f"  - {e}" for e in errors)
        )

    _cached = Config(**values)
    return _cached
