"""
Runtime settings for octacover.
Values come from defaults, then a local .env file / process environment
(OCTACOVER_* variables), then CLI flags.
"""

import logging
import os
from dataclasses import dataclass, replace
from typing import Any, Callable

from dotenv import load_dotenv

from .errors import ParseError

ENV_PREFIX = "OCTACOVER_"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass(frozen=True)
class Settings:
    """
    Tunable limits and tolerances.

    Attributes:
        max_maps (int): Cap on the number of maps of a composed system
        point_cap (int): Cap on the size of a deterministic attractor sample
        dedup_resolution (float): Dedup grid size, relative to the data scale
        containment_slack (float): Membership slack, relative to the data scale
        collinearity_tolerance (float): Boundary collinearity tolerance, relative to the z-range
        log_level (str): Logging level name
        output_dir (str): Default directory for pipeline artifacts
    """
    max_maps: int = 10**6
    point_cap: int = 200_000
    dedup_resolution: float = 1e-6
    containment_slack: float = 1e-9
    collinearity_tolerance: float = 1e-9
    log_level: str = "INFO"
    output_dir: str = "output"

    @classmethod
    def from_env(cls, dotenv_path: str | None = None) -> "Settings":
        """
        Build settings from the environment, loading a .env file first.

        Args:
            dotenv_path (str, optional): Explicit .env path; default search otherwise

        Returns:
            Settings: Defaults overridden by any OCTACOVER_* variables
        """
        load_dotenv(dotenv_path=dotenv_path)
        readers: dict[str, Callable[[str], Any]] = {
            "max_maps": int,
            "point_cap": int,
            "dedup_resolution": float,
            "containment_slack": float,
            "collinearity_tolerance": float,
            "log_level": str.upper,
            "output_dir": str,
        }
        overrides: dict[str, Any] = {}
        for field_name, reader in readers.items():
            env_key = ENV_PREFIX + field_name.upper()
            raw = os.environ.get(env_key)
            if raw is None or raw.strip() == "":
                continue
            try:
                overrides[field_name] = reader(raw.strip())
            except ValueError as e:
                raise ParseError(f"invalid value {raw!r}: {e}", key=env_key) from e
        return cls(**overrides)

    def with_overrides(self, **changes: Any) -> "Settings":
        """Return a copy with every non-None keyword applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def configure_logging(level: str = "INFO") -> None:
    """Configure root logging once for command-line use."""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT)
