"""
Configuration utilities for the machstem package.
Solver settings read from MACHSTEM_* environment variables and an optional .env file.
"""

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, TypeVar

from dotenv import load_dotenv

from machstem.models.core import ConfigError

T = TypeVar("T")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class SolverConfig:
    """Numerical and runtime settings shared by every service."""
    log_level: str
    threads: int
    newton_tol: float
    newton_max_iter: int
    trust_region: float
    quadrature_nodes: int
    quadrature_tol: float
    seed: int

    @classmethod
    def from_env(cls) -> "SolverConfig":
        """Create configuration from the environment."""
        load_dotenv()
        config = cls(
            log_level=os.environ.get("MACHSTEM_LOG_LEVEL", "INFO").upper(),
            threads=_read("MACHSTEM_THREADS", int, min(4, os.cpu_count() or 1)),
            newton_tol=_read("MACHSTEM_NEWTON_TOL", float, 1e-12),
            newton_max_iter=_read("MACHSTEM_NEWTON_MAX_ITER", int, 50),
            trust_region=_read("MACHSTEM_TRUST_REGION", float, 0.1),
            quadrature_nodes=_read("MACHSTEM_QUADRATURE_NODES", int, 8),
            quadrature_tol=_read("MACHSTEM_QUADRATURE_TOL", float, 1e-10),
            seed=_read("MACHSTEM_SEED", int, 20240101),
        )
        config.validate()
        return config

    def validate(self) -> None:
        """Reject values no solver can work with."""
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"MACHSTEM_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")
        if self.threads < 1:
            raise ConfigError("MACHSTEM_THREADS must be >= 1")
        if not 0.0 < self.newton_tol < 1e-3:
            raise ConfigError("MACHSTEM_NEWTON_TOL must lie in (0, 1e-3)")
        if self.newton_max_iter < 1:
            raise ConfigError("MACHSTEM_NEWTON_MAX_ITER must be >= 1")
        if not 0.0 < self.trust_region <= 1.0:
            raise ConfigError("MACHSTEM_TRUST_REGION must lie in (0, 1]")
        if self.quadrature_nodes < 2:
            raise ConfigError("MACHSTEM_QUADRATURE_NODES must be >= 2")
        if self.quadrature_tol <= 0.0:
            raise ConfigError("MACHSTEM_QUADRATURE_TOL must be positive")


def _read(name: str, cast: Callable[[str], T], default: T) -> T:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}={raw!r} is not a valid value") from exc


@lru_cache(maxsize=1)
def get_config() -> SolverConfig:
    """Get the cached solver configuration."""
    return SolverConfig.from_env()


def reset_config() -> None:
    """Drop the cached configuration so the next call re-reads the environment."""
    get_config.cache_clear()


def get_version() -> str:
    """Get the package version."""
    from machstem import __version__
    return __version__
