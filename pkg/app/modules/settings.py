from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional

from dotenv import find_dotenv, load_dotenv

from .errors import ConfigError

ENV_PREFIX = "HJB_HOMOG_"


@dataclass(frozen=True)
class Settings:
    """Solver defaults, overridable through HJB_HOMOG_* environment variables or a .env file."""

    tol_1d: float = 1e-9
    tol_2d: float = 1e-7
    max_iter: int = 10_000_000
    cfl: float = 0.9
    lp_tol: float = 1e-9
    n_alpha: int = 41
    dirichlet_tol: float = 1e-10
    alpha_cap: float = 10.0
    workers: int = 1
    data_dir: str = "app/data"
    log_level: str = "INFO"

    @classmethod
    def load(cls, env_file: Optional[str] = None) -> "Settings":
        load_dotenv(env_file or find_dotenv(usecwd=True))
        values: Dict[str, Any] = {}
        for field in fields(cls):
            raw = os.getenv(ENV_PREFIX + field.name.upper())
            if raw is None or raw == "":
                continue
            values[field.name] = _coerce(field.name, raw, type(getattr(cls, field.name)))
        settings = cls(**values)
        settings.validate()
        return settings

    def validate(self) -> None:
        for name in ("tol_1d", "tol_2d", "lp_tol", "dirichlet_tol", "alpha_cap"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.cfl <= 1:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.max_iter < 1 or self.workers < 1:
            raise ConfigError("max_iter and workers must be at least 1")
        if self.n_alpha < 2:
            raise ConfigError(f"n_alpha must be at least 2, got {self.n_alpha}")
        if logging.getLevelName(self.log_level.upper()) not in range(0, 60):
            raise ConfigError(f"unknown log level {self.log_level!r}")

    def tol_for(self, dim: int) -> float:
        return self.tol_1d if dim == 1 else self.tol_2d

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _coerce(name: str, raw: str, kind: type) -> Any:
    try:
        if kind is int:
            return int(float(raw))
        if kind is float:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_PREFIX}{name.upper()}={raw!r} is not a number") from exc
    return raw
