"""Scenario configuration: defaults, key=value files and RINGVEIL_* overrides."""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass, field
from typing import Mapping

from ringveil.entities.clock import DEFAULT_LIST_SIZE, FRESHNESS_WINDOW
from ringveil.pairing import DEFAULT_SUITE, SUITES

ENV_PREFIX = "RINGVEIL_"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    suite: str = DEFAULT_SUITE
    height: int = 6
    vehicles: int = 50
    rsus: int = 2
    ring_sizes: tuple[int, ...] = (5, 10)
    batch_sizes: tuple[int, ...] = (10, 20)
    loss: float = 0.0
    window: int = FRESHNESS_WINDOW
    seed: int = 0
    list_size: int = DEFAULT_LIST_SIZE
    revoke: int = 1
    max_retries: int = 8

    def __post_init__(self) -> None:
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        for name in ("height", "vehicles", "rsus", "window", "list_size", "max_retries"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if not self.ring_sizes or min(self.ring_sizes) < 1:
            raise ConfigError("ring sizes must be positive")
        if not self.batch_sizes or min(self.batch_sizes) < 1:
            raise ConfigError("batch sizes must be positive")
        if not 0.0 <= self.loss < 1.0:
            raise ConfigError("loss must lie in [0, 1)")
        if self.vehicles > 1 << self.height:
            raise ConfigError(f"{self.vehicles} vehicles do not fit a tree of height {self.height}")
        if not 0 <= self.revoke <= self.vehicles:
            raise ConfigError("revoke count must lie in [0, vehicles]")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELDS[name].type
    try:
        if "tuple" in str(kind):
            return tuple(int(x) for x in raw.replace(" ", "").split(",") if x)
        if kind in ("int", int):
            return int(raw)
        if kind in ("float", float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw.strip()


def _apply(base: dict, raw: Mapping[str, str], source: str) -> dict:
    for key, val in raw.items():
        name = key.strip().lower().replace("-", "_")
        if name not in _FIELDS:
            raise ConfigError(f"{source}: unknown setting {key!r}")
        base[name] = _coerce(name, str(val))
    return base


def read_config_file(path: str) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None)
    with open(path, encoding="utf-8") as fh:
        cp.read_string("[scenario]\n" + fh.read(), source=path)
    return dict(cp["scenario"])


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    return {k[len(ENV_PREFIX):]: v for k, v in environ.items()
            if k.startswith(ENV_PREFIX) and k[len(ENV_PREFIX):].lower() in _FIELDS}


def load_config(path: str | None = None, overrides: Mapping[str, object] | None = None,
                environ: Mapping[str, str] | None = None) -> ScenarioConfig:
    """Defaults, then the config file, then environment, then explicit overrides."""
    values: dict = {}
    if path:
        _apply(values, read_config_file(path), path)
    _apply(values, env_overrides(environ), "environment")
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    try:
        return ScenarioConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
