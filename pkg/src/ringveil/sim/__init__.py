"""Simulation harness and benchmarks."""

from .bench import BenchRecord, keyupdate_sizes, linear_fit
from .config import ConfigError, ScenarioConfig, load_config
from .scenario import run_scenario

__all__ = ["BenchRecord", "ConfigError", "ScenarioConfig", "keyupdate_sizes", "linear_fit", "load_config", "run_scenario"]
