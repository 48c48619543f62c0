"""Configuration, scenario presets, run comparison and the check suites."""

from .checks import SUITE_NAMES, run_suite
from .compare import compare_runs, relative_difference
from .config import RunConfig, build_config, dump_config, load_config, parse_config
from .report import RunReport, Verdict
from .scenarios import run_scenario

__all__ = [
    "SUITE_NAMES", "RunConfig", "RunReport", "Verdict", "build_config", "compare_runs", "dump_config",
    "load_config", "parse_config", "relative_difference", "run_scenario", "run_suite",
]
