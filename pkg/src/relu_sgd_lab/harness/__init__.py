"""Experiment harness: JSON config, trajectory outputs, seed sweeps, property suites, reports."""

from relu_sgd_lab.harness.config import (
    THREADS_ENV,
    ConfigError,
    HarnessConfig,
    canonical_json,
    config_hash,
    load_config,
    parse_config,
    worker_limit,
)
from relu_sgd_lab.harness.converters import format_float, parse_seed, safe_float, safe_int
from relu_sgd_lab.harness.listing import GOLDEN_GRADIENT, ListingReport, build_listing_report, listing_params
from relu_sgd_lab.harness.outputs import (
    CSV_COLUMNS,
    SUMMARY_KEYS,
    build_summary,
    seed_directory,
    write_run,
    write_trajectory_csv,
)
from relu_sgd_lab.harness.runner import SeedOutcome, run_seed, run_sweep
from relu_sgd_lab.harness.verify import PROPERTIES, SUITES, CheckResult, SuiteReport, replay, run_suite

__all__ = [
    "CSV_COLUMNS",
    "GOLDEN_GRADIENT",
    "PROPERTIES",
    "SUITES",
    "SUMMARY_KEYS",
    "THREADS_ENV",
    "CheckResult",
    "ConfigError",
    "HarnessConfig",
    "ListingReport",
    "SeedOutcome",
    "SuiteReport",
    "build_listing_report",
    "build_summary",
    "canonical_json",
    "config_hash",
    "format_float",
    "listing_params",
    "load_config",
    "parse_config",
    "parse_seed",
    "replay",
    "run_seed",
    "run_suite",
    "run_sweep",
    "safe_float",
    "safe_int",
    "seed_directory",
    "worker_limit",
    "write_run",
    "write_trajectory_csv",
]
