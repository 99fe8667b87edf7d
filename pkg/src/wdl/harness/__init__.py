"""Experiment harness: datasets, configuration, runners, and result files."""

from .datasets import Dataset, make_dataset
from .config import CONFIG_SCHEMA, config_hash, load_config, derive_seed
from .experiments import run_ber, run_bound_table, run_rate_sweep, run_train_compare

__all__ = [
    "Dataset",
    "make_dataset",
    "CONFIG_SCHEMA",
    "config_hash",
    "load_config",
    "derive_seed",
    "run_ber",
    "run_bound_table",
    "run_rate_sweep",
    "run_train_compare",
]
