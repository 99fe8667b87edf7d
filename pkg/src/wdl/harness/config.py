"""Experiment configuration: one declarative YAML document per run,
validated against a published JSON schema.

The master seed may be overridden through the WDL_SEED environment
variable; everything else is fixed by the file.  Per-cell seeds derive
from the master seed and a cell label via SHA-256, so grid cells stay
independent and reruns are bitwise reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os

import jsonschema
import yaml

from ..exceptions import ConfigurationError

__all__ = ["CONFIG_SCHEMA", "load_config", "validate_config", "config_hash", "derive_seed"]

_CHANNEL_CELL = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["awgn", "rayleigh"]},
        "snr_db": {"type": "number"},
        "scheme": {"type": "string"},
    },
    "required": ["kind", "snr_db", "scheme"],
    "additionalProperties": False,
}

_TRAIN_SECTION = {
    "type": "object",
    "properties": {
        "epochs": {"type": "integer", "minimum": 0},
        "batch_size": {"type": "integer", "minimum": 1},
        "learning_rate": {"type": "number", "exclusiveMinimum": 0},
        "temperature": {"type": "number", "minimum": 0},
        "prior_variance": {"type": "number", "exclusiveMinimum": 0},
        "schedule": {"enum": ["polynomial", "constant"]},
        "schedule_k0": {"type": "number", "exclusiveMinimum": 0},
        "tolerance": {"type": "number"},
        "baseline_learning_rate": {"type": "number", "exclusiveMinimum": 0},
        "clip": {"type": "number", "exclusiveMinimum": 0},
        "mi_window": {"type": "integer", "minimum": 1},
        "mi_rho": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "mi_snapshots": {"type": "integer", "minimum": 1},
        "pipeline": {"enum": ["wireless", "surrogate", "none"]},
        "surrogate_step": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "experiment": {"enum": ["bound-table", "rate-sweep", "train-compare", "ber"]},
        "seed": {"type": "integer", "minimum": 0},
        "dataset": {
            "type": "object",
            "properties": {
                "generator": {"enum": ["blobs2", "moons", "xor-rings"]},
                "n": {"type": "integer", "minimum": 10},
                "noise": {"type": "number", "minimum": 0},
            },
            "required": ["generator", "n", "noise"],
            "additionalProperties": False,
        },
        "network": {
            "type": "object",
            "properties": {
                "hidden": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "activation": {
                    "oneOf": [
                        {"enum": ["relu", "tanh", "identity"]},
                        {
                            "type": "array",
                            "items": {"enum": ["relu", "tanh", "identity"]},
                        },
                    ]
                },
                "split_index": {"type": "integer", "minimum": 0},
            },
            "required": ["hidden", "split_index"],
            "additionalProperties": False,
        },
        "pretrain": _TRAIN_SECTION,
        "finetune": _TRAIN_SECTION,
        "clip": {"type": "number", "exclusiveMinimum": 0},
        "channel_grid": {"type": "array", "items": _CHANNEL_CELL, "minItems": 1},
        "draws_per_cell": {"type": "integer", "minimum": 1},
        "reference_channel": _CHANNEL_CELL,
        "rate_eval": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["awgn", "rayleigh"]},
                "snr_db": {"type": "number"},
            },
            "required": ["kind", "snr_db"],
            "additionalProperties": False,
        },
        "finetune_arm": {"enum": ["vanilla", "robust"]},
        "rate_grid": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "eval_draws": {"type": "integer", "minimum": 1},
        "seeds": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "ber": {
            "type": "object",
            "properties": {
                "schemes": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "snr_db": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "kinds": {
                    "type": "array",
                    "items": {"enum": ["awgn", "rayleigh"]},
                    "minItems": 1,
                },
                "n_bits": {"type": "integer", "minimum": 1000},
            },
            "required": ["schemes", "snr_db", "n_bits"],
            "additionalProperties": False,
        },
    },
    "required": ["experiment", "seed"],
    "additionalProperties": False,
}

_REQUIRED_BY_KIND = {
    "ber": ["ber"],
    "bound-table": ["dataset", "network", "pretrain", "finetune", "channel_grid",
                    "draws_per_cell", "clip"],
    "rate-sweep": ["dataset", "network", "pretrain", "finetune", "reference_channel",
                   "rate_grid", "eval_draws", "clip"],
    "train-compare": ["dataset", "network", "pretrain", "finetune",
                      "reference_channel", "rate_grid", "seeds", "eval_draws", "clip"],
}


def validate_config(config: dict) -> dict:
    """Schema-check a config mapping and its per-experiment requirements."""
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigurationError(f"config does not match schema: {exc.message}") from exc
    missing = [
        key for key in _REQUIRED_BY_KIND[config["experiment"]] if key not in config
    ]
    if missing:
        raise ConfigurationError(
            f"{config['experiment']} config is missing sections: {missing}"
        )
    return config


def load_config(path) -> dict:
    """Load and validate a YAML config; WDL_SEED overrides the master seed."""
    with open(path, "r", encoding="utf-8") as fh:
        config = yaml.safe_load(fh)
    if not isinstance(config, dict):
        raise ConfigurationError(f"config file {path} is not a mapping")
    env_seed = os.environ.get("WDL_SEED")
    if env_seed is not None:
        config["seed"] = int(env_seed)
    return validate_config(config)


def config_hash(config: dict) -> str:
    """Platform-stable hash of the canonical JSON serialization."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def derive_seed(master_seed: int, label: str) -> int:
    """Stable 63-bit per-cell seed from the master seed and a cell label."""
    digest = hashlib.sha256(f"{master_seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
