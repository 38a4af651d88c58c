# SPDX-License-Identifier: Apache-2.0
"""DASH edge-cache simulator: thin dict-based wrappers over the C++ core."""

import json as _json

from _edgesim import (  # noqa: F401
    default_config_json,
    evaluate_model_json,
    gen_dataset_csv,
    gp_samples,
    predict_from_model,
    run_simulation_json,
    train_model_file,
    validate_config_json,
)

__all__ = [
    "default_config",
    "validate_config",
    "run_simulation",
    "gen_dataset",
    "train_model",
    "evaluate_model",
    "predict",
    "gp_samples",
]


def default_config():
    """Built-in default scenario as a dict."""
    return _json.loads(default_config_json())


def validate_config(config):
    """Validation error messages (empty list = valid)."""
    return validate_config_json(_json.dumps(config))


def run_simulation(config, strategy, seed=1, model_path="", oracle=False):
    """One simulation run; returns the strategy report as a dict."""
    return _json.loads(
        run_simulation_json(_json.dumps(config), strategy, seed, model_path, oracle)
    )


def gen_dataset(config, seeds, out_csv):
    """Write a training dataset CSV from legacy runs; returns the row count."""
    return gen_dataset_csv(_json.dumps(config), list(seeds), out_csv)


def train_model(config, dataset_csv, kind, out_model, train_seed=1, split_seed=1):
    """Train a classifier on the dataset's training split and save it."""
    train_model_file(_json.dumps(config), dataset_csv, kind, train_seed, split_seed, out_model)


def evaluate_model(config, dataset_csv, model_path):
    """Evaluate a saved model on the held-out split; returns a dict."""
    return _json.loads(evaluate_model_json(_json.dumps(config), dataset_csv, model_path))


def predict(model_path, features):
    """Next-segment bitrate for a 7-feature vector."""
    return predict_from_model(model_path, list(features))
