"""Parallel-in-time RBD preconditioned solver for parabolic optimal control."""

import json

from ._core import (
    ConfigurationError,
    DimensionError,
    DomainError,
    RbdError,
    SolverError,
    UnsupportedError,
    format_sci3,
    parse_h,
    problems,
    solve,
)
from . import _core

__all__ = [
    "ConfigurationError",
    "DimensionError",
    "DomainError",
    "RbdError",
    "SolverError",
    "UnsupportedError",
    "format_sci3",
    "parse_h",
    "problems",
    "run_experiment",
    "solve",
    "validate",
]


def run_experiment(config=None, **kwargs):
    """Run a table. Keys as in the CLI's --config file.

    Returns (rows, table_text) where table_text is csv or text per config["format"].
    """
    cfg = dict(config or {})
    cfg.update(kwargs)
    return _core.run_experiment_json(json.dumps(cfg))


def validate(quick=False):
    """Dense spectral checks; returns the report as a dict."""
    return json.loads(_core.validate_json(quick))
