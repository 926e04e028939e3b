"""Guaranteed bounds on the posterior of probabilistic programs."""

from ._gbpi import (
    Program,
    ResourceCap,
    SyntaxError,
    TypeError,
    compute_bounds,
    estimate,
    importance_sample,
    infer_type,
    parse,
    parse_file,
)

__all__ = [
    "Program",
    "ResourceCap",
    "SyntaxError",
    "TypeError",
    "compute_bounds",
    "estimate",
    "importance_sample",
    "infer_type",
    "parse",
    "parse_file",
]
