"""Topological disentanglement scores for generative models."""

from ._core import (
    ConvergenceError,
    Error,
    FormatError,
    barycenter,
    generate,
    read_cloud,
    read_dataset,
    relative_living_times,
    rlt_ensemble,
    score,
    sinkhorn,
    w2_exact,
    write_cloud,
    write_dataset,
)

__all__ = [
    "ConvergenceError",
    "Error",
    "FormatError",
    "barycenter",
    "generate",
    "read_cloud",
    "read_dataset",
    "relative_living_times",
    "rlt_ensemble",
    "score",
    "sinkhorn",
    "w2_exact",
    "write_cloud",
    "write_dataset",
]
