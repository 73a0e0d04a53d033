"""Brute-force references for validating the protocol and its bounds."""

from src.oracles.edit_distance import (
    EXCEEDS_CAP,
    EditOp,
    ball_layers,
    edit_ops,
    exact_edm,
    levenshtein,
    neighbours,
    working_alphabet,
)
from src.oracles.labeling import reference_labeling
from src.oracles.report import (
    ORACLE_MODULUS,
    ApproximationReport,
    SweepReport,
    all_strings,
    approximation_report,
    conflict_free_vectors,
    lower_bound_sweep,
)

__all__ = [
    "EXCEEDS_CAP",
    "ORACLE_MODULUS",
    "ApproximationReport",
    "EditOp",
    "SweepReport",
    "all_strings",
    "approximation_report",
    "ball_layers",
    "conflict_free_vectors",
    "edit_ops",
    "exact_edm",
    "levenshtein",
    "lower_bound_sweep",
    "neighbours",
    "reference_labeling",
    "working_alphabet",
]
