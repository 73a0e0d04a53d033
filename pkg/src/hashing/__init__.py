"""Tentative labeling hash and modulus selection."""

from src.hashing.bounds import (
    PUBLISHED_MODULI,
    check_bound,
    conflict_probability,
    default_modulus,
    exact_conflict_probability,
    max_labels,
    max_labels_exact,
    min_modulus,
    min_modulus_exact,
)
from src.hashing.rolling_hash import (
    HashConfig,
    HashConfigError,
    HashValue,
    combine,
    combine_all,
    power_of_base,
    rolling_hash,
)

__all__ = [
    "PUBLISHED_MODULI",
    "HashConfig",
    "HashConfigError",
    "HashValue",
    "check_bound",
    "combine",
    "combine_all",
    "conflict_probability",
    "default_modulus",
    "exact_conflict_probability",
    "max_labels",
    "max_labels_exact",
    "min_modulus",
    "min_modulus_exact",
    "power_of_base",
    "rolling_hash",
]
