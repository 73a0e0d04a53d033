"""Plaintext reference for the secure labeling."""

from typing import Hashable, Iterable, TypeVar

K = TypeVar("K", bound=Hashable)


def reference_labeling(a: Iterable[K], b: Iterable[K]) -> dict[K, int]:
    """Rank every label of a ∪ b: the i-th smallest label gets rank i."""
    return {label: rank for rank, label in enumerate(sorted(set(a) | set(b)), start=1)}
