"""Characteristic vectors of ESP trees and their L1 distance."""

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Mapping

from src.esp.tree import EspTree


@dataclass(frozen=True)
class CharacteristicVector:
    """Label frequencies of a tree; absent keys have frequency 0."""

    counts: Mapping[Hashable, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "counts", {k: v for k, v in self.counts.items() if v > 0}
        )

    def __getitem__(self, key: Hashable) -> int:
        return self.counts.get(key, 0)

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def relabel(self, mapping: Mapping[Hashable, int]) -> "CharacteristicVector":
        """Re-key the vector through a label mapping (tentative -> final rank)."""
        out: Counter[Hashable] = Counter()
        for key, count in self.counts.items():
            out[mapping[key]] += count
        return CharacteristicVector(dict(out))

    def dense(self, n: int) -> list[int]:
        """Frequencies of ranks 1..n as a list (index 0 is rank 1)."""
        return [self[rank] for rank in range(1, n + 1)]


def characteristic_vector(tree: EspTree, by_yield: bool = False) -> CharacteristicVector:
    """Count every node label of `tree`, leaves included.

    Args:
        tree: The parse tree.
        by_yield: Key by the exact yield bytes instead of the tentative hash.
    """
    if by_yield:
        counts = Counter(tree.yield_of(node) for node in tree.nodes())
    else:
        counts = Counter(node.tentative_label.value for node in tree.nodes())
    return CharacteristicVector(dict(counts))


def l1_distance(u: CharacteristicVector, v: CharacteristicVector) -> int:
    """Sum of |u[k] - v[k]| over the union of keys."""
    keys = set(u.counts) | set(v.counts)
    return sum(abs(u[k] - v[k]) for k in keys)
