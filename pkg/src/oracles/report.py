"""Approximation quality of the characteristic-vector L1 distance.

The L1 distance of conflict-free characteristic vectors bounds the edit
distance with moves from below by a factor of two. These reports compare
it against the exact distance on strings short enough to search.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from src.esp import CharacteristicVector, Text, build_esp_tree, characteristic_vector, l1_distance
from src.hashing import HashConfig
from src.oracles.edit_distance import EXCEEDS_CAP, exact_edm, levenshtein
from src.oracles.labeling import reference_labeling

logger = logging.getLogger(__name__)

# Large prime modulus; tentative labels of short oracle inputs never collide.
ORACLE_MODULUS = 2**61 - 1


def _oracle_config(cfg: HashConfig | None) -> HashConfig:
    return cfg if cfg is not None else HashConfig(m=ORACLE_MODULUS)


def conflict_free_vectors(
    x: Text, y: Text, cfg: HashConfig | None = None
) -> tuple[CharacteristicVector, CharacteristicVector, int]:
    """Vectors of x and y over ranks of their exact node substrings.

    Returns both vectors and the number n of distinct substrings.
    """
    cfg = _oracle_config(cfg)
    by_yield_x = characteristic_vector(build_esp_tree(x, cfg), by_yield=True)
    by_yield_y = characteristic_vector(build_esp_tree(y, cfg), by_yield=True)
    ranks = reference_labeling(by_yield_x.counts, by_yield_y.counts)
    return by_yield_x.relabel(ranks), by_yield_y.relabel(ranks), len(ranks)


@dataclass(frozen=True)
class ApproximationReport:
    """L1 distance next to the exact distances for one pair.

    Attributes:
        l1: L1 distance of the conflict-free characteristic vectors.
        edm: Exact edit distance with moves, or None beyond the cap.
        levenshtein: Levenshtein distance.
        cap: Cost cap used for the exact search.
    """

    l1: int
    edm: int | None
    levenshtein: int
    cap: int

    @property
    def edm_exceeds_cap(self) -> bool:
        return self.edm is None

    @property
    def ratio(self) -> Fraction | None:
        """L1 / edm when both are known and edm > 0."""
        if self.edm is None or self.edm == 0:
            return None
        return Fraction(self.l1, self.edm)

    @property
    def lower_bound_holds(self) -> bool | None:
        """edm <= 2 * L1; None when edm is unknown."""
        if self.edm is None:
            return None
        return self.edm <= 2 * self.l1


def approximation_report(
    x: Text, y: Text, cfg: HashConfig | None = None, cap: int = 4
) -> ApproximationReport:
    v_x, v_y, _ = conflict_free_vectors(x, y, cfg)
    edm = exact_edm(x, y, cap)
    return ApproximationReport(
        l1=l1_distance(v_x, v_y),
        edm=None if edm is EXCEEDS_CAP else edm,
        levenshtein=levenshtein(x, y),
        cap=cap,
    )


@dataclass(frozen=True)
class SweepReport:
    """Outcome of an exhaustive lower-bound sweep.

    Attributes:
        pairs: Ordered pairs examined.
        decided: Pairs whose exact distance is within the cap.
        violations: (x, y, l1, edm) for every pair with edm > 2 * L1.
        ratios: Distribution of L1 / edm over decided pairs with edm > 0.
    """

    pairs: int
    decided: int
    violations: tuple[tuple[bytes, bytes, int, int], ...] = ()
    ratios: Counter[Fraction] = field(default_factory=Counter)

    @property
    def exceeded(self) -> int:
        return self.pairs - self.decided


def all_strings(alphabet: bytes, max_len: int, min_len: int = 1) -> list[bytes]:
    return [
        bytes(chars)
        for length in range(min_len, max_len + 1)
        for chars in itertools.product(alphabet, repeat=length)
    ]


def lower_bound_sweep(
    max_len: int = 6,
    alphabet: bytes = b"ab",
    cap: int = 4,
    cfg: HashConfig | None = None,
) -> SweepReport:
    """Check edm <= 2 * L1 on every pair of strings up to `max_len`."""
    strings = all_strings(alphabet, max_len)
    cfg = _oracle_config(cfg)
    vectors = {
        s: characteristic_vector(build_esp_tree(s, cfg), by_yield=True) for s in strings
    }
    decided = 0
    violations = []
    ratios: Counter[Fraction] = Counter()
    for x, y in itertools.product(strings, repeat=2):
        edm = exact_edm(x, y, cap)
        if edm is EXCEEDS_CAP:
            continue
        decided += 1
        # yield-keyed vectors give the same L1 as any bijective relabeling
        l1 = l1_distance(vectors[x], vectors[y])
        if edm > 2 * l1:
            violations.append((x, y, l1, edm))
            logger.warning(
                "lower_bound_violation",
                extra={"x": x.decode(errors="replace"), "y": y.decode(errors="replace"),
                       "l1": l1, "edm": edm},
            )
        if edm > 0:
            ratios[Fraction(l1, edm)] += 1
    report = SweepReport(
        pairs=len(strings) ** 2,
        decided=decided,
        violations=tuple(violations),
        ratios=ratios,
    )
    logger.info(
        "lower_bound_sweep_done",
        extra={"pairs": report.pairs, "decided": decided, "violations": len(violations)},
    )
    return report
