"""Edit-sensitive partitioning of a label sequence into blocks of 2 or 3.

A level is split into maximal runs (one label repeated) and varying
stretches (no two neighbours equal). Runs are blocked greedily. Varying
stretches of length 4 or more are reduced to the alphabet {0, 1, 2} and
cut after landmarks (local maxima, then local minima not next to a
maximum). A landmark depends only on a bounded neighbourhood, so equal
substrings in equal surroundings get equal block boundaries.

Locality radius: each reduction round looks one position to the left
(position 0 looks right). Every stretch gets the same number of rounds,
enough to bring labels below 2^64 under 6, so the round count never
depends on labels elsewhere. With the {3, 4, 5} clean-up and the landmark
test, block boundaries depend on a window of about ten labels.
"""

import logging
from typing import Sequence

logger = logging.getLogger(__name__)

LABEL_BITS = 64


def _rounds_for(bits: int) -> int:
    """Rounds after which labels of `bits` bits are all below 6."""
    top = (1 << bits) - 1
    rounds = 0
    while top >= 6:
        top = 2 * (top.bit_length() - 1) + 1
        rounds += 1
    return rounds


REDUCTION_ROUNDS = _rounds_for(LABEL_BITS)


class EspError(Exception):
    """Raised when parsing receives input it cannot handle.

    Attributes:
        stage: The parsing step that failed.
        message: The error message.
    """

    def __init__(self, stage: str, message: str) -> None:
        self.stage = stage
        self.message = message
        super().__init__(f"[{stage}] {message}")


def _reduce_once(labels: Sequence[int]) -> list[int]:
    """One round of the bit-difference rule.

    Position i becomes 2k + bit_k(labels[i]) where k is the lowest bit in
    which labels[i] differs from its left neighbour (the right one for i=0).
    """
    out: list[int] = []
    for i, label in enumerate(labels):
        other = labels[i - 1] if i > 0 else labels[1]
        diff = label ^ other
        k = (diff & -diff).bit_length() - 1
        out.append(2 * k + ((label >> k) & 1))
    return out


def alphabet_reduction(labels: Sequence[int]) -> list[int]:
    """Map a sequence with distinct neighbours onto {0, 1, 2}.

    Args:
        labels: Non-negative ints, length >= 2, no two adjacent equal.

    Returns:
        A sequence of the same length over {0, 1, 2} with distinct
        neighbours.

    Raises:
        EspError: If the sequence is too short, has adjacent repeats or a
            label wider than LABEL_BITS.
    """
    if len(labels) < 2:
        raise EspError("alphabet_reduction", f"need length >= 2, got {len(labels)}")
    for i in range(1, len(labels)):
        if labels[i] == labels[i - 1]:
            raise EspError(
                "alphabet_reduction", f"adjacent equal labels at positions {i - 1},{i}"
            )
        if labels[i] < 0 or labels[i - 1] < 0:
            raise EspError("alphabet_reduction", "labels must be non-negative")
    if max(labels).bit_length() > LABEL_BITS:
        raise EspError("alphabet_reduction", f"labels must fit {LABEL_BITS} bits")

    current = list(labels)
    for _ in range(REDUCTION_ROUNDS):
        current = _reduce_once(current)

    for value in (3, 4, 5):
        for i, label in enumerate(current):
            if label != value:
                continue
            left = current[i - 1] if i > 0 else None
            right = current[i + 1] if i + 1 < len(current) else None
            current[i] = min(c for c in (0, 1, 2) if c != left and c != right)
    return current


def _landmarks(reduced: Sequence[int]) -> list[int]:
    size = len(reduced)

    def neighbours(i: int) -> list[int]:
        return [reduced[j] for j in (i - 1, i + 1) if 0 <= j < size]

    maxima = {i for i in range(size) if all(reduced[i] > v for v in neighbours(i))}
    minima = {
        i
        for i in range(size)
        if all(reduced[i] < v for v in neighbours(i))
        and (i - 1) not in maxima
        and (i + 1) not in maxima
    }
    return sorted(maxima | minima)


def split_run(length: int) -> list[int]:
    """Greedy block sizes for a run: 2 -> [2], 4 -> [2, 2], 7 -> [3, 2, 2]."""
    if length < 2:
        raise EspError("split_run", f"run length must be >= 2, got {length}")
    if length == 4:
        return [2, 2]
    sizes = [3] * (length // 3)
    remainder = length % 3
    if remainder == 2:
        sizes.append(2)
    elif remainder == 1:
        sizes[-1:] = [2, 2]
    return sizes


def _varying_pieces(labels: Sequence[int]) -> list[int]:
    """Block sizes for a varying stretch; entries of 1 are merged later."""
    size = len(labels)
    if size <= 3:
        return [size]
    marks = _landmarks(alphabet_reduction(labels))
    pieces: list[int] = []
    start = 0
    for mark in marks:
        pieces.append(mark + 1 - start)
        start = mark + 1
    if start < size:
        pieces.append(size - start)

    normalized: list[int] = []
    for piece in pieces:
        normalized.extend(split_run(piece) if piece >= 4 else [piece])
    return normalized


def _segments(labels: Sequence[int]) -> list[tuple[bool, int, int]]:
    """Split into (is_run, start, end) segments covering the sequence."""
    size = len(labels)
    segments: list[tuple[bool, int, int]] = []
    i = 0
    while i < size:
        j = i + 1
        while j < size and labels[j] == labels[i]:
            j += 1
        if j - i >= 2:
            segments.append((True, i, j))
            i = j
            continue
        j = i + 1
        while j < size and not (j + 1 < size and labels[j] == labels[j + 1]):
            j += 1
        segments.append((False, i, j))
        i = j
    return segments


def _absorb_singletons(sizes: list[int]) -> list[int]:
    """Merge size-1 entries into the previous block (the next one at the start)."""
    blocks: list[int] = []
    pending = 0
    for size in sizes:
        if size == 1:
            if blocks:
                merged = blocks.pop() + 1
                blocks.extend(split_run(merged) if merged == 4 else [merged])
            else:
                pending += 1
            continue
        size += pending
        pending = 0
        blocks.extend(split_run(size) if size >= 4 else [size])
    if pending:
        raise EspError("partition", "sequence consists of a single leftover symbol")
    return blocks


def partition_level(labels: Sequence[int]) -> list[list[int]]:
    """Partition one level into consecutive blocks of 2 or 3 labels.

    Args:
        labels: The level's labels, length >= 2.

    Returns:
        The blocks, whose concatenation is the input.

    Raises:
        EspError: If the level has fewer than two labels.
    """
    if len(labels) < 2:
        raise EspError("partition", f"need length >= 2, got {len(labels)}")
    sizes: list[int] = []
    for is_run, start, end in _segments(labels):
        if is_run:
            sizes.extend(split_run(end - start))
        else:
            sizes.extend(_varying_pieces(labels[start:end]))

    blocks: list[list[int]] = []
    offset = 0
    for size in _absorb_singletons(sizes):
        blocks.append(list(labels[offset : offset + size]))
        offset += size
    return blocks
