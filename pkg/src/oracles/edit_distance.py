"""Exact distances for short strings: Levenshtein and edit distance with moves.

Edit distance with moves counts unit-cost insertions, deletions, renames
and moves of a substring to another position. Computing it is NP-hard, so
`exact_edm` searches exhaustively and gives up beyond a cost cap.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Final, Iterator

from src.esp import Text


class _Exceeds(Enum):
    EXCEEDS_CAP = "exceeds_cap"

    def __repr__(self) -> str:
        return "EXCEEDS_CAP"


# Returned by exact_edm when the distance is larger than the cap.
EXCEEDS_CAP: Final = _Exceeds.EXCEEDS_CAP


@dataclass(frozen=True, slots=True)
class EditOp:
    """One unit-cost edit.

    Attributes:
        kind: "insert", "delete", "rename" or "move".
        position: Target index (insert, rename, move destination in the
            remainder) or the deleted index.
        symbol: Inserted or new symbol; None for delete and move.
        span: Moved [start, end) span of the source; None otherwise.
    """

    kind: str
    position: int
    symbol: int | None = None
    span: tuple[int, int] | None = None

    def apply(self, s: bytes) -> bytes:
        if self.kind == "delete":
            return s[: self.position] + s[self.position + 1 :]
        if self.kind == "insert":
            return s[: self.position] + bytes((self.symbol,)) + s[self.position :]
        if self.kind == "rename":
            return s[: self.position] + bytes((self.symbol,)) + s[self.position + 1 :]
        if self.kind == "move":
            start, end = self.span
            rest = s[:start] + s[end:]
            return rest[: self.position] + s[start:end] + rest[self.position :]
        raise ValueError(f"unknown edit kind {self.kind!r}")


def edit_ops(s: bytes, alphabet: bytes) -> Iterator[EditOp]:
    """Every single edit applicable to `s` over `alphabet`."""
    n = len(s)
    for i in range(n):
        yield EditOp("delete", i)
    for i in range(n + 1):
        for c in alphabet:
            yield EditOp("insert", i, c)
    for i in range(n):
        for c in alphabet:
            if c != s[i]:
                yield EditOp("rename", i, c)
    for start in range(n):
        for end in range(start + 1, n + 1):
            if end - start == n:
                continue
            for k in range(n - (end - start) + 1):
                if k != start:
                    yield EditOp("move", k, span=(start, end))


def neighbours(s: bytes, alphabet: bytes) -> set[bytes]:
    out = {op.apply(s) for op in edit_ops(s, alphabet)}
    out.discard(s)
    return out


@lru_cache(maxsize=4096)
def ball_layers(s: bytes, alphabet: bytes, radius: int) -> tuple[frozenset[bytes], ...]:
    """Cumulative balls: element r holds every string within r edits of s."""
    if radius == 0:
        return (frozenset((s,)),)
    inner = ball_layers(s, alphabet, radius - 1)
    previous = inner[-2] if radius >= 2 else frozenset()
    frontier = inner[-1] - previous
    grown = set(inner[-1])
    for t in frontier:
        grown |= neighbours(t, alphabet)
    return inner + (frozenset(grown),)


def working_alphabet(x: Text, y: Text) -> bytes:
    """Symbols of x and y plus one symbol absent from both."""
    used = set(x) | set(y)
    fresh = next(c for c in range(256) if c not in used)
    return bytes(sorted(used | {fresh}))


def exact_edm(x: Text, y: Text, cost_cap: int) -> int | _Exceeds:
    """Edit distance with moves, exact up to `cost_cap`.

    Grows edit balls around both strings and returns the first k for which
    the ball of radius ceil(k/2) around x meets the ball of radius
    floor(k/2) around y. Every edit is invertible at unit cost, so this is
    the breadth-first distance.

    Returns:
        The distance, or EXCEEDS_CAP if it is larger than `cost_cap`.
    """
    if cost_cap < 0:
        raise ValueError(f"cost cap must be >= 0, got {cost_cap}")
    x, y = bytes(x), bytes(y)
    if x == y:
        return 0
    alphabet = working_alphabet(x, y)
    balls_x = ball_layers(x, alphabet, (cost_cap + 1) // 2)
    balls_y = ball_layers(y, alphabet, cost_cap // 2)
    for k in range(1, cost_cap + 1):
        if not balls_x[(k + 1) // 2].isdisjoint(balls_y[k // 2]):
            return k
    return EXCEEDS_CAP


def levenshtein(x: Text, y: Text) -> int:
    """Insert/delete/rename distance by the two-row dynamic program."""
    if len(x) > len(y):
        x, y = y, x
    current = list(range(len(x) + 1))
    for i in range(1, len(y) + 1):
        previous, current = current, [i] + [0] * len(x)
        for j in range(1, len(x) + 1):
            change = previous[j - 1] + (x[j - 1] != y[i - 1])
            current[j] = min(previous[j] + 1, current[j - 1] + 1, change)
    return current[len(x)]
