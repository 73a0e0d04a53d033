"""Rolling hash used for tentative node labels.

H(x) = sum(s_i * b^(l - i)) mod m for x = (s_1, ..., s_l) in [0, b)^l.
Hashes of a concatenation are derived from the hashes of its parts with
`combine`, so a parse tree can label every node from its children.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

logger = logging.getLogger(__name__)


class HashConfigError(Exception):
    """Raised for invalid hash parameters or out-of-alphabet symbols.

    Attributes:
        stage: The operation that rejected its input.
        message: The error message.
    """

    def __init__(self, stage: str, message: str) -> None:
        self.stage = stage
        self.message = message
        super().__init__(f"[{stage}] {message}")


@dataclass(frozen=True, slots=True)
class HashConfig:
    """Parameters shared by both parties.

    Attributes:
        m: Modulus, the number of possible hash values.
        b: Base and alphabet bound; symbols live in [0, b).
    """

    m: int
    b: int = 256

    def __post_init__(self) -> None:
        if self.m < 2:
            raise HashConfigError("config", f"modulus must be >= 2, got {self.m}")
        if self.b < 2:
            raise HashConfigError("config", f"base must be >= 2, got {self.b}")


@dataclass(frozen=True, slots=True)
class HashValue:
    """A hash value together with the length of the hashed sequence."""

    value: int
    length: int


@lru_cache(maxsize=65536)
def power_of_base(b: int, m: int, exponent: int) -> int:
    """Return b^exponent mod m (cached; lru_cache is thread-safe)."""
    return pow(b, exponent, m)


def rolling_hash(seq: Iterable[int], cfg: HashConfig) -> HashValue:
    """Hash a symbol sequence by Horner evaluation of the polynomial.

    Args:
        seq: Symbols, each in [0, cfg.b).
        cfg: Shared hash parameters.

    Returns:
        The hash value with the sequence length attached.

    Raises:
        HashConfigError: If a symbol is outside the alphabet.
    """
    value = 0
    length = 0
    for symbol in seq:
        if not 0 <= symbol < cfg.b:
            raise HashConfigError(
                "hash", f"symbol {symbol} at position {length} outside [0, {cfg.b})"
            )
        value = (value * cfg.b + symbol) % cfg.m
        length += 1
    return HashValue(value=value, length=length)


def combine(hx: HashValue, hy: HashValue, cfg: HashConfig) -> HashValue:
    """Return H(xy) from H(x) and H(y) in constant time."""
    shifted = hx.value * power_of_base(cfg.b, cfg.m, hy.length)
    return HashValue(value=(shifted + hy.value) % cfg.m, length=hx.length + hy.length)


def combine_all(values: Iterable[HashValue], cfg: HashConfig) -> HashValue:
    """Fold `combine` left to right over a sequence of hash values."""
    acc = HashValue(value=0, length=0)
    for hv in values:
        acc = combine(acc, hv, cfg)
    return acc
