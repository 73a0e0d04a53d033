"""Conflict-probability arithmetic for choosing the hash modulus.

The conservative bound n <= -ln(1 - p) * sqrt(2m) is stricter than what the
approximation 1 - exp(-n^2 / 2m) <= p implies (n <= sqrt(-2m ln(1 - p))).
Both are exposed; `check_bound` and `min_modulus` use the conservative form.
"""

import math

from src.hashing.rolling_hash import HashConfigError

# Relative slack on n^2 <= rhs^2. The reference setting (n=100, p=0.05,
# m=1,900,416) sits 3.2e-7 outside the inequality because the
# constant was rounded; the tolerance admits it and nothing coarser.
BOUND_RELATIVE_TOLERANCE = 1e-6

PUBLISHED_MODULI: dict[int, int] = {
    100: 1031,
    1000: 10313,
    10000: 103123,
    100000: 1031347,
}


def _check_threshold(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise HashConfigError("bound", f"threshold p must be in (0, 1), got {p}")


def conflict_probability(n: int, m: int) -> float:
    """Approximate probability of at least one conflict among n labels.

    Returns exactly 0 for n <= 1, where no pair exists.
    """
    if n < 0 or m < 1:
        raise HashConfigError("conflict", f"need n >= 0 and m >= 1, got n={n} m={m}")
    if n <= 1:
        return 0.0
    return -math.expm1(-(n * n) / (2.0 * m))


def exact_conflict_probability(n: int, m: int) -> float:
    """1 - prod_{i<n} (1 - i/m), the product the approximation comes from."""
    if n < 0 or m < 1:
        raise HashConfigError("conflict", f"need n >= 0 and m >= 1, got n={n} m={m}")
    if n > m:
        return 1.0
    log_no_conflict = sum(math.log1p(-i / m) for i in range(1, n))
    return -math.expm1(log_no_conflict)


def max_labels(p: float, m: int) -> float:
    """Right-hand side of the conservative bound: -ln(1 - p) * sqrt(2m)."""
    _check_threshold(p)
    return -math.log1p(-p) * math.sqrt(2.0 * m)


def check_bound(n: int, p: float, m: int) -> bool:
    """True iff n <= -ln(1 - p) * sqrt(2m).

    Compared as n^2 against the squared right side so that the boolean is
    reproducible; ties within BOUND_RELATIVE_TOLERANCE count as satisfied.
    """
    _check_threshold(p)
    if n <= 0:
        return True
    rhs_squared = math.log1p(-p) ** 2 * 2.0 * m
    return n * n <= rhs_squared * (1.0 + BOUND_RELATIVE_TOLERANCE)


def min_modulus(n: int, p: float) -> int:
    """Smallest m for which `check_bound(n, p, m)` holds."""
    _check_threshold(p)
    if n < 1:
        raise HashConfigError("bound", f"label count must be >= 1, got {n}")
    estimate = max(1, math.ceil(n * n / (2.0 * math.log1p(-p) ** 2)))
    while not check_bound(n, p, estimate):
        estimate += 1
    while estimate > 1 and check_bound(n, p, estimate - 1):
        estimate -= 1
    return estimate


def max_labels_exact(p: float, m: int) -> float:
    """Largest n with 1 - exp(-n^2 / 2m) <= p: sqrt(-2m ln(1 - p))."""
    _check_threshold(p)
    return math.sqrt(-2.0 * m * math.log1p(-p))


def min_modulus_exact(n: int, p: float) -> int:
    """Smallest m with 1 - exp(-n^2 / 2m) <= p."""
    _check_threshold(p)
    if n <= 1:
        return 1
    m = max(1, math.ceil(n * n / (-2.0 * math.log1p(-p))))
    while m > 1 and conflict_probability(n, m - 1) <= p:
        m -= 1
    while conflict_probability(n, m) > p:
        m += 1
    return m


def default_modulus(n_estimate: int) -> int:
    """Pick the tabulated modulus of the smallest bucket covering n_estimate."""
    for bucket in sorted(PUBLISHED_MODULI):
        if n_estimate <= bucket:
            return PUBLISHED_MODULI[bucket]
    return PUBLISHED_MODULI[max(PUBLISHED_MODULI)]
