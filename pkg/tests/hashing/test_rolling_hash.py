"""Tests for the rolling hash."""

import random

import pytest
from scipy.stats import chisquare

from src.hashing import (
    HashConfig,
    HashConfigError,
    HashValue,
    combine,
    combine_all,
    rolling_hash,
)


@pytest.fixture
def cfg():
    """Small modulus so wrap-around is exercised."""
    return HashConfig(m=1031, b=256)


class TestHashConfig:
    """Tests for HashConfig validation."""

    def test_rejects_tiny_modulus(self):
        """A modulus below 2 is rejected."""
        with pytest.raises(HashConfigError) as exc:
            HashConfig(m=1)
        assert exc.value.stage == "config"

    def test_rejects_tiny_base(self):
        """A base below 2 is rejected."""
        with pytest.raises(HashConfigError):
            HashConfig(m=101, b=1)

    def test_error_message_format(self):
        """HashConfigError formats as [stage] message."""
        error = HashConfigError("hash", "bad symbol")
        assert str(error) == "[hash] bad symbol"


class TestRollingHash:
    """Tests for rolling_hash."""

    def test_single_symbol(self, cfg):
        """H(a) is the symbol value mod m."""
        assert rolling_hash(b"a", cfg) == HashValue(97 % 1031, 1)

    def test_polynomial_value(self, cfg):
        """H(ab) = a*b + b mod m."""
        assert rolling_hash(b"ab", cfg).value == (97 * 256 + 98) % 1031

    def test_empty_sequence(self, cfg):
        """The empty sequence hashes to 0 with length 0."""
        assert rolling_hash(b"", cfg) == HashValue(0, 0)

    def test_symbol_outside_alphabet(self):
        """A symbol >= b is rejected."""
        with pytest.raises(HashConfigError) as exc:
            rolling_hash([1, 5], HashConfig(m=101, b=4))
        assert "position 1" in exc.value.message

    def test_deterministic(self, cfg):
        """Equal sequences hash equally."""
        assert rolling_hash(b"hello", cfg) == rolling_hash(b"hello", cfg)


class TestCombine:
    """Tests for combine and combine_all."""

    def test_concatenation(self, cfg):
        """H(xy) equals combine(H(x), H(y)) for random splits."""
        rng = random.Random(7)
        for _ in range(200):
            text = bytes(rng.randrange(256) for _ in range(rng.randrange(2, 40)))
            cut = rng.randrange(1, len(text))
            joined = combine(rolling_hash(text[:cut], cfg), rolling_hash(text[cut:], cfg), cfg)
            assert joined == rolling_hash(text, cfg)

    def test_empty_identity(self, cfg):
        """Combining with the empty hash changes nothing."""
        hx = rolling_hash(b"xyz", cfg)
        assert combine(HashValue(0, 0), hx, cfg) == hx
        assert combine(hx, HashValue(0, 0), cfg) == hx

    def test_combine_all_three_parts(self, cfg):
        """combine_all folds left to right."""
        parts = [rolling_hash(p, cfg) for p in (b"ab", b"c", b"de")]
        assert combine_all(parts, cfg) == rolling_hash(b"abcde", cfg)

    def test_associative(self, cfg):
        """combine(combine(a, b), c) == combine(a, combine(b, c)) on random triples."""
        rng = random.Random(8)
        for _ in range(500):
            a, b, c = (
                HashValue(rng.randrange(cfg.m), rng.randrange(0, 50)) for _ in range(3)
            )
            assert combine(combine(a, b, cfg), c, cfg) == combine(a, combine(b, c, cfg), cfg)


class TestUniformity:
    """Hash values of random strings spread evenly over the buckets."""

    def test_chi_square_over_buckets(self, cfg):
        """10^5 random 8-symbol strings at m=1031 pass chi-square at 0.001."""
        rng = random.Random(9)
        counts = [0] * cfg.m
        for _ in range(100_000):
            counts[rolling_hash(rng.randbytes(8), cfg).value] += 1
        assert chisquare(counts).pvalue > 0.001
