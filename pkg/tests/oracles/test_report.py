"""Tests for the approximation reports."""

from fractions import Fraction

import pytest

from src.oracles import (
    all_strings,
    approximation_report,
    conflict_free_vectors,
    lower_bound_sweep,
    reference_labeling,
)


class TestReferenceLabeling:
    """Tests for reference_labeling."""

    def test_ranks_of_union(self):
        """The i-th smallest label of the union gets rank i."""
        assert reference_labeling("bac", "cd") == {"a": 1, "b": 2, "c": 3, "d": 4}

    def test_empty(self):
        """No labels, no ranks."""
        assert reference_labeling([], []) == {}


class TestConflictFreeVectors:
    """Tests for conflict_free_vectors."""

    def test_dense_ranks(self):
        """'aabb' and 'bbaa' share all but their roots."""
        vx, vy, n = conflict_free_vectors(b"aabb", b"bbaa")
        assert n == 6
        assert sorted(vx.counts) != sorted(vy.counts)
        assert sum(abs(a - b) for a, b in zip(vx.dense(n), vy.dense(n))) == 2


class TestApproximationReport:
    """Tests for approximation_report."""

    def test_swap(self):
        """'ab' to 'ba': L1 2, one move, Levenshtein 2."""
        report = approximation_report(b"ab", b"ba")
        assert (report.l1, report.edm, report.levenshtein) == (2, 1, 2)
        assert report.ratio == Fraction(2)
        assert report.lower_bound_holds

    def test_equal_strings(self):
        """No ratio is defined at distance 0."""
        report = approximation_report(b"abc", b"abc")
        assert report.edm == 0
        assert report.ratio is None

    def test_exceeds_cap(self):
        """An undecided distance leaves the bound unknown."""
        report = approximation_report(b"aaaa", b"bbbb", cap=1)
        assert report.edm_exceeds_cap
        assert report.lower_bound_holds is None


class TestLowerBoundSweep:
    """edm <= 2 * L1 over exhaustive string sets."""

    def test_all_strings(self):
        """Strings from length 1 up to max_len."""
        assert all_strings(b"ab", 2) == [b"a", b"b", b"aa", b"ab", b"ba", b"bb"]

    def test_short_binary(self):
        """No violation on binary strings up to length 4."""
        report = lower_bound_sweep(max_len=4, cap=4)
        assert report.pairs == 30 * 30
        assert report.violations == ()
        assert report.decided + report.exceeded == report.pairs

    @pytest.mark.slow
    def test_binary_up_to_six(self):
        """No violation on binary strings up to length 6."""
        report = lower_bound_sweep(max_len=6, cap=4)
        assert report.violations == ()
        assert report.decided > 0
