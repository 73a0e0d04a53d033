"""Tests for characteristic vectors."""

from src.esp import CharacteristicVector, build_esp_tree, characteristic_vector, l1_distance
from src.hashing import HashConfig

CFG = HashConfig(m=2**61 - 1)


class TestCharacteristicVector:
    """Tests for CharacteristicVector."""

    def test_by_yield(self):
        """'aaaa' counts a four times, aa twice and aaaa once."""
        vector = characteristic_vector(build_esp_tree(b"aaaa", CFG), by_yield=True)
        assert vector.counts == {b"a": 4, b"aa": 2, b"aaaa": 1}
        assert vector.total == 7

    def test_zero_counts_dropped(self):
        """Absent and zero entries read as 0."""
        vector = CharacteristicVector({"x": 0, "y": 2})
        assert len(vector) == 1
        assert vector["x"] == 0
        assert vector["z"] == 0

    def test_relabel_and_dense(self):
        """Relabelling maps keys to ranks; dense lists ranks 1..n."""
        vector = CharacteristicVector({10: 3, 20: 1})
        relabelled = vector.relabel({10: 2, 20: 4})
        assert relabelled.dense(5) == [0, 3, 0, 1, 0]

    def test_relabel_merges_colliding_keys(self):
        """Keys mapped to one rank add up."""
        vector = CharacteristicVector({"a": 1, "b": 2})
        assert vector.relabel({"a": 1, "b": 1}).counts == {1: 3}


class TestL1Distance:
    """Tests for l1_distance."""

    def test_swapped_halves(self):
        """'aabb' and 'bbaa' differ only in their roots."""
        u = characteristic_vector(build_esp_tree(b"aabb", CFG), by_yield=True)
        v = characteristic_vector(build_esp_tree(b"bbaa", CFG), by_yield=True)
        assert l1_distance(u, v) == 2

    def test_identical_texts(self):
        """Equal texts are at distance 0."""
        u = characteristic_vector(build_esp_tree(b"GATTACA", CFG))
        v = characteristic_vector(build_esp_tree(b"GATTACA", CFG))
        assert l1_distance(u, v) == 0

    def test_symmetric(self):
        """The distance does not depend on argument order."""
        u = characteristic_vector(build_esp_tree(b"abcabcab", CFG))
        v = characteristic_vector(build_esp_tree(b"abcbca", CFG))
        assert l1_distance(u, v) == l1_distance(v, u) > 0


class TestSmallVectors:
    """Hand-checked vectors."""

    def test_two_symbol_tree(self):
        """'ab' counts each leaf and the root once."""
        vector = characteristic_vector(build_esp_tree(b"ab", CFG), by_yield=True)
        assert vector.counts == {b"a": 1, b"b": 1, b"ab": 1}

    def test_sparse_difference(self):
        """{1:1, 3:2} and {2:1, 3:2} differ by 2."""
        assert l1_distance(CharacteristicVector({1: 1, 3: 2}), CharacteristicVector({2: 1, 3: 2})) == 2

    def test_total_is_node_count(self):
        """The counts add up to the number of nodes."""
        tree = build_esp_tree(b"ACGTTGCAACGT", CFG)
        assert characteristic_vector(tree).total == tree.node_count
