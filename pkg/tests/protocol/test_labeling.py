"""Tests for the secure consistent labeling."""

import random

import numpy as np
import pytest
from scipy import stats

from src.config import ProtocolParams
from src.he2 import ClearBackend
from src.oracles import reference_labeling
from src.protocol import (
    LabelSet,
    MessageTag,
    ProtocolError,
    blind_ranks,
    build_bit_vector,
    decrypt_ranks,
    encrypted_prefix_ranks,
    encrypted_union,
    run_phase1,
    run_phase1_sets,
    unblind,
)
from src.protocol.labeling import BlindedRank
from src.protocol.messages import decode_values
from src.transport import InProcChannel


class _RecordingChannel(InProcChannel):
    """Keeps every frame it receives."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.received = []

    def _read(self):
        frame = super()._read()
        self.received.append(frame)
        return frame


@pytest.fixture
def clear():
    backend = ClearBackend()
    return backend, backend.keygen(rng=random.Random(21))


def _params(m, **kwargs):
    return ProtocolParams.build(modulus=m, timeout=10, **kwargs)


class TestBitVector:
    """Tests for build_bit_vector."""

    def test_indicator(self):
        """Positions of the labels are set, nothing else."""
        bits = build_bit_vector(LabelSet.of([3, 0, 3]), 5)
        assert bits.tolist() == [1, 0, 0, 1, 0]
        assert bits.popcount == 2

    def test_label_out_of_range(self):
        """Labels must be below m."""
        with pytest.raises(ProtocolError) as exc:
            build_bit_vector(LabelSet.of([1, 9], owner="B"), 5)
        assert exc.value.party == "B"

    def test_union(self):
        """union is the positionwise OR."""
        u = build_bit_vector(LabelSet.of([1]), 4).union(build_bit_vector(LabelSet.of([2]), 4))
        assert u.tolist() == [0, 1, 1, 0]


class TestEncryptedRanks:
    """Tests for the encrypted union and prefix ranks."""

    def test_union_and_ranks(self, clear):
        """Prefix sums of the encrypted union give the ranks."""
        backend, kp = clear
        x = build_bit_vector(LabelSet.of([1, 4]), 8)
        y = build_bit_vector(LabelSet.of([4, 6]), 8)
        enc_x = backend.encrypt_many(kp.pk, x.tolist())
        union = encrypted_union(backend, enc_x, y, kp.pk)
        assert [backend.decrypt(kp.sk, c) for c in union] == x.union(y).tolist()
        ranks = encrypted_prefix_ranks(backend, union, [6, 1, 7, 6])
        assert [(q, backend.decrypt(kp.sk, c)) for q, c in ranks] == [(6, 3), (1, 1), (7, 3), (6, 3)]

    def test_union_length_mismatch(self, clear):
        """Vectors of different length cannot be combined."""
        backend, kp = clear
        with pytest.raises(ValueError):
            encrypted_union(backend, backend.encrypt_many(kp.pk, [0, 1]), build_bit_vector(LabelSet.of([]), 3), kp.pk)

    def test_query_out_of_range(self, clear):
        """Queries must address a position of the union."""
        backend, kp = clear
        with pytest.raises(ValueError):
            encrypted_prefix_ranks(backend, backend.encrypt_many(kp.pk, [1, 1], level=2), [2])

    def test_blind_and_unblind(self, clear):
        """Decrypting and removing the blinds restores the ranks."""
        backend, kp = clear
        rng = random.Random(2)
        ranks = backend.encrypt_many(kp.pk, [2, 5], level=2)
        blinded = blind_ranks(backend, kp.pk, ranks, 1 << 20, rng)
        values = decrypt_ranks(backend, kp.sk, [b.ciphertext for b in blinded])
        assert unblind(values, blinded, 5) == [2, 5]

    def test_unblind_rejects_out_of_range(self, clear):
        """A rank outside 1..n is a protocol failure."""
        backend, kp = clear
        item = BlindedRank(backend.encrypt(kp.pk, 0, level=2), blind=10)
        with pytest.raises(ProtocolError) as exc:
            unblind([17], [item], 5, party="B")
        assert exc.value.stage == "unblind"

    def test_blinded_values_uniform(self, clear):
        """Blinded values are uniform over [rank, rank + R)."""
        backend, kp = clear
        rng = random.Random(99)
        blind_range = 16
        rank = backend.encrypt(kp.pk, 3, level=2)
        blinded = blind_ranks(backend, kp.pk, [rank] * 16000, blind_range, rng)
        values = np.array(decrypt_ranks(backend, kp.sk, [b.ciphertext for b in blinded])) - 3
        observed = np.bincount(values, minlength=blind_range)
        assert observed.shape == (blind_range,)
        _, p_value = stats.chisquare(observed)
        assert p_value > 0.001


class TestRunPhase1:
    """End-to-end labeling between two threads."""

    def test_ranks_match_reference(self):
        """Each party gets the rank of its labels within the union."""
        labels_a = LabelSet.of([1, 5, 7], "A")
        labels_b = LabelSet.of([5, 9], "B")
        res_a, res_b, metrics, _ = run_phase1_sets(labels_a, labels_b, _params(16), seed=1)
        expected = reference_labeling(labels_a, labels_b)
        assert res_a.final_labels == {1: 1, 5: 2, 7: 3}
        assert res_b.final_labels == {5: 2, 9: 4}
        assert res_a.final_labels == {k: expected[k] for k in labels_a}
        assert res_a.n == res_b.n == 4
        assert metrics.rounds == 3

    def test_crypto_backend(self):
        """The Paillier backend yields the same labels."""
        params = _params(16, backend="crypto")
        res_a, res_b, metrics, _ = run_phase1_sets(
            LabelSet.of([0, 15], "A"), LabelSet.of([3, 15], "B"), params, seed=2
        )
        assert res_a.final_labels == {0: 1, 15: 3}
        assert res_b.final_labels == {3: 2, 15: 3}
        assert res_a.n == 3
        assert metrics.rounds == 3

    def test_empty_overlap_and_full_overlap(self):
        """Disjoint and identical sets label consistently."""
        res_a, res_b, _, _ = run_phase1_sets(
            LabelSet.of([2, 3], "A"), LabelSet.of([2, 3], "B"), _params(8), seed=3
        )
        assert res_a == res_b
        assert res_a.n == 2
        res_a, res_b, _, _ = run_phase1_sets(
            LabelSet.of([0], "A"), LabelSet.of([7], "B"), _params(8), seed=3
        )
        assert (res_a.final_labels, res_b.final_labels, res_a.n) == ({0: 1}, {7: 2}, 2)

    def test_texts(self):
        """Labels from parsed texts agree on shared substrings."""
        params = _params(1031)
        res_a, res_b, _ = run_phase1(b"ACGTACGTTT", b"TTACGTACGA", params, seed=4)
        shared = set(res_a.final_labels) & set(res_b.final_labels)
        assert shared
        assert all(res_a.final_labels[k] == res_b.final_labels[k] for k in shared)
        assert res_a.n == len(set(res_a.final_labels) | set(res_b.final_labels))

    def test_padding_hides_label_count(self):
        """With padded queries the rank message size does not depend on |T|."""
        params = _params(64, n_cap=10, pad_queries=True)
        _, _, small, _ = run_phase1_sets(LabelSet.of([1], "A"), LabelSet.of([2], "B"), params, seed=5)
        _, _, large, _ = run_phase1_sets(
            LabelSet.of(range(1, 10), "A"), LabelSet.of([2], "B"), params, seed=5
        )
        tags = (MessageTag.BLINDED_RANKS, MessageTag.DECRYPTED_RANKS)
        assert small.bytes_for_tags(*tags) == large.bytes_for_tags(*tags)

    def test_padding_overflow(self):
        """More labels than n_cap cannot be padded."""
        params = _params(64, n_cap=2, pad_queries=True)
        with pytest.raises(ProtocolError) as exc:
            run_phase1_sets(LabelSet.of([1, 2, 3], "A"), LabelSet.of([2], "B"), params, seed=6)
        assert exc.value.stage == "pad"

    def test_seeded_runs_repeat(self):
        """A fixed seed gives an identical transcript."""
        params = _params(32)
        runs = [
            run_phase1_sets(LabelSet.of([4, 8], "A"), LabelSet.of([8], "B"), params, seed=7)
            for _ in range(2)
        ]
        assert runs[0][2].breakdown == runs[1][2].breakdown
        assert runs[0][0] == runs[1][0]

    def test_seeds_change_blinds_not_labels(self):
        """Different seeds give different blinded decryptions and the same labels."""
        params = _params(32)
        decrypted = []
        results = []
        for seed in (8, 9):
            channels = _RecordingChannel.pair(timeout=10)
            res_a, res_b, _, _ = run_phase1_sets(
                LabelSet.of([4, 8, 20], "A"), LabelSet.of([8, 30], "B"), params, seed, channels
            )
            results.append((res_a, res_b))
            frames = [f for f in channels[0].received if f.tag == MessageTag.DECRYPTED_RANKS]
            decrypted.append(decode_values(MessageTag.DECRYPTED_RANKS, frames[0]))
        assert results[0] == results[1]
        assert decrypted[0] != decrypted[1]
