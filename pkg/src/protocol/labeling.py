"""Secure consistent labeling.

Each party ends up knowing the rank of each of its own tentative labels
within the union of both label sets, and the union size n, while learning
nothing about the peer's labels beyond what those ranks imply. Both
relabeling directions run side by side in three rounds:

  1. send own public key and own bits encrypted under own key;
  2. compute the encrypted union under the peer's key, take prefix ranks at
     own labels, blind them and send them;
  3. decrypt the peer's blinded ranks and send the plaintexts back.

Each party then removes its blinds.
"""

import logging
import random
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from src.config import ProtocolParams
from src.esp import EspTree, Text, build_esp_tree
from src.he2 import Ciphertext, He2Backend, PublicKey, SecretKey
from src.protocol.messages import (
    MessageTag,
    decode_ciphertexts,
    decode_values,
    encode_ciphertexts,
    encode_values,
)
from src.protocol.session import PARTIES, PartySession, ProtocolError, run_parties
from src.transport import Channel, Metrics, Transcript, metrics_snapshot

logger = logging.getLogger(__name__)

PHASE = "phase1"


@dataclass(frozen=True)
class LabelSet:
    """Distinct tentative labels of one party, ascending."""

    labels: tuple[int, ...]
    owner: str = "A"

    @classmethod
    def of(cls, labels: Sequence[int], owner: str = "A") -> "LabelSet":
        return cls(tuple(sorted(set(int(label) for label in labels))), owner)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in set(self.labels)


@dataclass(frozen=True)
class BitVector:
    """Indicator vector of a label set over positions [0, m)."""

    bits: np.ndarray

    def __len__(self) -> int:
        return int(self.bits.shape[0])

    @property
    def popcount(self) -> int:
        return int(np.count_nonzero(self.bits))

    def union(self, other: "BitVector") -> "BitVector":
        if len(self) != len(other):
            raise ValueError(f"length mismatch {len(self)} != {len(other)}")
        return BitVector(self.bits | other.bits)

    def tolist(self) -> list[int]:
        return self.bits.astype(np.int64).tolist()


@dataclass(frozen=True, slots=True)
class BlindedRank:
    """A blinded rank ciphertext and the blind its sender keeps."""

    ciphertext: Ciphertext
    blind: int


@dataclass(frozen=True)
class Phase1Result:
    """Final labels of one party.

    Attributes:
        final_labels: Tentative label -> rank in {1..n}.
        n: Size of the union of both label sets.
    """

    final_labels: dict[int, int]
    n: int


def tentative_label_set(tree: EspTree, owner: str = "A") -> LabelSet:
    """Distinct tentative labels appearing in the tree."""
    return LabelSet.of((node.tentative_label.value for node in tree.nodes()), owner)


def build_bit_vector(s: LabelSet, m: int) -> BitVector:
    """Exact indicator of `s` over [0, m).

    Raises:
        ProtocolError: If a label is >= m.
    """
    bits = np.zeros(m, dtype=bool)
    if s.labels:
        top = s.labels[-1]
        if top >= m or s.labels[0] < 0:
            raise ProtocolError(s.owner, "bit_vector", f"label {top} outside [0, {m})")
        bits[list(s.labels)] = True
    return BitVector(bits)


def encrypted_union(
    backend: He2Backend,
    enc_x: Sequence[Ciphertext],
    y: BitVector,
    pk: PublicKey,
    rng: random.Random | None = None,
) -> list[Ciphertext]:
    """Positionwise OR of encrypted bits with local bits, under `pk`.

    The local bits are encrypted under the same key first; the result is
    at level 2.
    """
    if len(enc_x) != len(y):
        raise ValueError(f"encrypted vector has {len(enc_x)} positions, local {len(y)}")
    enc_y = backend.encrypt_many(pk, y.tolist(), level=1, rng=rng)
    return backend.encrypted_or_many(enc_x, enc_y)


def encrypted_prefix_ranks(
    backend: He2Backend, union: Sequence[Ciphertext], queries: Sequence[int]
) -> list[tuple[int, Ciphertext]]:
    """Encrypted rank of each query position in one running-sum pass.

    The rank of position l counts the set union bits at positions <= l.
    Results follow the order of `queries`; repeated queries are allowed.
    """
    wanted = set(queries)
    if wanted and (max(wanted) >= len(union) or min(wanted) < 0):
        raise ValueError(f"query outside [0, {len(union)})")
    snapshots = backend.prefix_sums(union, wanted)
    return [(q, snapshots[q]) for q in queries]


def blind_ranks(
    backend: He2Backend,
    pk: PublicKey,
    ranks: Sequence[Ciphertext],
    blind_range: int,
    rng: random.Random,
) -> list[BlindedRank]:
    """Add an independent uniform blind from [0, blind_range) to each rank."""
    if blind_range < 1:
        raise ValueError(f"blind range must be >= 1, got {blind_range}")
    blinded = []
    for ct in ranks:
        r = rng.randrange(blind_range)
        mask = backend.encrypt(pk, r, level=ct.level, rng=rng)
        blinded.append(BlindedRank(backend.add(ct, mask), r))
    return blinded


def decrypt_ranks(
    backend: He2Backend, sk: SecretKey, blinded: Sequence[Ciphertext]
) -> list[int]:
    return [backend.decrypt(sk, ct) for ct in blinded]


def unblind(
    values: Sequence[int],
    blinded: Sequence[BlindedRank],
    n: int,
    party: str = "A",
) -> list[int]:
    """Remove the blinds and check every rank lies in {1..n}.

    Raises:
        ProtocolError: On a length mismatch or a rank outside {1..n}.
    """
    if len(values) != len(blinded):
        raise ProtocolError(
            party, "unblind", f"{len(values)} values for {len(blinded)} blinded ranks"
        )
    ranks = [value - item.blind for value, item in zip(values, blinded)]
    for rank in ranks:
        if not 1 <= rank <= n:
            raise ProtocolError(party, "unblind", f"rank {rank} outside 1..{n}")
    return ranks


def _rank_queries(labels: LabelSet, params: ProtocolParams) -> list[int]:
    """Own labels, then the last position (whose rank is n), then padding."""
    last = params.modulus - 1
    queries = [*labels.labels, last]
    if params.pad_queries:
        if len(labels) > params.n_cap:
            raise ProtocolError(
                labels.owner,
                "pad",
                f"{len(labels)} labels exceed n_cap={params.n_cap}",
            )
        queries.extend([last] * (params.n_cap - len(labels)))
    return queries


def phase1_party(session: PartySession, labels: LabelSet) -> Phase1Result:
    """One side of the labeling protocol; the peer runs the same steps."""
    params = session.params
    backend = session.backend
    m = params.modulus
    channel = session.channel
    with session.phase(PHASE):
        bits = build_bit_vector(labels, m)
        keypair = session.ensure_keypair()
        session.send_public_key()
        with session.step("send_bits"):
            enc_bits = backend.encrypt_many(keypair.pk, bits.tolist(), level=1, rng=session.rng)
            channel.send(encode_ciphertexts(MessageTag.ENC_BIT_VECTOR, backend, enc_bits))
        del enc_bits

        peer_pk = session.recv_public_key()
        with session.step("union"):
            frame = channel.recv_expect(MessageTag.ENC_BIT_VECTOR)
            peer_bits = decode_ciphertexts(MessageTag.ENC_BIT_VECTOR, backend, peer_pk, frame)
            if len(peer_bits) != m:
                raise ProtocolError(
                    session.party, "union", f"peer sent {len(peer_bits)} bits, expected {m}"
                )
            union = encrypted_union(backend, peer_bits, bits, peer_pk, session.rng)
        del peer_bits

        queries = _rank_queries(labels, params)
        with session.step("ranks"):
            ranks = encrypted_prefix_ranks(backend, union, queries)
            blinded = blind_ranks(
                backend, peer_pk, [ct for _, ct in ranks], params.blind_range, session.rng
            )
            channel.send(
                encode_ciphertexts(
                    MessageTag.BLINDED_RANKS, backend, [b.ciphertext for b in blinded]
                )
            )
        del union, ranks

        with session.step("decrypt"):
            frame = channel.recv_expect(MessageTag.BLINDED_RANKS)
            incoming = decode_ciphertexts(MessageTag.BLINDED_RANKS, backend, keypair.pk, frame)
            values = decrypt_ranks(backend, keypair.sk, incoming)
            channel.send(encode_values(MessageTag.DECRYPTED_RANKS, values))

        with session.step("unblind"):
            frame = channel.recv_expect(MessageTag.DECRYPTED_RANKS)
            returned = decode_values(MessageTag.DECRYPTED_RANKS, frame)
        if len(returned) != len(blinded):
            raise ProtocolError(
                session.party, "unblind", f"{len(returned)} values for {len(blinded)} ranks"
            )
        n = returned[len(labels)] - blinded[len(labels)].blind
        if not len(labels) <= n <= m:
            raise ProtocolError(session.party, "unblind", f"union size {n} is inconsistent")
        ranks_only = unblind(returned[: len(labels)], blinded[: len(labels)], n, session.party)

    final = dict(zip(labels.labels, ranks_only))
    if any(a >= b for a, b in zip(ranks_only, ranks_only[1:])):
        raise ProtocolError(session.party, "unblind", "ranks are not strictly increasing")
    logger.info(
        "phase1_complete", extra={"party": session.party, "labels": len(labels), "n": n}
    )
    return Phase1Result(final_labels=final, n=n)


def run_phase1(
    text_a: Text,
    text_b: Text,
    params: ProtocolParams,
    seed: int | None = None,
    channels: tuple[Channel, Channel] | None = None,
) -> tuple[Phase1Result, Phase1Result, Metrics]:
    """Parse both texts and run both sides of the labeling protocol."""
    sides = {
        party: tentative_label_set(build_esp_tree(text, params.hash_config), party)
        for party, text in zip(PARTIES, (text_a, text_b))
    }
    result_a, result_b, metrics, _ = run_phase1_sets(
        sides["A"], sides["B"], params, seed, channels
    )
    return result_a, result_b, metrics


def run_phase1_sets(
    labels_a: LabelSet,
    labels_b: LabelSet,
    params: ProtocolParams,
    seed: int | None = None,
    channels: tuple[Channel, Channel] | None = None,
) -> tuple[Phase1Result, Phase1Result, Metrics, tuple[PartySession, PartySession]]:
    """Run the labeling protocol on given label sets.

    Returns both results, the metrics and both sessions (whose keys a
    following L1 phase reuses).
    """

    def side(labels: LabelSet) -> Callable[[Channel], tuple[Phase1Result, PartySession]]:
        def run(channel: Channel) -> tuple[Phase1Result, PartySession]:
            session = PartySession.create(channel.party, channel, params, seed)
            return phase1_party(session, labels), session

        return run

    (result_a, session_a), (result_b, session_b) = run_parties(
        side(labels_a), side(labels_b), channels, params.timeout
    )
    transcript = Transcript.merge(session_a.channel.sent, session_b.channel.sent)
    wall = {PHASE: max(session_a.wall_time[PHASE], session_b.wall_time[PHASE])}
    return result_a, result_b, metrics_snapshot(transcript, wall), (session_a, session_b)
