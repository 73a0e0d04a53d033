"""Two-party L1 distance of characteristic vectors over final labels.

The key owner (A) sends its vector encrypted coordinate by coordinate. The
helper (B) subtracts its own vector, multiplies every difference by an
independent random sign, shuffles, and returns the result. A decrypts and
sums absolute values. A learns the multiset of absolute differences, no
coordinate positions and no signs.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

from src.config import ProtocolParams
from src.esp import CharacteristicVector
from src.he2 import MessageOutOfBoundError
from src.protocol.messages import (
    MessageTag,
    decode_cardinality,
    decode_ciphertexts,
    encode_cardinality,
    encode_ciphertexts,
)
from src.protocol.session import PARTIES, PartySession, ProtocolError, run_parties
from src.transport import Channel, InProcChannel, Metrics, Transcript, metrics_snapshot

logger = logging.getLogger(__name__)

PHASE = "phase2"


@dataclass(frozen=True)
class Phase2Config:
    n: int
    reveal_policy: Literal["sum_only_best_effort"] = "sum_only_best_effort"

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"label space size must be >= 0, got {self.n}")


def phase2_owner(session: PartySession, vector: Sequence[int], cfg: Phase2Config) -> int:
    """Key owner's side; returns the L1 distance."""
    backend = session.backend
    channel = session.channel
    if len(vector) != cfg.n:
        raise ProtocolError(session.party, "l1", f"vector has {len(vector)} entries, n={cfg.n}")
    with session.phase(PHASE):
        if session.keypair is None:
            session.send_public_key()
        keypair = session.ensure_keypair()
        with session.step("send_vector"):
            channel.send(encode_cardinality(cfg.n))
            enc = backend.encrypt_many(keypair.pk, vector, level=1, rng=session.rng)
            channel.send(encode_ciphertexts(MessageTag.ENC_VECTOR, backend, enc))
        with session.step("decrypt_diffs"):
            frame = channel.recv_expect(MessageTag.BLINDED_DIFFS)
            diffs = decode_ciphertexts(MessageTag.BLINDED_DIFFS, backend, keypair.pk, frame)
            if len(diffs) != cfg.n:
                raise ProtocolError(
                    session.party, "decrypt_diffs", f"got {len(diffs)} differences, n={cfg.n}"
                )
            try:
                total = sum(abs(backend.decrypt(keypair.sk, d)) for d in diffs)
            except MessageOutOfBoundError as e:
                raise ProtocolError(
                    session.party,
                    "decrypt_diffs",
                    f"{e.message}; raise the message bound above the largest count difference",
                ) from e
    logger.info("phase2_complete", extra={"party": session.party, "n": cfg.n, "l1": total})
    return total


def phase2_helper(session: PartySession, vector: Sequence[int], cfg: Phase2Config) -> None:
    """Helper's side: sign-blind and shuffle the encrypted differences."""
    backend = session.backend
    channel = session.channel
    with session.phase(PHASE):
        peer_pk = session.peer_pk if session.peer_pk is not None else session.recv_public_key()
        with session.step("blind_diffs"):
            n = decode_cardinality(channel.recv_expect(MessageTag.UNION_CARDINALITY))
            if n != cfg.n or len(vector) != n:
                raise ProtocolError(
                    session.party,
                    "blind_diffs",
                    f"peer label space n={n}, local n={cfg.n} with {len(vector)} entries",
                )
            frame = channel.recv_expect(MessageTag.ENC_VECTOR)
            enc = decode_ciphertexts(MessageTag.ENC_VECTOR, backend, peer_pk, frame)
            if len(enc) != n:
                raise ProtocolError(
                    session.party, "blind_diffs", f"peer sent {len(enc)} entries, n={n}"
                )
            diffs = []
            for ct, own in zip(enc, vector):
                own_ct = backend.encrypt(peer_pk, -int(own), level=1, rng=session.rng)
                sign = session.rng.choice((1, -1))
                diffs.append(backend.scalar_mul(backend.add(ct, own_ct), sign))
            session.rng.shuffle(diffs)
            channel.send(encode_ciphertexts(MessageTag.BLINDED_DIFFS, backend, diffs))
    logger.info("phase2_helped", extra={"party": session.party, "n": n})


def run_phase2_sessions(
    sessions: tuple[PartySession, PartySession],
    v_a: Sequence[int],
    v_b: Sequence[int],
    cfg: Phase2Config,
) -> tuple[int, Metrics]:
    """Run the L1 phase on existing sessions (typically after labeling)."""
    session_a, session_b = sessions
    start_a = len(session_a.channel.sent)
    start_b = len(session_b.channel.sent)

    def owner(_: Channel) -> int:
        return phase2_owner(session_a, v_a, cfg)

    def helper(_: Channel) -> None:
        phase2_helper(session_b, v_b, cfg)

    l1, _ = run_parties(
        owner, helper, (session_a.channel, session_b.channel), session_a.params.timeout
    )
    transcript = Transcript.merge(
        session_a.channel.sent[start_a:], session_b.channel.sent[start_b:]
    )
    wall = {PHASE: max(session_a.wall_time[PHASE], session_b.wall_time[PHASE])}
    return l1, metrics_snapshot(transcript, wall)


def run_phase2(
    v_a: CharacteristicVector,
    v_b: CharacteristicVector,
    n: int,
    params: ProtocolParams,
    seed: int | None = None,
    channels: tuple[Channel, Channel] | None = None,
) -> tuple[int, Metrics]:
    """Standalone L1 phase over vectors indexed by {1..n}.

    The parties exchange the owner's public key first, inside the first
    round.
    """
    cfg = Phase2Config(n=n)
    chan_a, chan_b = channels or InProcChannel.pair(PARTIES, params.timeout)
    sessions = (
        PartySession.create(chan_a.party, chan_a, params, seed),
        PartySession.create(chan_b.party, chan_b, params, seed),
    )
    return run_phase2_sessions(sessions, v_a.dense(n), v_b.dense(n), cfg)
