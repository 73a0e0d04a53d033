"""Per-party protocol state and the two-party runner."""

import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator, TypeVar

from src.config import ProtocolParams
from src.he2 import He2Backend, He2Error, KeyPair, PublicKey, get_backend
from src.protocol.messages import (
    MessageError,
    MessageTag,
    decode_public_key,
    encode_public_key,
)
from src.transport import Channel, InProcChannel, TransportError

logger = logging.getLogger(__name__)

T = TypeVar("T")
U = TypeVar("U")

PARTIES = ("A", "B")


class ProtocolError(Exception):
    """A protocol step failed on one side.

    Attributes:
        party: The party that detected the failure.
        stage: The protocol step.
        message: The error message.
    """

    def __init__(self, party: str, stage: str, message: str) -> None:
        self.party = party
        self.stage = stage
        self.message = message
        super().__init__(f"[{party}:{stage}] {message}")

    def __reduce__(self):
        return type(self), (self.party, self.stage, self.message)


def party_rng(seed: int | None, party: str) -> random.Random:
    """Independent per-party randomness; OS entropy without a seed."""
    if seed is None:
        return random.SystemRandom()
    return random.Random(f"{seed}:{party}")


@dataclass
class PartySession:
    """State one party carries across the protocol phases.

    Attributes:
        party: "A" or "B".
        channel: Endpoint towards the peer.
        params: Shared protocol parameters.
        backend: Encryption backend instance owned by this party.
        rng: Source of blinds, signs and permutations.
        keypair: Own key pair, created on first use.
        peer_pk: Peer public key, learned from its setup message.
    """

    party: str
    channel: Channel
    params: ProtocolParams
    backend: He2Backend
    rng: random.Random
    keypair: KeyPair | None = None
    peer_pk: PublicKey | None = None
    wall_time: dict[str, float] = field(default_factory=dict)

    @classmethod
    def create(
        cls, party: str, channel: Channel, params: ProtocolParams, seed: int | None = None
    ) -> "PartySession":
        return cls(
            party=party,
            channel=channel,
            params=params,
            backend=get_backend(params.backend),
            rng=party_rng(seed, party),
        )

    @contextmanager
    def step(self, stage: str) -> Iterator[None]:
        """Attribute backend, transport and schema failures to this party."""
        try:
            yield
        except ProtocolError:
            raise
        except (He2Error, TransportError, MessageError) as e:
            raise ProtocolError(self.party, stage, str(e)) from e

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        self.channel.set_phase(name)
        started = time.perf_counter()
        try:
            yield
        finally:
            self.wall_time[name] = self.wall_time.get(name, 0.0) + time.perf_counter() - started

    def ensure_keypair(self) -> KeyPair:
        if self.keypair is None:
            with self.step("keygen"):
                self.keypair = self.backend.keygen(
                    self.params.security_bits, self.params.message_bound, self.rng
                )
            logger.debug("keypair_ready", extra={"party": self.party})
        return self.keypair

    def send_public_key(self) -> None:
        keypair = self.ensure_keypair()
        with self.step("setup"):
            self.channel.send(encode_public_key(self.backend, keypair.pk))

    def recv_public_key(self) -> PublicKey:
        with self.step("setup"):
            frame = self.channel.recv_expect(MessageTag.SETUP)
            self.peer_pk = decode_public_key(self.backend, frame)
        return self.peer_pk


def run_parties(
    party_a: Callable[[Channel], T],
    party_b: Callable[[Channel], U],
    channels: tuple[Channel, Channel] | None = None,
    timeout: float | None = 60.0,
) -> tuple[T, U]:
    """Run both state machines concurrently and return both results.

    The first failure of either side is re-raised after both threads end;
    a failing side closes its channel so the peer stops waiting.
    """
    chan_a, chan_b = channels or InProcChannel.pair(PARTIES, timeout)

    def guarded(fn: Callable[[Channel], T], chan: Channel) -> T:
        try:
            return fn(chan)
        except BaseException:
            chan.close()
            raise

    with ThreadPoolExecutor(max_workers=2, thread_name_prefix="party") as pool:
        future_a = pool.submit(guarded, party_a, chan_a)
        future_b = pool.submit(guarded, party_b, chan_b)
        errors = []
        results = []
        for future in (future_a, future_b):
            try:
                results.append(future.result())
            except BaseException as e:
                errors.append(e)
    if errors:
        # prefer the root cause over the peer's closed-channel symptom
        errors.sort(key=lambda e: "closed" in str(e))
        raise errors[0]
    return results[0], results[1]
