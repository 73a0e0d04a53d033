"""Two-level homomorphic encryption contract.

Level-1 ciphertexts support additions, scalar multiplication and one
multiplication, which yields a level-2 ciphertext. Level-2 ciphertexts
support additions and scalar multiplication only. Every backend enforces
the key binding, the level discipline and the message bound M.
"""

import random
import struct
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

SUPPORTED_SECURITY_BITS = frozenset({256, 512, 1024, 2048})

# level (1 byte), key_id (4 bytes), payload length (4 bytes)
CIPHERTEXT_HEADER = struct.Struct("<BII")


class He2Error(Exception):
    """Base error of the homomorphic layer.

    Attributes:
        stage: The operation that failed.
        message: The error message.
    """

    def __init__(self, stage: str, message: str) -> None:
        self.stage = stage
        self.message = message
        super().__init__(f"[{stage}] {message}")


class UnsupportedKeySizeError(He2Error):
    """Key size outside SUPPORTED_SECURITY_BITS."""


class KeyMismatchError(He2Error):
    """Ciphertexts (or a ciphertext and a key) bound to different keys."""


class LevelError(He2Error):
    """Level discipline violated (second multiplication, mixed levels)."""


class MessageOutOfBoundError(He2Error):
    """Plaintext outside [-M, M]."""


@dataclass(frozen=True)
class PublicKey:
    """Public half of a key pair; `material` is backend specific."""

    backend: str
    key_id: int
    message_bound: int
    material: Any = None


@dataclass(frozen=True)
class SecretKey:
    backend: str
    key_id: int
    message_bound: int
    material: Any = None


@dataclass(frozen=True)
class KeyPair:
    pk: PublicKey
    sk: SecretKey
    security_bits: int

    @property
    def key_id(self) -> int:
        return self.pk.key_id

    @property
    def message_bound(self) -> int:
        return self.pk.message_bound


@dataclass(frozen=True, slots=True)
class Ciphertext:
    """An encrypted integer.

    Attributes:
        level: 1 (fresh) or 2 (after the multiplication).
        key_id: Identifier of the public key it was produced under.
        body: Backend-specific immutable representation.
        mask: Encryption secret known only to the party that created the
            ciphertext locally; never serialized.
    """

    level: int
    key_id: int
    body: Any
    mask: Any = None


class He2Backend(ABC):
    """Operations shared by all two-level backends."""

    name: str

    def _check_key(self, stage: str, *items: PublicKey | SecretKey | Ciphertext) -> int:
        key_ids = {item.key_id for item in items}
        if len(key_ids) != 1:
            raise KeyMismatchError(stage, f"operands bound to keys {sorted(key_ids)}")
        return key_ids.pop()

    def _check_level(self, stage: str, *cts: Ciphertext, expected: int | None = None) -> int:
        levels = {ct.level for ct in cts}
        if len(levels) != 1:
            raise LevelError(stage, f"mixed ciphertext levels {sorted(levels)}")
        level = levels.pop()
        if expected is not None and level != expected:
            raise LevelError(stage, f"expected level {expected}, got {level}")
        return level

    def _check_bound(self, stage: str, value: int, bound: int) -> int:
        if abs(value) > bound:
            raise MessageOutOfBoundError(
                stage, f"message out of bound: |{value}| > M={bound}"
            )
        return value

    @abstractmethod
    def keygen(
        self,
        security_bits: int = 256,
        message_bound: int = 2**20,
        rng: random.Random | None = None,
    ) -> KeyPair:
        """Generate a fresh key pair."""

    @abstractmethod
    def encrypt(
        self, pk: PublicKey, x: int, level: int = 1, rng: random.Random | None = None
    ) -> Ciphertext:
        """Encrypt |x| <= M at the requested level."""

    @abstractmethod
    def add(self, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
        """Ciphertext of x + y; levels and keys must match."""

    @abstractmethod
    def scalar_mul(self, c: Ciphertext, k: int) -> Ciphertext:
        """Ciphertext of k * x (k may be negative)."""

    @abstractmethod
    def multiply(self, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
        """Level-2 ciphertext of x * y from two level-1 ciphertexts."""

    @abstractmethod
    def lift(self, c: Ciphertext) -> Ciphertext:
        """Level-2 ciphertext of x from a level-1 one, without a multiplication."""

    @abstractmethod
    def decrypt(self, sk: SecretKey, c: Ciphertext) -> int:
        """Exact signed plaintext; raises MessageOutOfBoundError beyond M."""

    @abstractmethod
    def payload(self, c: Ciphertext) -> bytes:
        """Backend-specific serialization of the ciphertext body."""

    @abstractmethod
    def from_payload(self, pk: PublicKey, level: int, payload: bytes) -> Ciphertext:
        """Inverse of `payload` for a ciphertext received under `pk`."""

    @abstractmethod
    def encode_public_key(self, pk: PublicKey) -> bytes:
        """Serialize a public key for the setup exchange."""

    @abstractmethod
    def decode_public_key(self, data: bytes) -> PublicKey:
        """Inverse of `encode_public_key`."""

    def negate(self, c: Ciphertext) -> Ciphertext:
        return self.scalar_mul(c, -1)

    def encrypted_or(self, cx: Ciphertext, cy: Ciphertext) -> Ciphertext:
        """Level-2 ciphertext of x OR y for bits, as x + y - x*y."""
        self._check_level("encrypted_or", cx, cy, expected=1)
        product = self.multiply(cx, cy)
        total = self.lift(self.add(cx, cy))
        return self.add(total, self.negate(product))

    def encrypted_or_many(
        self, cxs: Sequence[Ciphertext], cys: Sequence[Ciphertext]
    ) -> list[Ciphertext]:
        """Positionwise `encrypted_or` of two equally long vectors."""
        if len(cxs) != len(cys):
            raise He2Error("encrypted_or", f"length mismatch {len(cxs)} != {len(cys)}")
        return [self.encrypted_or(cx, cy) for cx, cy in zip(cxs, cys)]

    def prefix_sums(
        self, cts: Sequence[Ciphertext], positions: Iterable[int]
    ) -> dict[int, Ciphertext]:
        """Running sums of `cts` taken at each requested position."""
        wanted = set(positions)
        if wanted and (max(wanted) >= len(cts) or min(wanted) < 0):
            raise He2Error("prefix_sums", f"position outside [0, {len(cts)})")
        snapshots: dict[int, Ciphertext] = {}
        running: Ciphertext | None = None
        for position in range(max(wanted, default=-1) + 1):
            running = cts[position] if running is None else self.add(running, cts[position])
            if position in wanted:
                snapshots[position] = running
        return snapshots

    def encrypt_many(
        self,
        pk: PublicKey,
        values: Sequence[int],
        level: int = 1,
        rng: random.Random | None = None,
    ) -> list[Ciphertext]:
        return [self.encrypt(pk, int(v), level, rng) for v in values]

    def encode_ciphertext(self, c: Ciphertext) -> bytes:
        """Wire form: level, key_id, payload length, payload."""
        body = self.payload(c)
        return CIPHERTEXT_HEADER.pack(c.level, c.key_id, len(body)) + body

    def decode_ciphertext(
        self, pk: PublicKey, data: bytes, offset: int = 0
    ) -> tuple[Ciphertext, int]:
        """Decode one ciphertext at `offset`; returns it and the next offset."""
        end = offset + CIPHERTEXT_HEADER.size
        if end > len(data):
            raise He2Error("decode", f"truncated ciphertext header at offset {offset}")
        level, key_id, length = CIPHERTEXT_HEADER.unpack_from(data, offset)
        if level not in (1, 2):
            raise He2Error("decode", f"invalid level {level} at offset {offset}")
        if key_id != pk.key_id:
            raise KeyMismatchError(
                "decode", f"ciphertext key {key_id} does not match key {pk.key_id}"
            )
        if end + length > len(data):
            raise He2Error(
                "decode", f"truncated ciphertext payload at offset {end}, need {length}"
            )
        ct = self.from_payload(pk, level, bytes(data[end : end + length]))
        return ct, end + length

    def encode_many(self, cts: Sequence[Ciphertext]) -> bytes:
        return b"".join(self.encode_ciphertext(c) for c in cts)

    def decode_many(
        self, pk: PublicKey, data: bytes, offset: int, count: int
    ) -> tuple[list[Ciphertext], int]:
        """Decode `count` consecutive ciphertexts; returns them and the end offset.

        Raises:
            He2Error: Of the failing ciphertext's kind, naming its index.
        """
        cts: list[Ciphertext] = []
        for index in range(count):
            try:
                ct, offset = self.decode_ciphertext(pk, data, offset)
            except He2Error as e:
                raise type(e)(e.stage, f"ciphertext {index} of {count}: {e.message}") from e
            cts.append(ct)
        return cts, offset
