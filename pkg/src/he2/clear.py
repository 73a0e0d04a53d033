"""Cleartext backend: plaintexts carried with level and key tags.

No cryptography at all. It enforces the same key binding, level discipline
and message bound as the cryptographic backend and serves as its oracle
and as the engine for large-scale protocol runs. Vector operations run on
numpy arrays of the plaintexts.
"""

import random
import struct
from typing import Iterable, Sequence

import numpy as np

from src.he2.base import (
    SUPPORTED_SECURITY_BITS,
    Ciphertext,
    He2Backend,
    He2Error,
    KeyMismatchError,
    KeyPair,
    LevelError,
    MessageOutOfBoundError,
    PublicKey,
    SecretKey,
    UnsupportedKeySizeError,
)

# level, key_id, plaintext (signed 64-bit), little-endian
_PAYLOAD = struct.Struct("<BIq")
_PUBLIC_KEY = struct.Struct("<IQ")
# header and payload of one wire ciphertext, as a numpy record
_WIRE = np.dtype(
    [
        ("level", "u1"),
        ("key_id", "<u4"),
        ("length", "<u4"),
        ("inner_level", "u1"),
        ("inner_key_id", "<u4"),
        ("value", "<i8"),
    ]
)

# Bodies up to this size multiply and accumulate in int64 without overflow.
_SAFE_BODY = 2**31

MAX_CLEAR_BOUND = 2**63 - 1


class ClearBackend(He2Backend):
    name = "clear"

    def keygen(
        self,
        security_bits: int = 256,
        message_bound: int = 2**20,
        rng: random.Random | None = None,
    ) -> KeyPair:
        if security_bits not in SUPPORTED_SECURITY_BITS:
            raise UnsupportedKeySizeError(
                "keygen", f"unsupported key size {security_bits}"
            )
        if not 1 <= message_bound <= MAX_CLEAR_BOUND:
            raise He2Error(
                "keygen", f"message bound must be in [1, 2^63), got {message_bound}"
            )
        key_id = (rng or random.SystemRandom()).getrandbits(32)
        return KeyPair(
            pk=PublicKey(self.name, key_id, message_bound),
            sk=SecretKey(self.name, key_id, message_bound),
            security_bits=security_bits,
        )

    def encrypt(
        self, pk: PublicKey, x: int, level: int = 1, rng: random.Random | None = None
    ) -> Ciphertext:
        if level not in (1, 2):
            raise LevelError("encrypt", f"level must be 1 or 2, got {level}")
        self._check_bound("encrypt", x, pk.message_bound)
        return Ciphertext(level=level, key_id=pk.key_id, body=int(x))

    def add(self, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
        key_id = self._check_key("add", c1, c2)
        level = self._check_level("add", c1, c2)
        return Ciphertext(level=level, key_id=key_id, body=c1.body + c2.body)

    def scalar_mul(self, c: Ciphertext, k: int) -> Ciphertext:
        return Ciphertext(level=c.level, key_id=c.key_id, body=c.body * int(k))

    def multiply(self, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
        key_id = self._check_key("multiply", c1, c2)
        self._check_level("multiply", c1, c2, expected=1)
        return Ciphertext(level=2, key_id=key_id, body=c1.body * c2.body)

    def lift(self, c: Ciphertext) -> Ciphertext:
        self._check_level("lift", c, expected=1)
        return Ciphertext(level=2, key_id=c.key_id, body=c.body)

    def decrypt(self, sk: SecretKey, c: Ciphertext) -> int:
        self._check_key("decrypt", sk, c)
        return self._check_bound("decrypt", c.body, sk.message_bound)

    def payload(self, c: Ciphertext) -> bytes:
        if abs(c.body) > MAX_CLEAR_BOUND:
            raise MessageOutOfBoundError(
                "serialize", f"plaintext {c.body} does not fit the 64-bit clear payload"
            )
        return _PAYLOAD.pack(c.level, c.key_id, c.body)

    def from_payload(self, pk: PublicKey, level: int, payload: bytes) -> Ciphertext:
        if len(payload) != _PAYLOAD.size:
            raise He2Error(
                "deserialize", f"clear payload must be {_PAYLOAD.size} bytes, got {len(payload)}"
            )
        inner_level, key_id, value = _PAYLOAD.unpack(payload)
        if inner_level != level:
            raise LevelError("deserialize", f"header level {level} != payload level {inner_level}")
        if key_id != pk.key_id:
            raise KeyMismatchError("deserialize", f"payload key {key_id} != {pk.key_id}")
        return Ciphertext(level=level, key_id=key_id, body=value)

    def encode_public_key(self, pk: PublicKey) -> bytes:
        return _PUBLIC_KEY.pack(pk.key_id, pk.message_bound)

    def decode_public_key(self, data: bytes) -> PublicKey:
        if len(data) != _PUBLIC_KEY.size:
            raise He2Error("decode_public_key", f"expected {_PUBLIC_KEY.size} bytes, got {len(data)}")
        key_id, bound = _PUBLIC_KEY.unpack(data)
        return PublicKey(self.name, key_id, bound)

    def _bodies(self, cts: Sequence[Ciphertext]) -> np.ndarray | None:
        """Plaintexts as int64, or None when one is too large for vector arithmetic."""
        bodies = [c.body for c in cts]
        if bodies and max(map(abs, bodies)) > _SAFE_BODY:
            return None
        return np.array(bodies, dtype=np.int64)

    def encrypt_many(
        self,
        pk: PublicKey,
        values: Sequence[int],
        level: int = 1,
        rng: random.Random | None = None,
    ) -> list[Ciphertext]:
        if level not in (1, 2):
            raise LevelError("encrypt", f"level must be 1 or 2, got {level}")
        plain = [int(v) for v in values]
        if plain and max(map(abs, plain)) > pk.message_bound:
            for value in plain:
                self._check_bound("encrypt", value, pk.message_bound)
        return [Ciphertext(level=level, key_id=pk.key_id, body=v) for v in plain]

    def encrypted_or_many(
        self, cxs: Sequence[Ciphertext], cys: Sequence[Ciphertext]
    ) -> list[Ciphertext]:
        if len(cxs) != len(cys):
            raise He2Error("encrypted_or", f"length mismatch {len(cxs)} != {len(cys)}")
        if not cxs:
            return []
        key_id = self._check_key("encrypted_or", *cxs, *cys)
        self._check_level("encrypted_or", *cxs, *cys, expected=1)
        x = self._bodies(cxs)
        y = self._bodies(cys)
        if x is None or y is None:
            return super().encrypted_or_many(cxs, cys)
        return [Ciphertext(level=2, key_id=key_id, body=v) for v in (x + y - x * y).tolist()]

    def prefix_sums(
        self, cts: Sequence[Ciphertext], positions: Iterable[int]
    ) -> dict[int, Ciphertext]:
        wanted = sorted(set(positions))
        if not wanted:
            return {}
        if wanted[-1] >= len(cts) or wanted[0] < 0:
            raise He2Error("prefix_sums", f"position outside [0, {len(cts)})")
        head = cts[: wanted[-1] + 1]
        key_id = self._check_key("prefix_sums", *head)
        level = self._check_level("prefix_sums", *head)
        bodies = self._bodies(head)
        if bodies is None:
            return super().prefix_sums(cts, wanted)
        sums = np.cumsum(bodies)
        return {p: Ciphertext(level=level, key_id=key_id, body=int(sums[p])) for p in wanted}

    def encode_many(self, cts: Sequence[Ciphertext]) -> bytes:
        if not cts:
            return b""
        values = [c.body for c in cts]
        if max(map(abs, values)) > MAX_CLEAR_BOUND:
            return super().encode_many(cts)
        records = np.zeros(len(cts), dtype=_WIRE)
        records["level"] = [c.level for c in cts]
        records["key_id"] = [c.key_id for c in cts]
        records["length"] = _PAYLOAD.size
        records["inner_level"] = records["level"]
        records["inner_key_id"] = records["key_id"]
        records["value"] = values
        return records.tobytes()

    def decode_many(
        self, pk: PublicKey, data: bytes, offset: int, count: int
    ) -> tuple[list[Ciphertext], int]:
        end = offset + count * _WIRE.itemsize
        if count and end <= len(data):
            records = np.frombuffer(data, dtype=_WIRE, count=count, offset=offset)
            levels = records["level"]
            if (
                np.all((levels == 1) | (levels == 2))
                and np.all(records["key_id"] == pk.key_id)
                and np.all(records["length"] == _PAYLOAD.size)
                and np.all(records["inner_level"] == levels)
                and np.all(records["inner_key_id"] == pk.key_id)
            ):
                return [
                    Ciphertext(level=level, key_id=pk.key_id, body=value)
                    for level, value in zip(levels.tolist(), records["value"].tolist())
                ], end
        # slow path reports the first bad ciphertext
        return super().decode_many(pk, data, offset, count)
