"""Wire schema of the protocol messages.

Every message is one transport frame whose tag is a `MessageTag`. Vector
messages start with a u32 element count. All integers are little-endian.
"""

import struct
from enum import IntEnum
from typing import Sequence

import numpy as np

from src.he2 import Ciphertext, He2Backend, He2Error, PublicKey
from src.transport import Frame

_COUNT = struct.Struct("<I")
_CARDINALITY = struct.Struct("<Q")
_NAME_LENGTH = struct.Struct("<B")
_SIGNED = np.dtype("<i8")


class MessageTag(IntEnum):
    SETUP = 0x00
    ENC_BIT_VECTOR = 0x01
    BLINDED_RANKS = 0x02
    DECRYPTED_RANKS = 0x03
    UNION_CARDINALITY = 0x04
    ENC_VECTOR = 0x05
    BLINDED_DIFFS = 0x06


class MessageError(Exception):
    """A message body that does not follow the schema."""

    def __init__(self, tag: MessageTag, message: str) -> None:
        self.tag = tag
        self.message = message
        super().__init__(f"[{tag.name}] {message}")


def _read_count(tag: MessageTag, body: bytes) -> int:
    if len(body) < _COUNT.size:
        raise MessageError(tag, "missing element count")
    return _COUNT.unpack_from(body)[0]


def encode_public_key(backend: He2Backend, pk: PublicKey) -> Frame:
    name = backend.name.encode("ascii")
    return Frame(
        MessageTag.SETUP, _NAME_LENGTH.pack(len(name)) + name + backend.encode_public_key(pk)
    )


def decode_public_key(backend: He2Backend, frame: Frame) -> PublicKey:
    body = frame.body
    if not body:
        raise MessageError(MessageTag.SETUP, "empty public key")
    (length,) = _NAME_LENGTH.unpack_from(body)
    name = body[1 : 1 + length].decode("ascii", errors="replace")
    if name != backend.name:
        raise MessageError(
            MessageTag.SETUP, f"peer uses backend {name!r}, local backend is {backend.name!r}"
        )
    try:
        return backend.decode_public_key(body[1 + length :])
    except He2Error as e:
        raise MessageError(MessageTag.SETUP, str(e)) from e


def encode_ciphertexts(
    tag: MessageTag, backend: He2Backend, cts: Sequence[Ciphertext]
) -> Frame:
    return Frame(tag, _COUNT.pack(len(cts)) + backend.encode_many(cts))


def decode_ciphertexts(
    tag: MessageTag, backend: He2Backend, pk: PublicKey, frame: Frame
) -> list[Ciphertext]:
    count = _read_count(tag, frame.body)
    try:
        cts, offset = backend.decode_many(pk, frame.body, _COUNT.size, count)
    except He2Error as e:
        raise MessageError(tag, e.message) from e
    if offset != len(frame.body):
        raise MessageError(tag, f"{len(frame.body) - offset} trailing bytes")
    return cts


def encode_values(tag: MessageTag, values: Sequence[int]) -> Frame:
    return Frame(tag, _COUNT.pack(len(values)) + np.asarray(values, dtype=_SIGNED).tobytes())


def decode_values(tag: MessageTag, frame: Frame) -> list[int]:
    count = _read_count(tag, frame.body)
    payload = frame.body[_COUNT.size :]
    if len(payload) != count * _SIGNED.itemsize:
        raise MessageError(
            tag, f"expected {count * _SIGNED.itemsize} value bytes, got {len(payload)}"
        )
    return np.frombuffer(payload, dtype=_SIGNED).tolist()


def encode_cardinality(n: int) -> Frame:
    return Frame(MessageTag.UNION_CARDINALITY, _CARDINALITY.pack(n))


def decode_cardinality(frame: Frame) -> int:
    if len(frame.body) != _CARDINALITY.size:
        raise MessageError(MessageTag.UNION_CARDINALITY, f"bad body length {len(frame.body)}")
    return _CARDINALITY.unpack(frame.body)[0]
