"""Two-level scheme from Paillier by the Catalano-Fiore transformation.

A level-1 ciphertext of x is (a, beta) = (x - b mod N, E(b)) for a random
mask b. Two level-1 ciphertexts multiply into

    alpha = E(a1 * a2) * beta2^a1 * beta1^a2      (decrypts to x1*x2 - b1*b2)

together with the pair (beta1, beta2) from which the key owner recovers
b1*b2. When the multiplying party created one operand itself it knows that
mask and folds b1*b2 into alpha, so the level-2 ciphertext stays a single
Paillier ciphertext. Level-2 additions concatenate the pair lists.
"""

import hashlib
import logging
import random
import secrets
import struct

from phe import paillier
from phe.util import invert, powmod

from src.he2.base import (
    SUPPORTED_SECURITY_BITS,
    Ciphertext,
    He2Backend,
    He2Error,
    KeyPair,
    LevelError,
    PublicKey,
    SecretKey,
    UnsupportedKeySizeError,
)

logger = logging.getLogger(__name__)

_U32 = struct.Struct("<I")
_U16 = struct.Struct("<H")


def _key_id(n: int) -> int:
    digest = hashlib.sha256(n.to_bytes((n.bit_length() + 7) // 8, "little")).digest()
    return int.from_bytes(digest[:4], "little")


def _pack_int(value: int) -> bytes:
    raw = value.to_bytes(max(1, (value.bit_length() + 7) // 8), "little")
    return _U16.pack(len(raw)) + raw


def _unpack_int(data: bytes, offset: int) -> tuple[int, int]:
    if offset + _U16.size > len(data):
        raise He2Error("decode_public_key", f"truncated integer at offset {offset}")
    (length,) = _U16.unpack_from(data, offset)
    start = offset + _U16.size
    if start + length > len(data):
        raise He2Error("decode_public_key", f"truncated integer body at offset {start}")
    return int.from_bytes(data[start : start + length], "little"), start + length


class PaillierBackend(He2Backend):
    name = "crypto"

    def __init__(self) -> None:
        self._keys: dict[int, paillier.PaillierPublicKey] = {}

    def keygen(
        self,
        security_bits: int = 256,
        message_bound: int = 2**20,
        rng: random.Random | None = None,
    ) -> KeyPair:
        """Fresh Paillier key with an n of `security_bits` bits.

        Key generation and encryption noise always come from the operating
        system; `rng` is accepted for interface parity only.
        """
        if security_bits not in SUPPORTED_SECURITY_BITS:
            raise UnsupportedKeySizeError(
                "keygen", f"unsupported key size {security_bits}"
            )
        public, private = paillier.generate_paillier_keypair(n_length=security_bits)
        if not 1 <= message_bound < public.n // 2:
            raise He2Error(
                "keygen",
                f"message bound {message_bound} does not fit a {security_bits}-bit modulus",
            )
        key_id = _key_id(public.n)
        logger.debug("paillier_keygen", extra={"bits": security_bits, "key_id": key_id})
        return KeyPair(
            pk=PublicKey(self.name, key_id, message_bound, public),
            sk=SecretKey(self.name, key_id, message_bound, private),
            security_bits=security_bits,
        )

    def _pk_for(self, c: Ciphertext) -> paillier.PaillierPublicKey:
        key = self._keys.get(c.key_id)
        if key is None:
            raise He2Error("lookup", f"no public key registered for key {c.key_id}")
        return key

    def _register(self, pk: PublicKey) -> None:
        self._keys.setdefault(pk.key_id, pk.material)

    @staticmethod
    def _pow(c: int, k: int, nsquare: int) -> int:
        if k >= 0:
            return powmod(c, k, nsquare)
        return powmod(invert(c, nsquare), -k, nsquare)

    def encrypt(
        self, pk: PublicKey, x: int, level: int = 1, rng: random.Random | None = None
    ) -> Ciphertext:
        if level not in (1, 2):
            raise LevelError("encrypt", f"level must be 1 or 2, got {level}")
        self._check_bound("encrypt", x, pk.message_bound)
        self._register(pk)
        n = pk.material.n
        if level == 2:
            alpha = pk.material.raw_encrypt(x % n)
            return Ciphertext(level=2, key_id=pk.key_id, body=(alpha, ()))
        mask = secrets.randbelow(n)
        beta = pk.material.raw_encrypt(mask)
        return Ciphertext(level=1, key_id=pk.key_id, body=((x - mask) % n, beta), mask=mask)

    def add(self, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
        key_id = self._check_key("add", c1, c2)
        level = self._check_level("add", c1, c2)
        key = self._pk_for(c1)
        if level == 1:
            (a1, beta1), (a2, beta2) = c1.body, c2.body
            mask = None
            if c1.mask is not None and c2.mask is not None:
                mask = (c1.mask + c2.mask) % key.n
            body = ((a1 + a2) % key.n, beta1 * beta2 % key.nsquare)
            return Ciphertext(level=1, key_id=key_id, body=body, mask=mask)
        (alpha1, pairs1), (alpha2, pairs2) = c1.body, c2.body
        return Ciphertext(
            level=2, key_id=key_id, body=(alpha1 * alpha2 % key.nsquare, pairs1 + pairs2)
        )

    def scalar_mul(self, c: Ciphertext, k: int) -> Ciphertext:
        key = self._pk_for(c)
        k = int(k)
        if c.level == 1:
            a, beta = c.body
            mask = None if c.mask is None else (k * c.mask) % key.n
            body = ((k * a) % key.n, self._pow(beta, k, key.nsquare))
            return Ciphertext(level=1, key_id=c.key_id, body=body, mask=mask)
        alpha, pairs = c.body
        scaled = tuple((self._pow(p1, k, key.nsquare), p2) for p1, p2 in pairs)
        return Ciphertext(
            level=2, key_id=c.key_id, body=(self._pow(alpha, k, key.nsquare), scaled)
        )

    def multiply(self, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
        key_id = self._check_key("multiply", c1, c2)
        self._check_level("multiply", c1, c2, expected=1)
        key = self._pk_for(c1)
        (a1, beta1), (a2, beta2) = c1.body, c2.body
        alpha = key.raw_encrypt(a1 * a2 % key.n)
        alpha = alpha * powmod(beta2, a1, key.nsquare) % key.nsquare
        alpha = alpha * powmod(beta1, a2, key.nsquare) % key.nsquare
        pairs: tuple[tuple[int, int], ...] = ()
        if c1.mask is not None:
            alpha = alpha * powmod(beta2, c1.mask, key.nsquare) % key.nsquare
        elif c2.mask is not None:
            alpha = alpha * powmod(beta1, c2.mask, key.nsquare) % key.nsquare
        else:
            pairs = ((beta1, beta2),)
        return Ciphertext(level=2, key_id=key_id, body=(alpha, pairs))

    def lift(self, c: Ciphertext) -> Ciphertext:
        self._check_level("lift", c, expected=1)
        key = self._pk_for(c)
        a, beta = c.body
        alpha = key.raw_encrypt(a) * beta % key.nsquare
        return Ciphertext(level=2, key_id=c.key_id, body=(alpha, ()))

    def decrypt(self, sk: SecretKey, c: Ciphertext) -> int:
        self._check_key("decrypt", sk, c)
        private = sk.material
        n = private.public_key.n
        if c.level == 1:
            a, beta = c.body
            value = (a + private.raw_decrypt(beta)) % n
        else:
            alpha, pairs = c.body
            value = private.raw_decrypt(alpha)
            for p1, p2 in pairs:
                value += private.raw_decrypt(p1) * private.raw_decrypt(p2)
            value %= n
        signed = value if value <= n // 2 else value - n
        return self._check_bound("decrypt", signed, sk.message_bound)

    def _widths(self, key_id: int) -> tuple[int, int]:
        key = self._keys[key_id]
        return (key.n.bit_length() + 7) // 8, (key.nsquare.bit_length() + 7) // 8

    def payload(self, c: Ciphertext) -> bytes:
        self._pk_for(c)
        width, width2 = self._widths(c.key_id)
        if c.level == 1:
            a, beta = c.body
            return a.to_bytes(width, "little") + beta.to_bytes(width2, "little")
        alpha, pairs = c.body
        parts = [alpha.to_bytes(width2, "little"), _U32.pack(len(pairs))]
        for p1, p2 in pairs:
            parts.append(p1.to_bytes(width2, "little"))
            parts.append(p2.to_bytes(width2, "little"))
        return b"".join(parts)

    def from_payload(self, pk: PublicKey, level: int, payload: bytes) -> Ciphertext:
        self._register(pk)
        width, width2 = self._widths(pk.key_id)
        if level == 1:
            if len(payload) != width + width2:
                raise He2Error(
                    "deserialize", f"level-1 payload must be {width + width2} bytes, got {len(payload)}"
                )
            a = int.from_bytes(payload[:width], "little")
            beta = int.from_bytes(payload[width:], "little")
            return Ciphertext(level=1, key_id=pk.key_id, body=(a, beta))
        head = width2 + _U32.size
        if len(payload) < head:
            raise He2Error("deserialize", f"level-2 payload shorter than {head} bytes")
        alpha = int.from_bytes(payload[:width2], "little")
        (count,) = _U32.unpack_from(payload, width2)
        if len(payload) != head + 2 * width2 * count:
            raise He2Error(
                "deserialize", f"level-2 payload length {len(payload)} does not hold {count} pairs"
            )
        pairs = []
        offset = head
        for _ in range(count):
            p1 = int.from_bytes(payload[offset : offset + width2], "little")
            p2 = int.from_bytes(payload[offset + width2 : offset + 2 * width2], "little")
            pairs.append((p1, p2))
            offset += 2 * width2
        return Ciphertext(level=2, key_id=pk.key_id, body=(alpha, tuple(pairs)))

    def encode_public_key(self, pk: PublicKey) -> bytes:
        return _U32.pack(pk.key_id) + _pack_int(pk.message_bound) + _pack_int(pk.material.n)

    def decode_public_key(self, data: bytes) -> PublicKey:
        if len(data) < _U32.size:
            raise He2Error("decode_public_key", "truncated key id")
        (key_id,) = _U32.unpack_from(data, 0)
        bound, offset = _unpack_int(data, _U32.size)
        n, offset = _unpack_int(data, offset)
        if offset != len(data):
            raise He2Error("decode_public_key", f"{len(data) - offset} trailing bytes")
        if _key_id(n) != key_id:
            raise He2Error("decode_public_key", f"key id {key_id} does not match the modulus")
        pk = PublicKey(self.name, key_id, bound, paillier.PaillierPublicKey(n))
        self._register(pk)
        return pk
