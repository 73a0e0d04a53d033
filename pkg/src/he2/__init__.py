"""Two-level homomorphic encryption backends."""

from src.he2.base import (
    CIPHERTEXT_HEADER,
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
from src.he2.clear import ClearBackend
from src.he2.paillier import PaillierBackend

BACKENDS: dict[str, type[He2Backend]] = {
    ClearBackend.name: ClearBackend,
    PaillierBackend.name: PaillierBackend,
}


def get_backend(name: str) -> He2Backend:
    """Fresh backend instance by name ("clear" or "crypto")."""
    try:
        return BACKENDS[name]()
    except KeyError:
        raise He2Error("backend", f"unknown backend {name!r}") from None


__all__ = [
    "BACKENDS",
    "CIPHERTEXT_HEADER",
    "SUPPORTED_SECURITY_BITS",
    "Ciphertext",
    "ClearBackend",
    "He2Backend",
    "He2Error",
    "KeyMismatchError",
    "KeyPair",
    "LevelError",
    "MessageOutOfBoundError",
    "PaillierBackend",
    "PublicKey",
    "SecretKey",
    "UnsupportedKeySizeError",
    "get_backend",
]
