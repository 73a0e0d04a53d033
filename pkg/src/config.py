"""Run configuration: hashing, encryption, blinding and transport settings.

All settings are loaded from the environment (prefix EDM_, optional .env);
command-line flags are passed as keyword arguments and take precedence.
Protocol parameters are resolved once the modulus is known and validated
before any protocol message is sent.
"""

from dataclasses import dataclass
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.hashing import HashConfig, HashConfigError, default_modulus, min_modulus
from src.he2 import SUPPORTED_SECURITY_BITS

# Decrypted ranks travel as signed 8-byte integers.
MAX_MESSAGE_BOUND = 2**63 - 1


class ConfigError(Exception):
    """Configuration invariant violated.

    Attributes:
        stage: The setting or check that failed.
        message: The error message.
    """

    def __init__(self, stage: str, message: str) -> None:
        self.stage = stage
        self.message = message
        super().__init__(f"[{stage}] {message}")


@dataclass(frozen=True)
class ProtocolParams:
    """Resolved, validated parameters shared by both parties.

    Attributes:
        hash_config: Modulus m and base b of the tentative labels.
        security_bits: Key size of the encryption backend.
        sigma: Statistical hiding parameter of the blinds.
        n_cap: Upper bound on the union size n.
        message_bound: Largest absolute plaintext decryption recovers (M).
        backend: "clear" or "crypto".
        pad_queries: Pad rank queries to n_cap so their count hides |T|.
        timeout: Seconds a party waits for a peer message.
    """

    hash_config: HashConfig
    security_bits: int = 256
    sigma: int = 30
    n_cap: int = 1
    message_bound: int = 2
    backend: str = "clear"
    pad_queries: bool = False
    timeout: float = 60.0

    @property
    def modulus(self) -> int:
        return self.hash_config.m

    @property
    def blind_range(self) -> int:
        """R = n_cap * 2^sigma; blinds are drawn from [0, R)."""
        return self.n_cap << self.sigma

    @classmethod
    def build(
        cls,
        modulus: int,
        base: int = 256,
        security_bits: int = 256,
        sigma: int = 30,
        n_cap: int | None = None,
        message_bound: int | None = None,
        backend: str = "clear",
        pad_queries: bool = False,
        timeout: float = 60.0,
    ) -> "ProtocolParams":
        """Fill in defaults and check the decryption invariant.

        n_cap defaults to the modulus (the union never exceeds m labels) and
        M defaults to n_cap + R, the largest blinded rank.

        Raises:
            ConfigError: If n_cap + R > M, M does not fit 63 bits, or a
                parameter is out of range.
        """
        try:
            hash_config = HashConfig(m=modulus, b=base)
        except HashConfigError as e:
            raise ConfigError("modulus", str(e)) from e
        if security_bits not in SUPPORTED_SECURITY_BITS:
            raise ConfigError(
                "security_bits",
                f"{security_bits} not in {sorted(SUPPORTED_SECURITY_BITS)}",
            )
        if sigma < 0:
            raise ConfigError("sigma", f"sigma must be >= 0, got {sigma}")
        cap = modulus if n_cap is None else n_cap
        if cap < 1:
            raise ConfigError("n_cap", f"n_cap must be >= 1, got {cap}")
        blind_range = cap << sigma
        bound = cap + blind_range if message_bound is None else message_bound
        if cap + blind_range > bound:
            raise ConfigError(
                "message_bound",
                f"n_cap + R = {cap + blind_range} exceeds M = {bound}; "
                "lower sigma or raise the message bound",
            )
        if bound > MAX_MESSAGE_BOUND:
            raise ConfigError(
                "message_bound", f"M = {bound} does not fit a signed 64-bit value"
            )
        return cls(
            hash_config=hash_config,
            security_bits=security_bits,
            sigma=sigma,
            n_cap=cap,
            message_bound=bound,
            backend=backend,
            pad_queries=pad_queries,
            timeout=timeout,
        )


class RunConfig(BaseSettings):
    """Settings of one protocol run.

    EDM_SEED fixes both parties' randomness; without a seed the parties
    draw from the operating system.
    """

    model_config = SettingsConfigDict(
        env_prefix="EDM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    modulus: int | None = Field(
        default=None, ge=2, description="Hash modulus m; chosen from n when unset."
    )
    base: int = Field(default=256, ge=2, description="Rolling hash base b.")
    security_bits: int = Field(default=256, description="Encryption key size.")
    backend: Literal["clear", "crypto"] = Field(
        default="clear", description="Two-level encryption backend."
    )
    sigma: int = Field(
        default=30, ge=0, le=62, description="Statistical hiding bits of the blinds."
    )
    seed: int | None = Field(default=None, description="Seed of both parties' randomness.")
    transport: Literal["inproc", "socket"] = Field(default="inproc")
    host: str = Field(default="127.0.0.1")
    port: int = Field(default=0, ge=0, le=65535, description="0 picks a free port.")
    n_cap: int | None = Field(default=None, ge=1, description="Bound on the union size.")
    pad_queries: bool = Field(default=False)
    message_bound: int | None = Field(default=None, ge=1)
    auto_m: bool = Field(
        default=False, description="Derive m from the conflict bound instead of the table."
    )
    conflict_threshold: float = Field(default=0.05, gt=0.0, lt=1.0)
    fasta: bool = Field(default=False, description="Strip FASTA headers and whitespace.")
    timeout: float = Field(default=60.0, gt=0, description="Peer wait timeout in seconds.")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(default="WARNING")

    @field_validator("security_bits")
    @classmethod
    def _validate_security_bits(cls, v: int) -> int:
        if v not in SUPPORTED_SECURITY_BITS:
            raise ValueError(f"security_bits must be one of {sorted(SUPPORTED_SECURITY_BITS)}")
        return v

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper_log_level(cls, v: object) -> object:
        return v.upper() if isinstance(v, str) else v

    def select_modulus(self, n_estimate: int) -> int:
        """Explicit modulus, else the conflict bound (auto_m), else the table."""
        if self.modulus is not None:
            return self.modulus
        if self.auto_m:
            return max(2, min_modulus(max(1, n_estimate), self.conflict_threshold))
        return default_modulus(n_estimate)

    def protocol_params(self, n_estimate: int) -> ProtocolParams:
        return ProtocolParams.build(
            modulus=self.select_modulus(n_estimate),
            base=self.base,
            security_bits=self.security_bits,
            sigma=self.sigma,
            n_cap=self.n_cap,
            message_bound=self.message_bound,
            backend=self.backend,
            pad_queries=self.pad_queries,
            timeout=self.timeout,
        )
