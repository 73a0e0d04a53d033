"""Secure labeling and L1 protocols between parties A and B."""

from src.protocol.l1 import (
    Phase2Config,
    phase2_helper,
    phase2_owner,
    run_phase2,
    run_phase2_sessions,
)
from src.protocol.labeling import (
    BitVector,
    BlindedRank,
    LabelSet,
    Phase1Result,
    blind_ranks,
    build_bit_vector,
    decrypt_ranks,
    encrypted_prefix_ranks,
    encrypted_union,
    phase1_party,
    run_phase1,
    run_phase1_sets,
    tentative_label_set,
    unblind,
)
from src.protocol.messages import MessageError, MessageTag
from src.protocol.session import (
    PARTIES,
    PartySession,
    ProtocolError,
    party_rng,
    run_parties,
)

__all__ = [
    "PARTIES",
    "BitVector",
    "BlindedRank",
    "LabelSet",
    "MessageError",
    "MessageTag",
    "PartySession",
    "Phase1Result",
    "Phase2Config",
    "ProtocolError",
    "blind_ranks",
    "build_bit_vector",
    "decrypt_ranks",
    "encrypted_prefix_ranks",
    "encrypted_union",
    "party_rng",
    "phase1_party",
    "phase2_helper",
    "phase2_owner",
    "run_parties",
    "run_phase1",
    "run_phase1_sets",
    "run_phase2",
    "run_phase2_sessions",
    "tentative_label_set",
    "unblind",
]
