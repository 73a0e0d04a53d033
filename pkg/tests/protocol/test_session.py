"""Tests for party sessions and the two-party runner."""

import pickle
import random

import pytest

from src.config import ProtocolParams
from src.protocol import PartySession, ProtocolError, party_rng, run_parties
from src.transport import InProcChannel, TransportError


class TestPartyRng:
    """Tests for party_rng."""

    def test_seeded_parties_differ(self):
        """One seed yields different streams for A and B."""
        assert party_rng(5, "A").random() != party_rng(5, "B").random()
        assert party_rng(5, "A").random() == party_rng(5, "A").random()

    def test_unseeded_uses_os(self):
        """Without a seed the OS generator is used."""
        assert isinstance(party_rng(None, "A"), random.SystemRandom)


class TestPartySession:
    """Tests for PartySession."""

    def test_key_exchange(self):
        """Each side learns the other's public key."""
        params = ProtocolParams.build(modulus=16)
        a, b = InProcChannel.pair(timeout=5)
        sa = PartySession.create("A", a, params, seed=1)
        sb = PartySession.create("B", b, params, seed=1)
        sa.send_public_key()
        sb.send_public_key()
        assert sb.recv_public_key() == sa.keypair.pk
        assert sa.recv_public_key() == sb.keypair.pk
        assert sa.keypair.message_bound == params.message_bound

    def test_step_wraps_transport_errors(self):
        """Lower-layer failures are attributed to the party and step."""
        a, _ = InProcChannel.pair(timeout=0.05)
        session = PartySession.create("A", a, ProtocolParams.build(modulus=16), seed=1)
        with pytest.raises(ProtocolError) as exc:
            with session.step("waiting"):
                a.recv()
        assert (exc.value.party, exc.value.stage) == ("A", "waiting")
        assert isinstance(exc.value.__cause__, TransportError)

    def test_phase_timing(self):
        """phase() tags the channel and accumulates time."""
        a, _ = InProcChannel.pair()
        session = PartySession.create("A", a, ProtocolParams.build(modulus=16), seed=1)
        with session.phase("phase1"):
            assert a.phase == "phase1"
        assert session.wall_time["phase1"] >= 0.0


class TestRunParties:
    """Tests for run_parties."""

    def test_results_in_party_order(self):
        """Both return values come back as (A, B)."""
        assert run_parties(lambda ch: ch.party, lambda ch: ch.party, timeout=5) == ("A", "B")

    def test_root_cause_wins(self):
        """The failing side's error is raised, not the peer's closed channel."""

        def failing(channel):
            raise ProtocolError(channel.party, "boom", "exploded")

        def waiting(channel):
            channel.recv()

        with pytest.raises(ProtocolError) as exc:
            run_parties(waiting, failing, timeout=5)
        assert exc.value.stage == "boom"

    def test_error_pickles(self):
        """ProtocolError crosses process boundaries intact."""
        error = pickle.loads(pickle.dumps(ProtocolError("B", "union", "bad")))
        assert (error.party, error.stage, error.message) == ("B", "union", "bad")
