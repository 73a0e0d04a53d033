"""Tests for round counting and byte totals."""

from src.transport import (
    Transcript,
    TranscriptEntry,
    metrics_snapshot,
    round_accounting,
)


def entry(party, seq, tag, nbytes, received_before, phase="phase1"):
    return TranscriptEntry(party, seq, tag, nbytes, phase, received_before)


def three_round_exchange(phase="phase1"):
    """Both send at once, B answers, A answers B."""
    return [
        entry("A", 0, 0x01, 100, 0, phase),
        entry("B", 0, 0x01, 100, 0, phase),
        entry("B", 1, 0x02, 40, 1, phase),
        entry("A", 1, 0x03, 30, 2, phase),
    ]


class TestRoundAccounting:
    """Tests for round_accounting."""

    def test_simultaneous_sends_share_a_round(self):
        """Frames sent before anything was received are all round 1."""
        transcript = Transcript.merge([entry("A", 0, 1, 10, 0)], [entry("B", 0, 1, 10, 0)])
        assert round_accounting(transcript) == 1

    def test_dependency_chain(self):
        """Each reply to the latest peer frame opens a new round."""
        assert round_accounting(Transcript.merge(three_round_exchange())) == 3

    def test_batch_is_one_round(self):
        """Many frames sent without waiting count once."""
        batch = [entry("A", i, 5, 10, 0) for i in range(4)]
        reply = [entry("B", 0, 6, 10, 4)]
        assert round_accounting(Transcript.merge(batch, reply)) == 2

    def test_phases_add_up(self):
        """Rounds are counted per phase and summed."""
        first = three_round_exchange("phase1")
        second = [
            entry("A", 2, 0x05, 50, 2, "phase2"),
            entry("B", 2, 0x06, 50, 3, "phase2"),
        ]
        assert round_accounting(Transcript.merge(first, second)) == 5

    def test_empty(self):
        """No frames, no rounds."""
        assert round_accounting(Transcript()) == 0


class TestMetricsSnapshot:
    """Tests for metrics_snapshot."""

    def test_totals(self):
        """Setup frames are split out of the directional totals."""
        transcript = Transcript.merge(
            [entry("A", 0, 0x00, 20, 0), entry("A", 1, 0x03, 30, 1)],
            [entry("B", 0, 0x00, 20, 0), entry("B", 1, 0x02, 40, 1)],
        )
        metrics = metrics_snapshot(transcript)
        assert metrics.setup_bytes == 40
        assert metrics.bytes_a_to_b == 30
        assert metrics.bytes_b_to_a == 40
        assert metrics.total_bytes == sum(item.nbytes for item in metrics.breakdown)
        assert metrics.bytes_for_tags(0x02, 0x03) == 70

    def test_report_items(self):
        """Keys come in a fixed order; timings only on request."""
        metrics = metrics_snapshot(Transcript.merge(three_round_exchange()), {"phase1": 0.5})
        keys = [key for key, _ in metrics.report_items()]
        assert keys[:5] == ["rounds", "rounds.phase1", "bytes_a_to_b", "bytes_b_to_a", "bytes_setup"]
        assert "bytes.phase1.A.0x01" in keys
        assert not any(key.startswith("time.") for key in keys)
        timed = dict(metrics.report_items(include_timings=True))
        assert timed["time.phase1"] == "0.500000"
        assert timed["bytes.phase1.B.0x01"] == "100/1"

    def test_rounds_by_phase(self):
        """Per-phase rounds are reported alongside the total."""
        metrics = metrics_snapshot(Transcript.merge(three_round_exchange()))
        assert metrics.rounds == 3
        assert metrics.rounds_by_phase == {"phase1": 3}
