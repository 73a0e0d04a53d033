"""Transcript records, dependency-based round counting and byte totals."""

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

SETUP_TAG = 0x00


@dataclass(frozen=True, slots=True)
class TranscriptEntry:
    """One sent frame as recorded by its sender.

    Attributes:
        party: Sender name ("A" or "B").
        seq: Index of the frame among the sender's sends (0-based).
        tag: Message tag.
        nbytes: Frame size on the wire, header included.
        phase: Protocol phase the frame belongs to.
        received_before: Frames the sender had received when sending it.
    """

    party: str
    seq: int
    tag: int
    nbytes: int
    phase: str
    received_before: int


@dataclass(frozen=True)
class Transcript:
    entries: tuple[TranscriptEntry, ...] = ()

    @classmethod
    def merge(cls, *sides: Iterable[TranscriptEntry]) -> "Transcript":
        """Combine the send records of both endpoints in a stable order."""
        entries = [entry for side in sides for entry in side]
        entries.sort(key=lambda e: (e.party, e.seq))
        return cls(tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def phases(self) -> list[str]:
        seen: dict[str, None] = {}
        for entry in sorted(self.entries, key=lambda e: e.seq):
            seen.setdefault(entry.phase, None)
        return list(seen)

    def for_phase(self, phase: str) -> "Transcript":
        return Transcript(tuple(e for e in self.entries if e.phase == phase))


def _entry_rounds(transcript: Transcript) -> dict[TranscriptEntry, int]:
    by_party: dict[str, list[TranscriptEntry]] = {}
    for entry in transcript.entries:
        by_party.setdefault(entry.party, []).append(entry)
    rounds: dict[TranscriptEntry, int] = {}

    def round_of(entry: TranscriptEntry) -> int:
        if entry in rounds:
            return rounds[entry]
        depth = 1
        for party, sent in by_party.items():
            if party == entry.party:
                continue
            for peer in sent:
                if peer.seq < entry.received_before and peer.phase == entry.phase:
                    depth = max(depth, round_of(peer) + 1)
        rounds[entry] = depth
        return depth

    for entry in transcript.entries:
        round_of(entry)
    return rounds


def round_accounting(transcript: Transcript) -> int:
    """Number of communication rounds in the transcript.

    A frame sent without having received anything in its phase belongs to
    round 1; otherwise it belongs to one round after the latest peer frame
    that had reached its sender. Rounds of consecutive phases add up.
    """
    total = 0
    for phase in transcript.phases:
        rounds = _entry_rounds(transcript.for_phase(phase))
        total += max(rounds.values(), default=0)
    return total


@dataclass(frozen=True, slots=True)
class MessageBytes:
    phase: str
    sender: str
    tag: int
    count: int
    nbytes: int


@dataclass(frozen=True)
class Metrics:
    """Rounds and communication of a protocol run.

    `bytes_a_to_b` and `bytes_b_to_a` exclude the setup (public key) frames,
    which are totalled in `setup_bytes`. Together they equal the sum of the
    breakdown.
    """

    rounds: int
    bytes_a_to_b: int
    bytes_b_to_a: int
    setup_bytes: int
    breakdown: tuple[MessageBytes, ...] = ()
    rounds_by_phase: dict[str, int] = field(default_factory=dict)
    wall_time: dict[str, float] = field(default_factory=dict)

    @property
    def total_bytes(self) -> int:
        return self.bytes_a_to_b + self.bytes_b_to_a + self.setup_bytes

    def bytes_for_tags(self, *tags: int) -> int:
        return sum(item.nbytes for item in self.breakdown if item.tag in tags)

    def report_items(self, include_timings: bool = False) -> list[tuple[str, str]]:
        """Key/value pairs in a fixed order for the text report."""
        items = [
            ("rounds", str(self.rounds)),
            *((f"rounds.{phase}", str(n)) for phase, n in self.rounds_by_phase.items()),
            ("bytes_a_to_b", str(self.bytes_a_to_b)),
            ("bytes_b_to_a", str(self.bytes_b_to_a)),
            ("bytes_setup", str(self.setup_bytes)),
        ]
        for item in self.breakdown:
            key = f"bytes.{item.phase}.{item.sender}.0x{item.tag:02x}"
            items.append((key, f"{item.nbytes}/{item.count}"))
        if include_timings:
            for phase, seconds in self.wall_time.items():
                items.append((f"time.{phase}", f"{seconds:.6f}"))
        return items


def metrics_snapshot(
    transcript: Transcript,
    wall_time: dict[str, float] | None = None,
    sender_a: str = "A",
) -> Metrics:
    """Aggregate a complete transcript into Metrics."""
    counts: Counter[tuple[str, str, int]] = Counter()
    sizes: Counter[tuple[str, str, int]] = Counter()
    order: dict[str, int] = {phase: i for i, phase in enumerate(transcript.phases)}
    for entry in transcript.entries:
        key = (entry.phase, entry.party, entry.tag)
        counts[key] += 1
        sizes[key] += entry.nbytes
    breakdown = tuple(
        MessageBytes(phase, sender, tag, counts[(phase, sender, tag)], sizes[(phase, sender, tag)])
        for phase, sender, tag in sorted(counts, key=lambda k: (order[k[0]], k[1], k[2]))
    )
    setup = sum(item.nbytes for item in breakdown if item.tag == SETUP_TAG)
    a_to_b = sum(
        item.nbytes for item in breakdown if item.sender == sender_a and item.tag != SETUP_TAG
    )
    b_to_a = sum(
        item.nbytes for item in breakdown if item.sender != sender_a and item.tag != SETUP_TAG
    )
    return Metrics(
        rounds=round_accounting(transcript),
        bytes_a_to_b=a_to_b,
        bytes_b_to_a=b_to_a,
        setup_bytes=setup,
        breakdown=breakdown,
        rounds_by_phase={
            phase: round_accounting(transcript.for_phase(phase)) for phase in transcript.phases
        },
        wall_time=dict(wall_time or {}),
    )
