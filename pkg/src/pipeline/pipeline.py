"""Pipeline for a full secure EDM run.

Stages: validate the configuration, parse both texts, run the labeling
phase, relabel the characteristic vectors, run the L1 phase, and report.
Both parties execute `party_main`; the in-process transport runs them on
two threads, the socket transport in two processes.
"""

import logging
import socket
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Literal

from src.config import ProtocolParams, RunConfig
from src.esp import EspError, Text, build_esp_tree, characteristic_vector
from src.hashing import HashConfig, HashConfigError
from src.oracles import ORACLE_MODULUS
from src.protocol import (
    PARTIES,
    PartySession,
    Phase1Result,
    Phase2Config,
    ProtocolError,
    phase1_party,
    phase2_helper,
    phase2_owner,
    run_parties,
    tentative_label_set,
)
from src.transport import (
    Channel,
    Metrics,
    SocketChannel,
    Transcript,
    TranscriptEntry,
    TransportError,
    metrics_snapshot,
)

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1

Mode = Literal["secure", "naive", "phase1"]


class PipelineError(Exception):
    """Exception raised when a pipeline stage fails."""

    def __init__(self, stage: str, message: str) -> None:
        self.stage = stage
        self.message = message
        super().__init__(f"[{stage}] {message}")

    def __reduce__(self):
        return type(self), (self.stage, self.message)


def strip_fasta(data: bytes) -> bytes:
    """Drop '>' and ';' header lines and all whitespace."""
    lines = [
        line for line in data.splitlines() if not line.lstrip().startswith((b">", b";"))
    ]
    return b"".join(b"".join(line.split()) for line in lines)


def load_text(path: Path | str, fasta: bool = False) -> Text:
    """Read a party's input as raw bytes.

    Raises:
        PipelineError: If the file cannot be read or the text is empty.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise PipelineError("load", f"cannot read {path}: {e.strerror}") from e
    if fasta:
        data = strip_fasta(data)
    if not data:
        raise PipelineError("load", f"{path} holds no symbols")
    return data


def estimate_labels(text_a: Text, text_b: Text) -> int:
    """|T_A| + |T_B| counted on conflict-free labels; bounds the union size."""
    cfg = HashConfig(m=ORACLE_MODULUS)
    return sum(
        len(tentative_label_set(build_esp_tree(text, cfg))) for text in (text_a, text_b)
    )


def resolve_params(config: RunConfig, text_a: Text, text_b: Text) -> ProtocolParams:
    """Validate stage: pick the modulus and check the decryption invariant."""
    try:
        n_estimate = estimate_labels(text_a, text_b)
    except (EspError, HashConfigError) as e:
        raise PipelineError("validate", str(e)) from e
    params = config.protocol_params(n_estimate)
    logger.info(
        "params_resolved",
        extra={
            "m": params.modulus,
            "n_estimate": n_estimate,
            "n_cap": params.n_cap,
            "message_bound": params.message_bound,
        },
    )
    return params


@dataclass(frozen=True)
class PartyOutcome:
    """What one party returns from a run.

    Attributes:
        party: "A" or "B".
        labels: Number of distinct tentative labels of the party.
        phase1: Final labels, absent in naive mode.
        n: Size of the label space the L1 phase ran over.
        l1: The distance; only the key owner A learns it.
        sent: Transcript records of the frames the party sent.
        wall_time: Seconds per phase.
    """

    party: str
    labels: int
    phase1: Phase1Result | None
    n: int
    l1: int | None
    sent: tuple[TranscriptEntry, ...]
    wall_time: dict[str, float] = field(default_factory=dict)


def party_main(
    party: str, channel: Channel, text: Text, params: ProtocolParams, seed: int | None, mode: Mode
) -> PartyOutcome:
    """Everything one party does in a run, from parsing to the L1 phase."""
    try:
        tree = build_esp_tree(text, params.hash_config)
    except (EspError, HashConfigError) as e:
        raise PipelineError("parse", f"party {party}: {e}") from e
    labels = tentative_label_set(tree, party)
    vector = characteristic_vector(tree)
    session = PartySession.create(party, channel, params, seed)

    phase1: Phase1Result | None = None
    if mode == "naive":
        # tentative labels shifted onto {1..m}
        n = params.modulus
        dense = vector.relabel({label: label + 1 for label in vector.counts}).dense(n)
    else:
        phase1 = phase1_party(session, labels)
        n = phase1.n
        dense = vector.relabel(phase1.final_labels).dense(n)

    l1 = None
    if mode != "phase1":
        cfg = Phase2Config(n=n)
        if party == PARTIES[0]:
            l1 = phase2_owner(session, dense, cfg)
        else:
            phase2_helper(session, dense, cfg)
    return PartyOutcome(
        party=party,
        labels=len(labels),
        phase1=phase1,
        n=n,
        l1=l1,
        sent=tuple(channel.sent),
        wall_time=dict(session.wall_time),
    )


def _run_inproc(
    texts: tuple[Text, Text], params: ProtocolParams, seed: int | None, mode: Mode
) -> tuple[PartyOutcome, PartyOutcome]:
    side_a, side_b = (
        partial(party_main, party, text=text, params=params, seed=seed, mode=mode)
        for party, text in zip(PARTIES, texts)
    )
    return run_parties(side_a, side_b, timeout=params.timeout)


def _socket_party(
    party: str,
    host: str,
    port: int,
    text: Text,
    params: ProtocolParams,
    seed: int | None,
    mode: Mode,
) -> PartyOutcome:
    """Process entry point: B listens, A connects."""
    if party == PARTIES[1]:
        channel = SocketChannel.listen(party, host, port, params.timeout)
    else:
        channel = SocketChannel.connect(party, host, port, params.timeout)
    with channel:
        return party_main(party, channel, text, params, seed, mode)


def free_port(host: str) -> int:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.bind((host, 0))
        return sock.getsockname()[1]


def _run_socket(
    texts: tuple[Text, Text],
    params: ProtocolParams,
    seed: int | None,
    mode: Mode,
    host: str,
    port: int,
) -> tuple[PartyOutcome, PartyOutcome]:
    port = port or free_port(host)
    with ProcessPoolExecutor(max_workers=2) as pool:
        futures = [
            pool.submit(_socket_party, party, host, port, text, params, seed, mode)
            for party, text in zip(reversed(PARTIES), reversed(texts))
        ]
        outcome_b, outcome_a = (f.result() for f in futures)
    return outcome_a, outcome_b


@dataclass(frozen=True)
class RunReport:
    """Structured result of one run, rendered as `key=value` lines."""

    command: str
    mode: Mode
    params: ProtocolParams
    labels_a: int
    labels_b: int
    n: int
    l1: int | None
    metrics: Metrics

    def lines(self, include_timings: bool = False) -> list[str]:
        items: list[tuple[str, object]] = [
            ("schema", REPORT_SCHEMA),
            ("command", self.command),
            ("mode", self.mode),
            ("backend", self.params.backend),
            ("security_bits", self.params.security_bits),
            ("m", self.params.modulus),
            ("base", self.params.hash_config.b),
            ("sigma", self.params.sigma),
            ("n_cap", self.params.n_cap),
            ("message_bound", self.params.message_bound),
            ("labels_a", self.labels_a),
            ("labels_b", self.labels_b),
            ("n", self.n),
        ]
        if self.l1 is not None:
            items.append(("l1", self.l1))
        items.extend(self.metrics.report_items(include_timings))
        return [f"{key}={value}" for key, value in items]


def run_edm(
    text_a: Text,
    text_b: Text,
    config: RunConfig,
    mode: Mode = "secure",
    command: str = "edm",
) -> RunReport:
    """Run the pipeline on two texts.

    Raises:
        PipelineError: Input or parsing failure.
        ConfigError: Parameters violate the decryption invariant.
        ProtocolError: A protocol step failed on either side.
    """
    params = resolve_params(config, text_a, text_b)
    texts = (text_a, text_b)
    logger.info(
        "run_started",
        extra={"mode": mode, "transport": config.transport, "backend": params.backend},
    )
    try:
        if config.transport == "socket":
            outcome_a, outcome_b = _run_socket(
                texts, params, config.seed, mode, config.host, config.port
            )
        else:
            outcome_a, outcome_b = _run_inproc(texts, params, config.seed, mode)
    except TransportError as e:
        raise ProtocolError("-", e.stage, e.message) from e

    if mode != "naive" and outcome_a.n != outcome_b.n:
        raise ProtocolError("-", "phase1", f"parties disagree on n: {outcome_a.n} != {outcome_b.n}")
    transcript = Transcript.merge(outcome_a.sent, outcome_b.sent)
    wall = {
        phase: max(outcome_a.wall_time.get(phase, 0.0), outcome_b.wall_time.get(phase, 0.0))
        for phase in transcript.phases
    }
    metrics = metrics_snapshot(transcript, wall)
    logger.info("run_complete", extra={"rounds": metrics.rounds, "l1": outcome_a.l1})
    return RunReport(
        command=command,
        mode=mode,
        params=params,
        labels_a=outcome_a.labels,
        labels_b=outcome_b.labels,
        n=outcome_a.n,
        l1=outcome_a.l1,
        metrics=metrics,
    )

