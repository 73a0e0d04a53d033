"""Frame transport between the two parties and run metrics."""

from src.transport.channels import Channel, InProcChannel, SocketChannel, recv_exact
from src.transport.framing import (
    FRAME_HEADER,
    ChannelClosedError,
    Frame,
    MalformedFrameError,
    TransportError,
    decode_frame,
    decode_frames,
    encode_frame,
)
from src.transport.metrics import (
    SETUP_TAG,
    MessageBytes,
    Metrics,
    Transcript,
    TranscriptEntry,
    metrics_snapshot,
    round_accounting,
)

__all__ = [
    "FRAME_HEADER",
    "SETUP_TAG",
    "Channel",
    "ChannelClosedError",
    "Frame",
    "InProcChannel",
    "MalformedFrameError",
    "MessageBytes",
    "Metrics",
    "SocketChannel",
    "Transcript",
    "TranscriptEntry",
    "TransportError",
    "decode_frame",
    "decode_frames",
    "encode_frame",
    "metrics_snapshot",
    "recv_exact",
    "round_accounting",
]
