"""Length-prefixed binary frames: tag byte, u32 body length, body."""

import struct
from dataclasses import dataclass

# tag (1 byte), body length (4 bytes, little-endian)
FRAME_HEADER = struct.Struct("<BI")


class TransportError(Exception):
    """Base error of the transport layer.

    Attributes:
        stage: The transport operation that failed.
        message: The error message.
    """

    def __init__(self, stage: str, message: str) -> None:
        self.stage = stage
        self.message = message
        super().__init__(f"[{stage}] {message}")

    def __reduce__(self):
        return type(self), (self.stage, self.message)


class ChannelClosedError(TransportError):
    """The peer closed the channel, or it was closed locally."""


class MalformedFrameError(TransportError):
    """Bytes that do not form a complete frame.

    Attributes:
        offset: Position in the input where decoding failed.
        expected: Number of bytes that were needed from that position.
    """

    def __init__(self, message: str, offset: int, expected: int) -> None:
        self.offset = offset
        self.expected = expected
        self.reason = message
        super().__init__("decode_frame", f"{message} (offset={offset}, expected={expected})")

    def __reduce__(self):
        return type(self), (self.reason, self.offset, self.expected)


@dataclass(frozen=True, slots=True)
class Frame:
    tag: int
    body: bytes = b""

    def __post_init__(self) -> None:
        if not 0 <= self.tag <= 0xFF:
            raise TransportError("frame", f"tag must fit one byte, got {self.tag}")

    @property
    def size(self) -> int:
        """Bytes on the wire, header included."""
        return FRAME_HEADER.size + len(self.body)


def encode_frame(frame: Frame) -> bytes:
    return FRAME_HEADER.pack(frame.tag, len(frame.body)) + frame.body


def decode_frame(data: bytes, offset: int = 0) -> tuple[Frame, int]:
    """Decode the frame starting at `offset`.

    Returns:
        The frame and the offset just past it.

    Raises:
        MalformedFrameError: If the header or the body is truncated.
    """
    if offset + FRAME_HEADER.size > len(data):
        raise MalformedFrameError("truncated frame header", offset, FRAME_HEADER.size)
    tag, length = FRAME_HEADER.unpack_from(data, offset)
    start = offset + FRAME_HEADER.size
    if start + length > len(data):
        raise MalformedFrameError(
            f"truncated frame body, {len(data) - start} bytes available", start, length
        )
    return Frame(tag, bytes(data[start : start + length])), start + length


def decode_frames(data: bytes) -> list[Frame]:
    """Split a byte stream holding whole frames."""
    frames = []
    offset = 0
    while offset < len(data):
        frame, offset = decode_frame(data, offset)
        frames.append(frame)
    return frames
