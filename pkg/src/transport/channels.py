"""Bidirectional frame channels between the two parties.

Every endpoint keeps the record of what it sent (see `TranscriptEntry`), so
the transcript is identical whichever channel implementation carried the
frames.
"""

import logging
import queue
import socket
import threading
import time
from abc import ABC, abstractmethod

from src.transport.framing import (
    FRAME_HEADER,
    ChannelClosedError,
    Frame,
    MalformedFrameError,
    TransportError,
    decode_frame,
    encode_frame,
)
from src.transport.metrics import TranscriptEntry

logger = logging.getLogger(__name__)

_CLOSED = None


class Channel(ABC):
    """One endpoint of an ordered, reliable, two-way frame channel."""

    def __init__(self, party: str, timeout: float | None = 60.0) -> None:
        self.party = party
        self.timeout = timeout
        self.phase = "setup"
        self.sent: list[TranscriptEntry] = []
        self._received = 0
        self._closed = False
        self._lock = threading.Lock()

    def set_phase(self, phase: str) -> None:
        self.phase = phase

    def send(self, frame: Frame) -> None:
        if self._closed:
            raise ChannelClosedError("send", f"channel of party {self.party} is closed")
        data = encode_frame(frame)
        with self._lock:
            self.sent.append(
                TranscriptEntry(
                    party=self.party,
                    seq=len(self.sent),
                    tag=frame.tag,
                    nbytes=len(data),
                    phase=self.phase,
                    received_before=self._received,
                )
            )
            self._write(data)
        logger.debug(
            "frame_sent", extra={"party": self.party, "tag": frame.tag, "bytes": len(data)}
        )

    def recv(self) -> Frame:
        """Next frame from the peer; blocks until one arrives."""
        frame = self._read()
        self._received += 1
        return frame

    def recv_expect(self, tag: int) -> Frame:
        frame = self.recv()
        if frame.tag != tag:
            raise TransportError(
                "recv", f"party {self.party} expected tag 0x{tag:02x}, got 0x{frame.tag:02x}"
            )
        return frame

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            self._shutdown()

    def __enter__(self) -> "Channel":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    @abstractmethod
    def _write(self, data: bytes) -> None: ...

    @abstractmethod
    def _read(self) -> Frame: ...

    @abstractmethod
    def _shutdown(self) -> None: ...


class InProcChannel(Channel):
    """Endpoint backed by a pair of thread-safe queues."""

    def __init__(
        self,
        party: str,
        outbox: "queue.Queue[bytes | None]",
        inbox: "queue.Queue[bytes | None]",
        timeout: float | None = 60.0,
    ) -> None:
        super().__init__(party, timeout)
        self._outbox = outbox
        self._inbox = inbox

    @classmethod
    def pair(
        cls, parties: tuple[str, str] = ("A", "B"), timeout: float | None = 60.0
    ) -> tuple["InProcChannel", "InProcChannel"]:
        a_to_b: queue.Queue[bytes | None] = queue.Queue()
        b_to_a: queue.Queue[bytes | None] = queue.Queue()
        return (
            cls(parties[0], a_to_b, b_to_a, timeout),
            cls(parties[1], b_to_a, a_to_b, timeout),
        )

    def _write(self, data: bytes) -> None:
        self._outbox.put(data)

    def _read(self) -> Frame:
        try:
            data = self._inbox.get(timeout=self.timeout)
        except queue.Empty:
            raise TransportError(
                "recv", f"party {self.party} timed out after {self.timeout}s"
            ) from None
        if data is _CLOSED:
            # keep the marker for later readers
            self._inbox.put(_CLOSED)
            raise ChannelClosedError("recv", f"peer of party {self.party} closed the channel")
        frame, end = decode_frame(data)
        if end != len(data):
            raise MalformedFrameError("trailing bytes after frame", end, 0)
        return frame

    def _shutdown(self) -> None:
        self._outbox.put(_CLOSED)


def recv_exact(sock: socket.socket, length: int) -> bytes | None:
    """Read exactly `length` bytes; None if the stream ends first."""
    chunks = []
    got = 0
    while got < length:
        chunk = sock.recv(length - got)
        if not chunk:
            return None
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


class SocketChannel(Channel):
    """Endpoint over a connected stream socket.

    A reader thread drains the socket into a queue, so both parties may
    send a whole batch before reading without filling the socket buffers.
    """

    def __init__(self, party: str, sock: socket.socket, timeout: float | None = 60.0) -> None:
        super().__init__(party, timeout)
        self._sock = sock
        self._frames: queue.Queue[Frame | BaseException | None] = queue.Queue()
        self._reader = threading.Thread(
            target=self._read_loop, name=f"socket-reader-{party}", daemon=True
        )
        self._reader.start()

    @classmethod
    def listen(
        cls, party: str, host: str, port: int, timeout: float | None = 60.0
    ) -> "SocketChannel":
        """Accept exactly one peer connection on host:port."""
        with socket.create_server((host, port)) as server:
            server.settimeout(timeout)
            try:
                conn, addr = server.accept()
            except TimeoutError:
                raise TransportError("accept", f"no peer connected to {host}:{port}") from None
        conn.settimeout(None)
        logger.info("peer_connected", extra={"party": party, "peer": str(addr)})
        return cls(party, conn, timeout)

    @classmethod
    def connect(
        cls,
        party: str,
        host: str,
        port: int,
        timeout: float | None = 60.0,
        retry_interval: float = 0.05,
    ) -> "SocketChannel":
        """Connect to a listening peer, retrying until `timeout` elapses."""
        deadline = time.monotonic() + (timeout if timeout is not None else 60.0)
        while True:
            try:
                sock = socket.create_connection((host, port), timeout=timeout)
                break
            except (ConnectionRefusedError, TimeoutError) as e:
                if time.monotonic() >= deadline:
                    raise TransportError("connect", f"cannot reach {host}:{port}: {e}") from e
                time.sleep(retry_interval)
        sock.settimeout(None)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        return cls(party, sock, timeout)

    def _read_loop(self) -> None:
        try:
            while True:
                header = recv_exact(self._sock, FRAME_HEADER.size)
                if header is None:
                    self._frames.put(_CLOSED)
                    return
                tag, length = FRAME_HEADER.unpack(header)
                body = recv_exact(self._sock, length)
                if body is None:
                    self._frames.put(
                        MalformedFrameError("stream ended inside frame body", FRAME_HEADER.size, length)
                    )
                    return
                self._frames.put(Frame(tag, body))
        except OSError as e:
            if not self._closed:
                self._frames.put(e)
            else:
                self._frames.put(_CLOSED)

    def _write(self, data: bytes) -> None:
        try:
            self._sock.sendall(data)
        except OSError as e:
            raise ChannelClosedError("send", f"party {self.party}: {e}") from e

    def _read(self) -> Frame:
        try:
            item = self._frames.get(timeout=self.timeout)
        except queue.Empty:
            raise TransportError(
                "recv", f"party {self.party} timed out after {self.timeout}s"
            ) from None
        if item is _CLOSED:
            self._frames.put(_CLOSED)
            raise ChannelClosedError("recv", f"peer of party {self.party} closed the channel")
        if isinstance(item, TransportError):
            raise item
        if isinstance(item, BaseException):
            raise ChannelClosedError("recv", f"party {self.party}: {item}") from item
        return item

    def _shutdown(self) -> None:
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()
