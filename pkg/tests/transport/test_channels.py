"""Tests for in-process and socket channels."""

import socket
import threading

import pytest

from src.transport import (
    ChannelClosedError,
    Frame,
    InProcChannel,
    SocketChannel,
    TransportError,
)


def _exchange(left, right):
    """Both ends send first, then read: a batch must not deadlock."""
    left.set_phase("phase1")
    right.set_phase("phase1")
    for i in range(3):
        left.send(Frame(1, bytes([i]) * 1000))
    right.send(Frame(2, b"pong"))
    got = [right.recv() for _ in range(3)]
    assert [f.body[:1] for f in got] == [b"\x00", b"\x01", b"\x02"]
    assert left.recv_expect(2).body == b"pong"
    left.send(Frame(3, b"done"))
    assert right.recv().tag == 3


@pytest.fixture
def inproc():
    a, b = InProcChannel.pair(timeout=5)
    yield a, b
    a.close()
    b.close()


@pytest.fixture
def sockets():
    left, right = socket.socketpair()
    a, b = SocketChannel("A", left, timeout=5), SocketChannel("B", right, timeout=5)
    yield a, b
    a.close()
    b.close()


class TestInProcChannel:
    """Tests for InProcChannel."""

    def test_exchange(self, inproc):
        """Frames arrive in order."""
        _exchange(*inproc)

    def test_transcript_records(self, inproc):
        """Each send records its size, phase and what had been received."""
        a, b = inproc
        _exchange(a, b)
        assert [e.seq for e in a.sent] == [0, 1, 2, 3]
        assert [e.received_before for e in a.sent] == [0, 0, 0, 1]
        assert a.sent[0].nbytes == 1005
        assert {e.phase for e in a.sent + b.sent} == {"phase1"}
        assert b.sent[0].party == "B"

    def test_unexpected_tag(self, inproc):
        """recv_expect rejects other tags."""
        a, b = inproc
        a.send(Frame(4))
        with pytest.raises(TransportError) as exc:
            b.recv_expect(5)
        assert "0x05" in exc.value.message

    def test_peer_close(self, inproc):
        """Reading from a closed peer fails, and keeps failing."""
        a, b = inproc
        a.close()
        for _ in range(2):
            with pytest.raises(ChannelClosedError):
                b.recv()

    def test_send_after_close(self, inproc):
        """A closed endpoint cannot send."""
        a, _ = inproc
        a.close()
        with pytest.raises(ChannelClosedError):
            a.send(Frame(1))

    def test_timeout(self):
        """A silent peer times out."""
        a, _ = InProcChannel.pair(timeout=0.05)
        with pytest.raises(TransportError) as exc:
            a.recv()
        assert "timed out" in exc.value.message


class TestSocketChannel:
    """Tests for SocketChannel."""

    def test_exchange(self, sockets):
        """Frames arrive in order over a stream socket."""
        _exchange(*sockets)

    def test_same_transcript_as_inproc(self, sockets, inproc):
        """The recorded transcript does not depend on the channel."""
        _exchange(*sockets)
        _exchange(*inproc)
        assert sockets[0].sent == inproc[0].sent
        assert sockets[1].sent == inproc[1].sent

    def test_peer_close(self, sockets):
        """The reader reports the end of the stream."""
        a, b = sockets
        a.close()
        with pytest.raises(ChannelClosedError):
            b.recv()

    def test_listen_and_connect(self):
        """listen accepts the peer that connect reaches."""
        with socket.socket() as sock:
            sock.bind(("127.0.0.1", 0))
            port = sock.getsockname()[1]
        accepted = {}

        def serve():
            accepted["B"] = SocketChannel.listen("B", "127.0.0.1", port, timeout=5)

        server = threading.Thread(target=serve)
        server.start()
        with SocketChannel.connect("A", "127.0.0.1", port, timeout=5) as a:
            server.join(5)
            with accepted["B"] as b:
                a.send(Frame(1, b"hi"))
                assert b.recv() == Frame(1, b"hi")

    def test_connect_gives_up(self):
        """Connecting to a closed port fails after the timeout."""
        with socket.socket() as sock:
            sock.bind(("127.0.0.1", 0))
            port = sock.getsockname()[1]
        with pytest.raises(TransportError) as exc:
            SocketChannel.connect("A", "127.0.0.1", port, timeout=0.2)
        assert exc.value.stage == "connect"
