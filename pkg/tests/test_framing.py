import socket
import threading

import pytest

from tracemock.errors import FramingProtocolError, FramingTimeoutError
from tracemock.framing import FramingConfig, MessageStream


def stream_pair(cfg):
    a, b = socket.socketpair()
    return MessageStream(a, cfg), MessageStream(b, cfg)


class TestFramingConfig:
    def test_parse_forms(self):
        assert FramingConfig.parse("idle").idle_timeout_ms == 200
        assert FramingConfig.parse("idle:50").idle_timeout_ms == 50
        assert FramingConfig.parse("length:2").length_prefix_bytes == 2
        assert FramingConfig.parse("delimiter:7d").delimiter == b"}"
        assert FramingConfig.parse("connection").mode == "connection"

    @pytest.mark.parametrize("text", ["bogus", "length:3", "idle:0"])
    def test_parse_rejects_invalid(self, text):
        with pytest.raises(ValueError):
            FramingConfig.parse(text)


class TestLengthPrefix:
    def test_round_trip_multiple_messages(self):
        left, right = stream_pair(FramingConfig("length", length_prefix_bytes=4))
        try:
            for payload in (b"one", b"two" * 100, bytes(range(256))):
                left.write(payload)
            for payload in (b"one", b"two" * 100, bytes(range(256))):
                assert right.read() == payload
        finally:
            left.close()
            right.close()

    def test_eof_returns_none(self):
        left, right = stream_pair(FramingConfig("length"))
        left.close()
        assert right.read() is None
        right.close()

    def test_truncated_frame_raises(self):
        left, right = stream_pair(FramingConfig("length", length_prefix_bytes=4))
        left.sock.sendall((10).to_bytes(4, "big") + b"abc")
        left.close()
        with pytest.raises(FramingProtocolError):
            right.read()
        right.close()


class TestDelimiter:
    def test_message_includes_delimiter(self):
        cfg = FramingConfig("delimiter", delimiter=b"}")
        left, right = stream_pair(cfg)
        try:
            left.write(b"{a:1}{b:2}")
            assert right.read() == b"{a:1}"
            assert right.read() == b"{b:2}"
        finally:
            left.close()
            right.close()

    def test_multi_byte_delimiter(self):
        cfg = FramingConfig("delimiter", delimiter=b"\r\n")
        left, right = stream_pair(cfg)
        try:
            left.write(b"hello\r\nworld\r\n")
            assert right.read() == b"hello\r\n"
            assert right.read() == b"world\r\n"
        finally:
            left.close()
            right.close()

    def test_eof_inside_message_raises(self):
        cfg = FramingConfig("delimiter", delimiter=b"}")
        left, right = stream_pair(cfg)
        left.sock.sendall(b"{unterminated")
        left.close()
        with pytest.raises(FramingProtocolError):
            right.read()
        right.close()


class TestIdle:
    def test_burst_flushes_after_silence(self):
        cfg = FramingConfig("idle", idle_timeout_ms=80)
        left, right = stream_pair(cfg)
        try:
            left.sock.sendall(b"burst-of-bytes")
            assert right.read() == b"burst-of-bytes"
        finally:
            left.close()
            right.close()

    def test_eof_flushes_partial(self):
        cfg = FramingConfig("idle", idle_timeout_ms=5000)
        left, right = stream_pair(cfg)
        left.sock.sendall(b"tail")
        left.close()
        assert right.read() == b"tail"
        right.close()

    def test_initial_timeout_raises(self):
        cfg = FramingConfig("idle", idle_timeout_ms=50)
        left, right = stream_pair(cfg)
        try:
            with pytest.raises(FramingTimeoutError):
                right.read(initial_timeout_ms=60)
        finally:
            left.close()
            right.close()


class TestConnection:
    def test_whole_stream_is_one_message(self):
        cfg = FramingConfig("connection")
        left, right = stream_pair(cfg)

        def sender():
            left.sock.sendall(b"part1")
            left.sock.sendall(b"part2")
            left.close()

        t = threading.Thread(target=sender)
        t.start()
        assert right.read() == b"part1part2"
        assert right.read() is None
        t.join()
        right.close()
