"""Message framing over TCP byte streams.

Raw traces carry message payloads only; framing decides where one message
ends on the wire.  Four modes:

* ``connection`` -- one message per connection; read until EOF.
* ``idle`` -- a message is a burst of bytes followed by ``idle_timeout_ms``
  of silence (the default mode; robust when nothing is known about the
  protocol).
* ``length`` -- big-endian length prefix of ``length_prefix_bytes``; the
  prefix is an envelope, stripped on read and re-added on write.
* ``delimiter`` -- read up to and including a delimiter byte sequence,
  which stays part of the message; writes add nothing.

Bind/connect failures surface as the stdlib OSError hierarchy.
"""

import socket
from dataclasses import dataclass

from .errors import FramingProtocolError, FramingTimeoutError

MODE_CONNECTION = "connection"
MODE_IDLE = "idle"
MODE_LENGTH = "length"
MODE_DELIMITER = "delimiter"

_MODES = (MODE_CONNECTION, MODE_IDLE, MODE_LENGTH, MODE_DELIMITER)
_CHUNK = 65536


@dataclass(frozen=True)
class FramingConfig:
    mode: str = MODE_IDLE
    idle_timeout_ms: int = 200
    length_prefix_bytes: int = 4
    delimiter: bytes = b"}"

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"unknown framing mode {self.mode!r}")
        if self.mode == MODE_IDLE and self.idle_timeout_ms <= 0:
            raise ValueError("idle_timeout_ms must be positive")
        if self.mode == MODE_LENGTH and self.length_prefix_bytes not in (1, 2, 4, 8):
            raise ValueError("length_prefix_bytes must be 1, 2, 4 or 8")
        if self.mode == MODE_DELIMITER and not self.delimiter:
            raise ValueError("delimiter must be non-empty")

    @classmethod
    def parse(cls, text: str) -> "FramingConfig":
        """Parse CLI syntax: ``idle[:ms]``, ``length[:bytes]``,
        ``delimiter[:hex]``, ``connection``."""
        mode, _, arg = text.partition(":")
        if mode == MODE_IDLE:
            return cls(MODE_IDLE, idle_timeout_ms=int(arg) if arg else 200)
        if mode == MODE_LENGTH:
            return cls(MODE_LENGTH, length_prefix_bytes=int(arg) if arg else 4)
        if mode == MODE_DELIMITER:
            delim = bytes.fromhex(arg) if arg else b"}"
            return cls(MODE_DELIMITER, delimiter=delim)
        if mode == MODE_CONNECTION:
            return cls(MODE_CONNECTION)
        raise ValueError(f"unknown framing mode {mode!r}")


class MessageStream:
    """Framed reader/writer bound to one connected socket."""

    def __init__(self, sock: socket.socket, framing: FramingConfig):
        self.sock = sock
        self.framing = framing
        self._buffer = bytearray()
        self._eof = False
        try:
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        except OSError:
            pass

    # -- receiving ---------------------------------------------------------

    def _recv(self, timeout_s: float | None) -> bytes:
        self.sock.settimeout(timeout_s)
        return self.sock.recv(_CHUNK)

    def _fill(self, timeout_ms: int | None) -> bool:
        """Pull one chunk into the buffer. False on EOF, raises on timeout."""
        if self._eof:
            return False
        try:
            chunk = self._recv(timeout_ms / 1000.0 if timeout_ms else None)
        except socket.timeout:
            raise FramingTimeoutError(
                f"no data within {timeout_ms} ms")
        if not chunk:
            self._eof = True
            return False
        self._buffer.extend(chunk)
        return True

    def read(self, initial_timeout_ms: int | None = None) -> bytes | None:
        """Read one framed message.

        Returns None on a clean end-of-stream before any message byte.
        Raises FramingTimeoutError when ``initial_timeout_ms`` expires with
        no data, or when a message stays incomplete past the idle window.
        """
        mode = self.framing.mode
        if mode == MODE_CONNECTION:
            return self._read_connection(initial_timeout_ms)
        if mode == MODE_IDLE:
            return self._read_idle(initial_timeout_ms)
        if mode == MODE_LENGTH:
            return self._read_length(initial_timeout_ms)
        return self._read_delimiter(initial_timeout_ms)

    def _read_connection(self, initial_timeout_ms):
        first = True
        while self._fill(initial_timeout_ms if first else None):
            first = False
        if not self._buffer:
            return None
        out = bytes(self._buffer)
        self._buffer.clear()
        return out

    def _read_idle(self, initial_timeout_ms):
        if not self._buffer:
            if not self._fill(initial_timeout_ms):
                return None
        while True:
            try:
                if not self._fill(self.framing.idle_timeout_ms):
                    break  # EOF flushes the message
            except FramingTimeoutError:
                break  # silence ends the message
        out = bytes(self._buffer)
        self._buffer.clear()
        return out or None

    def _read_exact(self, count: int, initial_timeout_ms, consumed: bool) -> bytes | None:
        while len(self._buffer) < count:
            timeout = initial_timeout_ms if (not consumed and not self._buffer) else None
            if not self._fill(timeout):
                if not self._buffer and not consumed:
                    return None
                raise FramingProtocolError("stream ended inside a framed message")
        out = bytes(self._buffer[:count])
        del self._buffer[:count]
        return out

    def _read_length(self, initial_timeout_ms):
        width = self.framing.length_prefix_bytes
        prefix = self._read_exact(width, initial_timeout_ms, consumed=False)
        if prefix is None:
            return None
        length = int.from_bytes(prefix, "big")
        if length == 0:
            raise FramingProtocolError("zero-length framed message")
        return self._read_exact(length, None, consumed=True)

    def _read_delimiter(self, initial_timeout_ms):
        delim = self.framing.delimiter
        first = not self._buffer
        while True:
            cut = self._buffer.find(delim)
            if cut != -1:
                end = cut + len(delim)
                out = bytes(self._buffer[:end])
                del self._buffer[:end]
                return out
            if not self._fill(initial_timeout_ms if first else None):
                if self._buffer:
                    raise FramingProtocolError("stream ended inside a framed message")
                return None
            first = False

    # -- sending -----------------------------------------------------------

    def write(self, payload: bytes) -> None:
        if self.framing.mode == MODE_LENGTH:
            width = self.framing.length_prefix_bytes
            if len(payload) >= 1 << (8 * width):
                raise FramingProtocolError("payload too large for length prefix")
            self.sock.sendall(len(payload).to_bytes(width, "big") + payload)
        else:
            self.sock.sendall(payload)

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass
