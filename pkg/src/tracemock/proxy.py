"""Recording proxy: capture request/response exchanges on the wire.

Sits between a client and the real service, forwards framed messages both
ways, and appends one transaction per request/response pair.  Pairing is
strictly sequential per connection (the wire gives no other signal for an
unknown protocol).  Requests whose response never arrives are dropped and
logged, not recorded.  Indices are assigned sequentially from 0 in pairing
order across all connections.
"""

import logging
import socket
import threading
import time

from .errors import FramingTimeoutError, TargetUnreachableError
from .framing import FramingConfig, MessageStream
from .trace import Transaction, TransactionLibrary, save_library

logger = logging.getLogger(__name__)

DEFAULT_RESPONSE_TIMEOUT_MS = 5000


class RecordingProxy:
    """Threaded TCP proxy that records framed exchanges.

    Appends to the in-memory library under a lock, so indices stay unique
    and ordering is the pairing order even with concurrent clients.
    """

    def __init__(self, listen: tuple[str, int], target: tuple[str, int],
                 framing: FramingConfig = FramingConfig(),
                 response_timeout_ms: int = DEFAULT_RESPONSE_TIMEOUT_MS):
        self.target = target
        self.framing = framing
        self.response_timeout_ms = response_timeout_ms
        self._listen = listen
        self._transactions: list[Transaction] = []
        self._lock = threading.Lock()
        self._sock: socket.socket | None = None
        self._threads: list[threading.Thread] = []
        self._stopping = threading.Event()

    @property
    def address(self) -> tuple[str, int]:
        if self._sock is None:
            raise RuntimeError("proxy not started")
        return self._sock.getsockname()[:2]

    @property
    def library(self) -> TransactionLibrary:
        with self._lock:
            return TransactionLibrary(tuple(self._transactions))

    def start(self) -> tuple[str, int]:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind(self._listen)
        sock.listen(64)
        self._sock = sock
        acceptor = threading.Thread(target=self._accept_loop, daemon=True,
                                    name="proxy-accept")
        acceptor.start()
        self._threads.append(acceptor)
        logger.info("recording %s:%d -> %s:%d", *self.address, *self.target)
        return self.address

    def _accept_loop(self):
        while not self._stopping.is_set():
            try:
                conn, peer = self._sock.accept()
            except OSError:
                return
            worker = threading.Thread(target=self._handle, args=(conn, peer),
                                      daemon=True)
            worker.start()
            self._threads.append(worker)

    def _connect_target(self) -> socket.socket:
        try:
            return socket.create_connection(self.target, timeout=5.0)
        except OSError as exc:
            raise TargetUnreachableError(
                f"cannot connect to {self.target[0]}:{self.target[1]}: {exc}")

    def _handle(self, conn: socket.socket, peer):
        client = MessageStream(conn, self.framing)
        try:
            upstream = self._connect_target()
        except TargetUnreachableError as exc:
            logger.error("peer=%s %s", peer, exc)
            client.close()
            return
        target = MessageStream(upstream, self.framing)
        try:
            while not self._stopping.is_set():
                request = client.read()
                if request is None:
                    return
                target.write(request)
                try:
                    response = target.read(
                        initial_timeout_ms=self.response_timeout_ms)
                except FramingTimeoutError:
                    logger.warning("peer=%s dropped request (%d bytes): no "
                                   "response within %d ms", peer, len(request),
                                   self.response_timeout_ms)
                    return
                if response is None:
                    logger.error("peer=%s target closed before replying", peer)
                    return
                client.write(response)
                with self._lock:
                    index = len(self._transactions)
                    self._transactions.append(Transaction(index, request, response))
        except (ConnectionError, OSError) as exc:
            logger.warning("peer=%s connection error: %s", peer, exc)
        finally:
            client.close()
            target.close()

    def stop(self) -> TransactionLibrary:
        self._stopping.set()
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        for t in self._threads:
            t.join(timeout=2.0)
        return self.library


def record_proxy(listen: tuple[str, int], target: tuple[str, int],
                 framing: FramingConfig, out) -> TransactionLibrary:
    """Record until interrupted, then persist the library to ``out``."""
    proxy = RecordingProxy(listen, target, framing)
    proxy.start()
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        library = proxy.stop()
        save_library(library, out)
        logger.info("saved %d transactions to %s", len(library), out)
    return library
