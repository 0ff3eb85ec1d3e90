"""Playback runtime: match a live request, generate and serve the response.

Matching computes the relative distance of the request against every
node's prototype and picks the argmin (ties go to the lowest cluster id).
Generation aligns the live request with the chosen node's centroid request
and splices the symmetric-field projections into the centroid response.

The server listens on TCP, handles each connection on its own thread with
strict request/response alternation, and emits one structured log line per
exchange.  The model is immutable and shared read-only across handlers.
"""

import logging
import socket
import threading
import time
from dataclasses import dataclass

import numpy as np

from .alignment import DEFAULT_SCORING, PrototypeScorer, ScoringConfig
from .errors import EmptyInputError, FramingProtocolError, FramingTimeoutError
from .fields import (SymmetricField, find_symmetric_fields, project_field,
                     substitute_response)
from .framing import FramingConfig, MessageStream
from .model import MatchingNode, OpaqueServiceModel

__all__ = [
    "MatchOutcome", "SymmetricField", "FramingConfig", "RequestMatcher",
    "match_request", "find_symmetric_fields", "project_field",
    "generate_response", "EmulatorServer", "serve",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchOutcome:
    """Relative distance per node plus the chosen cluster id."""

    distances: tuple[tuple[int, float], ...]
    chosen: int


class RequestMatcher:
    """Reusable matcher holding the model's precomputed scoring arrays."""

    def __init__(self, model: OpaqueServiceModel):
        self.model = model
        self.nodes = sorted(model.nodes, key=lambda n: n.cluster_id)
        self._scorer = PrototypeScorer(
            [n.prototype.symbols for n in self.nodes],
            [n.weights for n in self.nodes],
            model.scoring)

    def match(self, request: bytes) -> MatchOutcome:
        if not request:
            raise EmptyInputError("cannot match an empty request")
        rel = self._scorer.relative_distances(request)
        chosen = self.nodes[int(np.argmin(rel))].cluster_id
        pairs = tuple((n.cluster_id, float(d)) for n, d in zip(self.nodes, rel))
        return MatchOutcome(pairs, chosen)

    def node_for(self, cluster_id: int) -> MatchingNode:
        for node in self.nodes:
            if node.cluster_id == cluster_id:
                return node
        raise KeyError(cluster_id)

    def respond(self, request: bytes) -> tuple[bytes, MatchOutcome]:
        outcome = self.match(request)
        node = self.node_for(outcome.chosen)
        return generate_response(node, request, self.model.scoring), outcome


def match_request(model: OpaqueServiceModel, request: bytes) -> MatchOutcome:
    """One-shot matching; build a RequestMatcher for hot loops."""
    return RequestMatcher(model).match(request)


def generate_response(node: MatchingNode, live_request: bytes,
                      cfg: ScoringConfig = DEFAULT_SCORING) -> bytes:
    """Centroid response with symmetric fields projected from the live request."""
    return substitute_response(live_request, node.centroid.request,
                               node.centroid.response, node.fields, cfg)


class EmulatorServer:
    """Threaded TCP server playing back an OpaqueServiceModel."""

    def __init__(self, model: OpaqueServiceModel,
                 listen: tuple[str, int] = ("127.0.0.1", 0),
                 framing: FramingConfig = FramingConfig()):
        self.model = model
        self.framing = framing
        self._matcher = RequestMatcher(model)
        self._listen = listen
        self._sock: socket.socket | None = None
        self._threads: list[threading.Thread] = []
        self._stopping = threading.Event()

    @property
    def address(self) -> tuple[str, int]:
        if self._sock is None:
            raise RuntimeError("server not started")
        return self._sock.getsockname()[:2]

    def start(self) -> tuple[str, int]:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind(self._listen)
        sock.listen(128)
        self._sock = sock
        acceptor = threading.Thread(target=self._accept_loop, daemon=True,
                                    name="emulator-accept")
        acceptor.start()
        self._threads.append(acceptor)
        logger.info("serving %d-node model on %s:%d",
                    len(self.model.nodes), *self.address)
        return self.address

    def _accept_loop(self):
        while not self._stopping.is_set():
            try:
                conn, peer = self._sock.accept()
            except OSError:
                return  # listener closed
            worker = threading.Thread(target=self._handle, args=(conn, peer),
                                      daemon=True)
            worker.start()
            self._threads.append(worker)

    def _handle(self, conn: socket.socket, peer):
        stream = MessageStream(conn, self.framing)
        try:
            while not self._stopping.is_set():
                try:
                    request = stream.read()
                except FramingTimeoutError:
                    logger.warning("peer=%s framing timeout, closing", peer)
                    return
                except FramingProtocolError as exc:
                    logger.warning("peer=%s framing error: %s", peer, exc)
                    return
                if request is None:
                    return
                started = time.perf_counter()
                response, outcome = self._matcher.respond(request)
                stream.write(response)
                elapsed_us = int((time.perf_counter() - started) * 1e6)
                logger.info(
                    "exchange peer=%s cluster=%d distance=%.4f latency_us=%d "
                    "request_bytes=%d response_bytes=%d",
                    peer, outcome.chosen,
                    dict(outcome.distances)[outcome.chosen],
                    elapsed_us, len(request), len(response))
        except (ConnectionError, OSError):
            return
        finally:
            stream.close()

    def stop(self):
        self._stopping.set()
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        for t in self._threads:
            t.join(timeout=2.0)

    def serve_forever(self):
        """Block until interrupted; used by the CLI."""
        if self._sock is None:
            self.start()
        try:
            while True:
                time.sleep(0.5)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()


def serve(model: OpaqueServiceModel, listen: tuple[str, int],
          framing: FramingConfig = FramingConfig()) -> None:
    """Serve the model until interrupted (blocking convenience wrapper)."""
    EmulatorServer(model, listen, framing).serve_forever()
