"""The three response strategies compared by the evaluation harness.

* hash lookup -- replay the recorded response of a byte-identical request,
  nothing on a miss;
* whole library -- nearest recorded request by alignment distance, its
  response transformed by symmetric-field substitution;
* prototype -- match against the per-operation consensus prototypes and
  transform the cluster centroid's response.
"""

import numpy as np

from ..alignment import (DEFAULT_SCORING, ScoringConfig, _batch_plain_scores,
                         _pad_sequences, as_symbols)
from ..emulator import RequestMatcher
from ..errors import EmptyLibraryError
from ..fields import (DEFAULT_MIN_FIELD_LENGTH, find_symmetric_fields,
                      substitute_response)
from ..model import OpaqueServiceModel
from ..trace import TransactionLibrary


class HashLookupResponder:
    """Exact-request replay; the no-knowledge record-and-replay baseline."""

    name = "hash"

    def __init__(self, library: TransactionLibrary):
        table: dict[bytes, bytes] = {}
        for tx in library:
            table.setdefault(tx.request, tx.response)  # first recording wins
        self._table = table

    def answer(self, request: bytes) -> bytes | None:
        return self._table.get(request)


class WholeLibraryResponder:
    """Nearest raw recorded request, transformed like playback."""

    name = "whole-library"

    def __init__(self, library: TransactionLibrary,
                 scoring: ScoringConfig = DEFAULT_SCORING,
                 min_field_length: int = DEFAULT_MIN_FIELD_LENGTH):
        if len(library) == 0:
            raise EmptyLibraryError("whole-library responder needs transactions")
        self.library = library
        self.scoring = scoring
        self.min_field_length = min_field_length
        self._arrays = [as_symbols(t.request) for t in library]
        self._padded, self._lengths = _pad_sequences(self._arrays)
        self._indices = np.array(library.indices)
        self._fields_cache: dict[int, tuple] = {}

    def _nearest_position(self, request: bytes) -> int:
        r = as_symbols(request)
        scores = _batch_plain_scores(r, self._padded, self._lengths, self.scoring)
        maxlen = np.maximum(len(r), self._lengths)
        dist = 1.0 - scores / (self.scoring.match_score * maxlen)
        np.clip(dist, 0.0, 1.0, out=dist)
        best = dist.min()
        tied = np.flatnonzero(dist == best)
        return int(tied[np.argmin(self._indices[tied])])  # lowest tx index

    def answer(self, request: bytes) -> bytes:
        pos = self._nearest_position(request)
        tx = self.library[pos]
        fields = self._fields_cache.get(pos)
        if fields is None:
            fields = find_symmetric_fields(tx.request, tx.response,
                                           self.min_field_length)
            self._fields_cache[pos] = fields
        return substitute_response(request, tx.request, tx.response, fields,
                                   self.scoring)


class PrototypeResponder:
    """Consensus-prototype matching plus centroid transformation."""

    name = "prototype"

    def __init__(self, model: OpaqueServiceModel):
        self._matcher = RequestMatcher(model)

    def answer(self, request: bytes) -> bytes:
        response, _ = self._matcher.respond(request)
        return response


def hash_lookup_responder(library: TransactionLibrary,
                          request: bytes) -> bytes | None:
    """One-shot hash lookup (builds the table per call; use the class in loops)."""
    return HashLookupResponder(library).answer(request)


def whole_library_responder(library: TransactionLibrary, request: bytes,
                            cfg: ScoringConfig = DEFAULT_SCORING) -> bytes:
    """One-shot whole-library response (use the class in loops)."""
    return WholeLibraryResponder(library, cfg).answer(request)
