"""Response-generation timing for the three strategies.

Every responder answers the same request sequence; warmup calls are
excluded and wall-clock time is taken around each response.
"""

import time
from dataclasses import dataclass

import numpy as np

from ..alignment import DEFAULT_SCORING, ScoringConfig
from ..model import OpaqueServiceModel
from ..trace import TransactionLibrary
from .responders import (HashLookupResponder, PrototypeResponder,
                         WholeLibraryResponder)


@dataclass(frozen=True)
class ResponderTiming:
    name: str
    mean_ms: float
    median_ms: float
    p99_ms: float
    samples: int


@dataclass(frozen=True)
class BenchmarkReport:
    timings: tuple[ResponderTiming, ...]
    library_size: int
    request_count: int

    def timing(self, name: str) -> ResponderTiming:
        for t in self.timings:
            if t.name == name:
                return t
        raise KeyError(name)


def _time_responder(name: str, answer, requests, repetitions: int,
                    warmup: int) -> ResponderTiming:
    for req in requests[:warmup]:
        answer(req)
    samples = []
    for _ in range(repetitions):
        for req in requests:
            start = time.perf_counter()
            answer(req)
            samples.append(time.perf_counter() - start)
    arr = np.array(samples) * 1e3
    return ResponderTiming(name, float(arr.mean()), float(np.median(arr)),
                           float(np.percentile(arr, 99)), len(arr))


def benchmark(library: TransactionLibrary, model: OpaqueServiceModel,
              requests: list[bytes], repetitions: int = 1, warmup: int = 20,
              scoring: ScoringConfig = DEFAULT_SCORING) -> BenchmarkReport:
    """Time hash / whole-library / prototype on an identical request stream."""
    responders = (HashLookupResponder(library),
                  WholeLibraryResponder(library, scoring),
                  PrototypeResponder(model))
    timings = tuple(_time_responder(r.name, r.answer, requests, repetitions,
                                    warmup) for r in responders)
    return BenchmarkReport(timings, len(library), len(requests) * repetitions)
