"""Seeded k-fold cross-validation of the response strategies.

Each repeat partitions the library with its own derived seed; every fold
holds one group out, builds the responder from the remaining transactions
only, answers each held-out request, and classifies the emulated response
with the validator.  The pairwise distance matrices are computed once per
library and sliced per fold (pure-function memoisation; clustering,
alignment and prototypes are still rebuilt from training data only).
"""

import random
from dataclasses import dataclass

import numpy as np

from ..alignment import DEFAULT_SCORING, ScoringConfig
from ..clustering import DistanceMatrix, response_distance_matrix
from ..errors import TooFewTransactionsError
from ..fields import DEFAULT_MIN_FIELD_LENGTH
from ..model import build_model, library_request_distances
from ..trace import TransactionLibrary
from .responders import (HashLookupResponder, PrototypeResponder,
                         WholeLibraryResponder)
from .validator import REASON_PARSE, ValidationOutcome, directory_validator

INVALID_NO_RESPONSE = ValidationOutcome("invalid", REASON_PARSE)


@dataclass(frozen=True)
class FoldResult:
    repeat: int
    fold: int
    total: int
    valid: int


@dataclass(frozen=True)
class AccuracyReport:
    responder: str
    folds: int
    repeats: int
    total_requests: int
    valid_count: int
    accuracy: float
    per_fold: tuple[FoldResult, ...]
    seed: int


class HashResponderFactory:
    name = "hash"

    def prepare(self, library: TransactionLibrary) -> None:
        pass

    def build(self, library: TransactionLibrary, positions: list[int]):
        sub = TransactionLibrary(tuple(library[p] for p in positions))
        return HashLookupResponder(sub).answer


class WholeLibraryResponderFactory:
    name = "whole-library"

    def __init__(self, scoring: ScoringConfig = DEFAULT_SCORING,
                 min_field_length: int = DEFAULT_MIN_FIELD_LENGTH):
        self.scoring = scoring
        self.min_field_length = min_field_length

    def prepare(self, library: TransactionLibrary) -> None:
        pass

    def build(self, library: TransactionLibrary, positions: list[int]):
        sub = TransactionLibrary(tuple(library[p] for p in positions))
        return WholeLibraryResponder(sub, self.scoring,
                                     self.min_field_length).answer


class PrototypeResponderFactory:
    name = "prototype"

    def __init__(self, cluster_count: int, threshold: float = 0.8,
                 scoring: ScoringConfig = DEFAULT_SCORING,
                 min_field_length: int = DEFAULT_MIN_FIELD_LENGTH,
                 response_matrix: DistanceMatrix | None = None,
                 request_matrix: np.ndarray | None = None):
        self.cluster_count = cluster_count
        self.threshold = threshold
        self.scoring = scoring
        self.min_field_length = min_field_length
        self._response_matrix = response_matrix
        self._request_matrix = request_matrix

    def prepare(self, library: TransactionLibrary) -> None:
        if self._response_matrix is None:
            self._response_matrix = response_distance_matrix(library, self.scoring)
        if self._request_matrix is None:
            self._request_matrix = library_request_distances(library, self.scoring)

    def build(self, library: TransactionLibrary, positions: list[int]):
        sub = TransactionLibrary(tuple(library[p] for p in positions))
        resp = req = None
        if self._response_matrix is not None:
            resp = self._response_matrix.submatrix(positions)
            req = self._request_matrix[np.ix_(positions, positions)]
        model = build_model(sub, self.cluster_count, self.threshold,
                            self.scoring, self.min_field_length,
                            response_matrix=resp, request_matrix=req)
        return PrototypeResponder(model).answer


def partition_positions(n: int, folds: int, rng: random.Random) -> list[list[int]]:
    """Shuffled positions dealt into ``folds`` near-equal disjoint groups."""
    order = list(range(n))
    rng.shuffle(order)
    return [sorted(order[f::folds]) for f in range(folds)]


def cross_validate(library: TransactionLibrary, factory, folds: int = 10,
                   repeats: int = 10, seed: int = 0,
                   validator=directory_validator) -> AccuracyReport:
    """Run the full cross-validation; deterministic for a fixed seed."""
    n = len(library)
    if n < folds:
        raise TooFewTransactionsError(
            f"{n} transactions cannot fill {folds} folds")
    if hasattr(factory, "prepare"):
        factory.prepare(library)
    master = random.Random(seed)
    repeat_seeds = [master.randrange(2 ** 63) for _ in range(repeats)]

    results: list[FoldResult] = []
    for repeat, rep_seed in enumerate(repeat_seeds):
        groups = partition_positions(n, folds, random.Random(rep_seed))
        for fold, held_out in enumerate(groups):
            held = set(held_out)
            train = [p for p in range(n) if p not in held]
            answer = factory.build(library, train)
            valid = 0
            for p in held_out:
                tx = library[p]
                emulated = answer(tx.request)
                outcome = (INVALID_NO_RESPONSE if emulated is None
                           else validator(tx.response, emulated))
                valid += outcome.is_valid
            results.append(FoldResult(repeat, fold, len(held_out), valid))

    total = sum(r.total for r in results)
    valid = sum(r.valid for r in results)
    return AccuracyReport(factory.name, folds, repeats, total, valid,
                          valid / total if total else 0.0,
                          tuple(results), seed)
