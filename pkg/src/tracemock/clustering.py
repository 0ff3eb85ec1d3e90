"""Grouping transactions by operation type.

Transactions of the same operation produce similar responses, so the
distance matrix is built over response bytes and cut into a caller-supplied
number of groups with average-linkage agglomeration.  The group count is a
required input; there is no automatic estimate.
"""

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .alignment import DEFAULT_SCORING, ScoringConfig, pairwise_distances
from .errors import EmptyLibraryError, InvalidClusterCountError
from .linkage import average_linkage_merges, merge_members
from .trace import TransactionLibrary


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distance matrix with per-row transaction labels."""

    values: np.ndarray
    labels: tuple[int, ...]

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if v.shape[0] != len(self.labels):
            raise ValueError("one label per matrix row required")
        if v.shape[0]:
            if not np.array_equal(v, v.T):
                raise ValueError("distance matrix must be symmetric")
            if np.any(np.diagonal(v) != 0):
                raise ValueError("distance matrix diagonal must be zero")
            if v.min() < 0 or v.max() > 1:
                raise ValueError("distances must lie in [0, 1]")

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def position_of(self, label: int) -> int:
        return self.labels.index(label)

    def submatrix(self, positions) -> "DistanceMatrix":
        pos = np.asarray(positions)
        return DistanceMatrix(self.values[np.ix_(pos, pos)],
                              tuple(self.labels[p] for p in positions))


@dataclass(frozen=True)
class Cluster:
    """A non-empty group of transaction indices with a centroid member."""

    members: tuple[int, ...]
    centroid: int

    def __post_init__(self):
        if not self.members:
            raise ValueError("cluster may not be empty")
        if self.centroid not in self.members:
            raise ValueError("centroid must be a member")


@dataclass(frozen=True)
class ClusterSet:
    clusters: tuple[Cluster, ...]

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)


def response_distance_matrix(library: TransactionLibrary,
                             cfg: ScoringConfig = DEFAULT_SCORING) -> DistanceMatrix:
    """Pairwise alignment distances between all recorded responses."""
    if len(library) == 0:
        raise EmptyLibraryError("cannot build a distance matrix from an empty library")
    values = pairwise_distances(library.responses(), cfg)
    return DistanceMatrix(values, library.indices)


def centroid(members: Iterable[int], matrix: DistanceMatrix) -> int:
    """Member minimising the summed distance to the others; ties -> lowest index."""
    ordered = sorted(members)
    if not ordered:
        raise ValueError("centroid of an empty member set")
    pos = [matrix.position_of(label) for label in ordered]
    sub = matrix.values[np.ix_(pos, pos)]
    sums = sub.sum(axis=1)
    best = sums.min()
    for label, total in zip(ordered, sums):
        if total == best:
            return label
    raise AssertionError("unreachable")


def cluster(matrix: DistanceMatrix, k: int) -> ClusterSet:
    """Partition the matrix rows into exactly k groups.

    Average-linkage merging runs until k groups remain; each group gets its
    centroid filled in.  Deterministic for a fixed matrix.
    """
    n = matrix.size
    if k < 1 or k > n:
        raise InvalidClusterCountError(f"cluster count {k} outside 1..{n}")
    merges = average_linkage_merges(matrix.values, n - k)
    groups = merge_members(n, merges)
    clusters = []
    for slot in sorted(groups):
        labels = tuple(sorted(matrix.labels[p] for p in groups[slot]))
        clusters.append(Cluster(labels, centroid(labels, matrix)))
    return ClusterSet(tuple(clusters))
