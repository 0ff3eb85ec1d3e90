"""Deterministic average-linkage agglomeration.

Shared by operation-type clustering (cut at k groups) and guide-tree
construction for progressive alignment.  Slots are merged into the smaller
slot id, which keeps the active slots ordered by their smallest member, so
a row-major argmin over the working matrix realises the tie rule "smallest
(min-index, max-index) pair first" exactly.
"""

import numpy as np


def average_linkage_merges(dist: np.ndarray, merge_count: int | None = None
                           ) -> list[tuple[int, int, float]]:
    """Run agglomerative merging with average linkage.

    Returns up to ``merge_count`` (default n-1) merge steps as
    ``(slot_a, slot_b, linkage_distance)`` with slot_a < slot_b; after each
    step slot_b is retired and slot_a holds the union.  Deterministic for a
    fixed input matrix.
    """
    n = dist.shape[0]
    if merge_count is None:
        merge_count = n - 1
    work = dist.astype(float).copy()
    np.fill_diagonal(work, np.inf)
    size = np.ones(n)
    merges: list[tuple[int, int, float]] = []
    for _ in range(merge_count):
        flat = int(np.argmin(work))
        i, j = divmod(flat, n)
        if i > j:  # row-major scan of a symmetric matrix yields i < j
            i, j = j, i
        height = float(work[i, j])
        merges.append((i, j, height))
        combined = (size[i] * work[i] + size[j] * work[j]) / (size[i] + size[j])
        work[i] = combined
        work[:, i] = combined
        work[i, i] = np.inf
        work[j, :] = np.inf
        work[:, j] = np.inf
        size[i] += size[j]
    return merges


def merge_members(n: int, merges: list[tuple[int, int, float]]) -> dict[int, list[int]]:
    """Replay merges over singleton slots; returns surviving slot -> members."""
    groups: dict[int, list[int]] = {i: [i] for i in range(n)}
    for a, b, _ in merges:
        groups[a].extend(groups.pop(b))
    return groups
