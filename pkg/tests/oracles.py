"""Independent brute-force oracles used by the tests.

Everything here enumerates alignments explicitly and never touches the
package's DP code paths, so agreement is meaningful evidence.
"""

import itertools

from tracemock.alignment import GAP, WILDCARD, ScoringConfig


def enumerate_alignments(la: int, lb: int):
    """Yield every monotone global alignment as a list of (i, j) moves.

    A move advances a (i=1), b (j=1) or both.  Generated recursively from
    the front; the count follows the Delannoy numbers.
    """
    if la == 0 and lb == 0:
        yield []
        return
    if la > 0:
        for rest in enumerate_alignments(la - 1, lb):
            yield [(1, 0)] + rest
    if lb > 0:
        for rest in enumerate_alignments(la, lb - 1):
            yield [(0, 1)] + rest
    if la > 0 and lb > 0:
        for rest in enumerate_alignments(la - 1, lb - 1):
            yield [(1, 1)] + rest


def brute_force_score(a, b, cfg: ScoringConfig) -> float:
    """Maximum global alignment score by exhaustive path enumeration."""
    a = list(a)
    b = list(b)
    best = None
    for moves in enumerate_alignments(len(a), len(b)):
        score = 0.0
        i = j = 0
        for da, db in moves:
            if da and db:
                score += cfg.match_score if a[i] == b[j] else cfg.mismatch_penalty
            else:
                score += cfg.gap_penalty
            i += da
            j += db
        if best is None or score > best:
            best = score
    return best


def brute_force_weighted_score(prototype, weights, request,
                               cfg: ScoringConfig) -> float:
    """Exhaustive maximum of the weighted wildcard scheme.

    Costs mirror the package contract: literal pairs score w*match or
    w*mismatch, wildcard pairs w*wildcard; skipping a wildcard position
    costs w*wildcard, skipping a literal w*gap; inserting a request byte
    next to a wildcard costs that wildcard's w*wildcard, elsewhere
    mean(w)*gap.
    """
    p = list(prototype)
    w = list(weights)
    r = list(request)
    mean_w = sum(w) / len(w)

    def insert_cost(consumed: int) -> float:
        nxt = p[consumed] if consumed < len(p) else None
        prev = p[consumed - 1] if consumed > 0 else None
        if nxt == WILDCARD:
            return w[consumed] * cfg.wildcard_score
        if prev == WILDCARD:
            return w[consumed - 1] * cfg.wildcard_score
        return mean_w * cfg.gap_penalty

    best = None
    for moves in enumerate_alignments(len(p), len(r)):
        score = 0.0
        i = j = 0
        for dp, dr in moves:
            if dp and dr:
                if p[i] == WILDCARD:
                    score += w[i] * cfg.wildcard_score
                elif p[i] == r[j]:
                    score += w[i] * cfg.match_score
                else:
                    score += w[i] * cfg.mismatch_penalty
            elif dp:
                if p[i] == WILDCARD:
                    score += w[i] * cfg.wildcard_score
                else:
                    score += w[i] * cfg.gap_penalty
            else:
                score += insert_cost(i)
            i += dp
            j += dr
        if best is None or score > best:
            best = score
    return best


def recursive_weighted_score(prototype, weights, request,
                             cfg: ScoringConfig) -> float:
    """Same cost model as brute_force_weighted_score via memoised recursion.

    Path enumeration is exponential; this top-down formulation stays exact
    at the 12-byte example length while remaining independent of the
    package's bottom-up vectorised DP.
    """
    p = list(prototype)
    w = list(weights)
    r = list(request)
    mean_w = sum(w) / len(w)

    def pair_score(i, j):
        if p[i] == WILDCARD:
            return w[i] * cfg.wildcard_score
        return w[i] * (cfg.match_score if p[i] == r[j] else cfg.mismatch_penalty)

    def skip_proto(i):
        if p[i] == WILDCARD:
            return w[i] * cfg.wildcard_score
        return w[i] * cfg.gap_penalty

    def insert_cost(consumed):
        nxt = p[consumed] if consumed < len(p) else None
        prev = p[consumed - 1] if consumed > 0 else None
        if nxt == WILDCARD:
            return w[consumed] * cfg.wildcard_score
        if prev == WILDCARD:
            return w[consumed - 1] * cfg.wildcard_score
        return mean_w * cfg.gap_penalty

    memo = {}

    def best(i, j):
        if (i, j) in memo:
            return memo[i, j]
        if i == len(p) and j == len(r):
            value = 0.0
        elif i == len(p):
            value = insert_cost(i) + best(i, j + 1)
        elif j == len(r):
            value = skip_proto(i) + best(i + 1, j)
        else:
            value = max(pair_score(i, j) + best(i + 1, j + 1),
                        skip_proto(i) + best(i + 1, j),
                        insert_cost(i) + best(i, j + 1))
        memo[i, j] = value
        return value

    return best(0, 0)


def consensus_by_cases(columns, rows: int, threshold: float):
    """Clause-by-clause consensus evaluation on raw occurrence columns.

    Returns the prototype symbols; truncated columns are dropped.  Mirrors
    the published rule directly: take the modal symbol (gap loses ties,
    byte ties broken by smaller value), emit it when its relative frequency
    reaches the threshold and it is not a gap, delete gap-modal columns at
    frequency >= 1/2, wildcard otherwise.
    """
    out = []
    for column in columns:
        non_gap = {s: c for s, c in column.items() if s != GAP}
        mode = None
        if non_gap:
            top = max(non_gap.values())
            mode = min(s for s, c in non_gap.items() if c == top)
        gap_count = column.get(GAP, 0)
        if mode is None or gap_count > non_gap[mode]:
            if gap_count / rows >= 0.5:
                continue
            out.append(WILDCARD)
        elif non_gap[mode] / rows >= threshold:
            out.append(mode)
        else:
            out.append(WILDCARD)
    return tuple(out)


def all_sequences(alphabet, max_len: int):
    """Every tuple over ``alphabet`` with length 0..max_len."""
    for length in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=length)
