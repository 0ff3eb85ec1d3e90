"""Global sequence alignment over raw bytes.

Two scoring schemes share one dynamic-programming core:

* plain Needleman-Wunsch between two byte sequences (analysis-time
  distances, response generation), and
* the weighted wildcard variant that scores a live request against a
  consensus prototype, where every column cost is scaled by the
  prototype position's weight and wildcard positions accept anything.

The DP fills each row with vectorised numpy operations.  Within a row the
"consume b against a gap" transition is a running maximum over prefix
sums, which is exact for linear (per-position) gap costs.  Traceback is
reconstructed from choice records made while filling, never by re-deriving
float comparisons, so tie-breaking (diagonal, then gap-in-b, then gap-in-a)
is deterministic even with irrational weights.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInputError, LengthMismatchError

# Sentinel symbols outside the 256 byte values.  GAP marks alignment padding,
# WILDCARD marks a high-variability prototype position.
GAP = 256
WILDCARD = 257

_SYMBOL_SPACE = 258  # bytes + GAP + WILDCARD


@dataclass(frozen=True)
class ScoringConfig:
    """Alignment scoring constants.

    ``wildcard_score`` only matters for prototype matching; plain alignment
    never sees a wildcard symbol.
    """

    match_score: float = 1.0
    mismatch_penalty: float = -1.0
    gap_penalty: float = -1.0
    wildcard_score: float = 0.0

    def __post_init__(self):
        if self.match_score <= 0:
            raise ValueError("match_score must be positive")
        if self.mismatch_penalty >= self.match_score:
            raise ValueError("mismatch_penalty must be below match_score")
        if self.gap_penalty > 0:
            raise ValueError("gap_penalty must be <= 0")


DEFAULT_SCORING = ScoringConfig()


@dataclass(frozen=True)
class Alignment:
    """A global alignment of two sequences.

    ``aligned_a`` and ``aligned_b`` have equal length, contain byte values
    plus GAP, and never hold GAP in the same position.  Removing GAPs
    reproduces the inputs exactly.
    """

    aligned_a: tuple[int, ...]
    aligned_b: tuple[int, ...]
    score: float


def as_symbols(data: bytes | bytearray | Iterable[int]) -> np.ndarray:
    """Normalise input to an int16 numpy array of symbols."""
    if isinstance(data, (bytes, bytearray)):
        return np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int16)
    arr = np.asarray(list(data), dtype=np.int16)
    return arr


def degap(aligned: Sequence[int]) -> bytes:
    """Strip GAP symbols from an aligned row, returning the raw bytes."""
    return bytes(s for s in aligned if s != GAP)


# ---------------------------------------------------------------------------
# DP core


def _dp_fill(scores: np.ndarray, up_costs: np.ndarray, left_costs: np.ndarray,
             want_path: bool):
    """Fill the DP table for one (a, b) pair.

    ``scores[i, j]`` is the value of pairing a_i with b_j; ``up_costs[i]``
    the value of consuming a_i against a gap; ``left_costs[j]`` of consuming
    b_j against a gap.  Returns the final H row and, when requested, the
    per-row traceback records (origin column K and diagonal-vs-up flags).
    """
    n, m = scores.shape
    left_cum = np.empty(m + 1)
    left_cum[0] = 0.0
    np.cumsum(left_costs, out=left_cum[1:])

    h = left_cum.copy()
    cols = np.arange(m + 1)
    k_rows = np.empty((n, m + 1), dtype=np.int32) if want_path else None
    du_rows = np.empty((n, m), dtype=bool) if want_path else None

    t = np.empty(m + 1)
    for i in range(n):
        diag = h[:m] + scores[i]
        upv = h[1:] + up_costs[i]
        du = diag >= upv  # tie prefers the diagonal
        cand = np.where(du, diag, upv)
        t[0] = h[0] + up_costs[i]
        t[1:] = cand - left_cum[1:]
        run = np.maximum.accumulate(t)
        if want_path:
            # Last column achieving the running max = fewest gap-in-a moves.
            arg = np.where(t >= run, cols, 0)
            k_rows[i] = np.maximum.accumulate(arg)
            du_rows[i] = du
        h = run + left_cum
    return h, k_rows, du_rows


def _trace_moves(k_rows, du_rows, n: int, m: int) -> list[tuple[bool, bool]]:
    """Reconstruct (advance_a, advance_b) moves from the fill records."""
    moves: list[tuple[bool, bool]] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i == 0:
            moves.append((False, True))
            j -= 1
            continue
        k = int(k_rows[i - 1][j])
        if k < j:
            moves.extend([(False, True)] * (j - k))
            j = k
            continue
        if j == 0 or not du_rows[i - 1][j - 1]:
            moves.append((True, False))
            i -= 1
        else:
            moves.append((True, True))
            i -= 1
            j -= 1
    moves.reverse()
    return moves


# ---------------------------------------------------------------------------
# Plain Needleman-Wunsch


def global_align(a, b, cfg: ScoringConfig = DEFAULT_SCORING) -> Alignment:
    """Optimal global alignment of two byte sequences.

    Runs in O(|a|*|b|); empty inputs are allowed and align against gaps.
    """
    sa = as_symbols(a)
    sb = as_symbols(b)
    n, m = len(sa), len(sb)
    scores = np.where(sa[:, None] == sb[None, :],
                      cfg.match_score, cfg.mismatch_penalty)
    up = np.full(n, cfg.gap_penalty)
    left = np.full(m, cfg.gap_penalty)
    h, k_rows, du_rows = _dp_fill(scores, up, left, want_path=True)
    moves = _trace_moves(k_rows, du_rows, n, m)

    out_a: list[int] = []
    out_b: list[int] = []
    i = j = 0
    for adv_a, adv_b in moves:
        out_a.append(int(sa[i]) if adv_a else GAP)
        out_b.append(int(sb[j]) if adv_b else GAP)
        i += adv_a
        j += adv_b
    return Alignment(tuple(out_a), tuple(out_b), float(h[m]))


def distance(a, b, cfg: ScoringConfig = DEFAULT_SCORING) -> float:
    """Normalised alignment distance in [0, 1]; 0 iff the inputs are equal.

    Defined as 1 - score / (match_score * max(|a|, |b|)), clamped.
    """
    sa = as_symbols(a)
    sb = as_symbols(b)
    if len(sa) == 0 or len(sb) == 0:
        raise EmptyInputError("distance requires non-empty inputs")
    score = _batch_plain_scores(sa, sb[None, :], np.array([len(sb)]), cfg)[0]
    return _normalise_distance(score, len(sa), len(sb), cfg)


def _normalise_distance(score: float, la: int, lb: int, cfg: ScoringConfig) -> float:
    d = 1.0 - score / (cfg.match_score * max(la, lb))
    return min(1.0, max(0.0, d))


# ---------------------------------------------------------------------------
# Batched scoring (one sequence against many)


def _pad_sequences(seqs: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Stack int16 symbol arrays into a -1 padded matrix plus lengths."""
    lengths = np.array([len(s) for s in seqs], dtype=np.int64)
    width = int(lengths.max()) if len(seqs) else 0
    padded = np.full((len(seqs), max(width, 1)), -1, dtype=np.int16)
    for row, s in enumerate(seqs):
        padded[row, :len(s)] = s
    return padded, lengths


def _batch_plain_scores(a: np.ndarray, padded: np.ndarray, lengths: np.ndarray,
                        cfg: ScoringConfig) -> np.ndarray:
    """Alignment scores of ``a`` against every padded row.

    Padding (-1) never matches a byte; because the DP sweeps left to right,
    reading column ``lengths[k]`` gives the exact unpadded result.
    """
    count, width = padded.shape
    g = cfg.gap_penalty
    left_cum = g * np.arange(width + 1)
    h = np.broadcast_to(left_cum, (count, width + 1)).copy()
    t = np.empty((count, width + 1))
    for sym in a:
        s = np.where(padded == sym, cfg.match_score, cfg.mismatch_penalty)
        cand = np.maximum(h[:, :width] + s, h[:, 1:] + g)
        t[:, 0] = h[:, 0] + g
        t[:, 1:] = cand - left_cum[1:]
        np.maximum.accumulate(t, axis=1, out=t)
        h = t + left_cum
    return h[np.arange(count), lengths]


def pairwise_distances(seqs: Sequence[bytes], cfg: ScoringConfig = DEFAULT_SCORING) -> np.ndarray:
    """Symmetric matrix of distance() over all pairs, zero diagonal."""
    arrs = [as_symbols(s) for s in seqs]
    for s in arrs:
        if len(s) == 0:
            raise EmptyInputError("pairwise distances require non-empty inputs")
    n = len(arrs)
    out = np.zeros((n, n))
    if n < 2:
        return out
    padded, lengths = _pad_sequences(arrs)
    for i in range(n - 1):
        scores = _batch_plain_scores(arrs[i], padded[i + 1:], lengths[i + 1:], cfg)
        li = len(arrs[i])
        maxlen = np.maximum(li, lengths[i + 1:])
        d = 1.0 - scores / (cfg.match_score * maxlen)
        np.clip(d, 0.0, 1.0, out=d)
        out[i, i + 1:] = d
        out[i + 1:, i] = d
    return out


# ---------------------------------------------------------------------------
# Weighted wildcard scoring against prototypes


def _check_prototype(prototype: Sequence[int], weights: Sequence[float]) -> None:
    if len(weights) != len(prototype):
        raise LengthMismatchError(
            f"{len(weights)} weights for a {len(prototype)}-symbol prototype")


class PrototypeScorer:
    """Batched scorer for one or more (prototype, weights) pairs.

    Precomputes the padded symbol/weight matrices and score bounds so a hot
    matching loop only pays the per-request DP.

    A wildcard run marks an arbitrary payload section, so it matches any
    number of request bytes including zero: skipping a wildcard position
    and inserting a request byte next to a wildcard both cost
    w*wildcard_score (zero under the defaults).  Skipping a literal
    position costs w*gap_penalty and inserting a byte between literals
    costs mean(w)*gap_penalty.
    """

    def __init__(self, prototypes: Sequence[Sequence[int]],
                 weight_sets: Sequence[Sequence[float]],
                 cfg: ScoringConfig = DEFAULT_SCORING):
        if len(prototypes) != len(weight_sets):
            raise LengthMismatchError("one weight set per prototype required")
        for p, w in zip(prototypes, weight_sets):
            _check_prototype(p, w)
            if len(p) == 0:
                raise EmptyInputError("prototypes must be non-empty")
        self.cfg = cfg
        arrs = [np.asarray(list(p), dtype=np.int16) for p in prototypes]
        self._padded, self._lengths = _pad_sequences(arrs)
        count, width = self._padded.shape
        self._weights = np.zeros((count, width))
        for row, w in enumerate(weight_sets):
            self._weights[row, :len(w)] = np.asarray(w, dtype=float)

        wild = self._padded == WILDCARD
        self._match = self._weights * cfg.match_score
        self._nomatch = np.where(wild, self._weights * cfg.wildcard_score,
                                 self._weights * cfg.mismatch_penalty)
        gap_cols = np.where(wild, self._weights * cfg.wildcard_score,
                            self._weights * cfg.gap_penalty)
        self._left_cum = np.zeros((count, width + 1))
        np.cumsum(gap_cols, axis=1, out=self._left_cum[:, 1:])

        # Insertion cost between prototype positions j-1 and j: free-ish when
        # either neighbour is a wildcard (the byte lands inside a payload
        # section), mean-weight gap penalty otherwise.
        mean_w = self._weights.sum(axis=1) / self._lengths
        next_wild = np.zeros((count, width + 1), dtype=bool)
        next_wild[:, :width] = wild
        prev_wild = np.zeros((count, width + 1), dtype=bool)
        prev_wild[:, 1:] = wild
        w_next = np.zeros((count, width + 1))
        w_next[:, :width] = self._weights
        w_prev = np.zeros((count, width + 1))
        w_prev[:, 1:] = self._weights
        self._insert_costs = np.where(
            next_wild, w_next * cfg.wildcard_score,
            np.where(prev_wild, w_prev * cfg.wildcard_score,
                     (mean_w * cfg.gap_penalty)[:, None]))

        literal = (~wild) & (self._padded >= 0)
        self.max_scores = np.where(literal, self._match, 0.0).sum(axis=1) + \
            np.where(wild, self._weights * cfg.wildcard_score, 0.0).sum(axis=1)
        self.min_scores = np.where(literal, self._weights * cfg.mismatch_penalty, 0.0).sum(axis=1) + \
            np.where(wild, self._weights * cfg.wildcard_score, 0.0).sum(axis=1)

    def scores(self, request) -> np.ndarray:
        """Maximum weighted alignment score of the request per prototype."""
        r = as_symbols(request)
        count, width = self._padded.shape
        h = self._left_cum.copy()
        t = np.empty((count, width + 1))
        ins = self._insert_costs
        for sym in r:
            s = np.where(self._padded == sym, self._match, self._nomatch)
            cand = np.maximum(h[:, :width] + s, h[:, 1:] + ins[:, 1:])
            t[:, :1] = h[:, :1] + ins[:, :1]
            t[:, 1:] = cand - self._left_cum[:, 1:]
            np.maximum.accumulate(t, axis=1, out=t)
            h = t + self._left_cum
        return h[np.arange(count), self._lengths]

    def relative_distances(self, request) -> np.ndarray:
        """d_rel per prototype, each clamped to [0, 1]; degenerate -> 1.0."""
        s = self.scores(request)
        span = self.max_scores - self.min_scores
        out = np.ones(len(s))
        ok = span > 0
        out[ok] = 1.0 - (s[ok] - self.min_scores[ok]) / span[ok]
        np.clip(out, 0.0, 1.0, out=out)
        return out


def weighted_score(prototype: Sequence[int], weights: Sequence[float], request,
                   cfg: ScoringConfig = DEFAULT_SCORING) -> float:
    """Maximum weighted wildcard alignment score of a request vs a prototype.

    Column score is w*match for an equal literal, w*mismatch for an unequal
    literal and w*wildcard_score whenever the prototype symbol is WILDCARD.
    """
    return float(PrototypeScorer([prototype], [weights], cfg).scores(request)[0])


def prototype_score_bounds(prototype: Sequence[int], weights: Sequence[float],
                           cfg: ScoringConfig = DEFAULT_SCORING) -> tuple[float, float]:
    """(best, worst) gap-free alignment scores for the prototype.

    The worst case pairs every position with a symbol unequal to all
    prototype symbols, so literals score w*mismatch and wildcards
    w*wildcard_score.
    """
    _check_prototype(prototype, weights)
    best = worst = 0.0
    for sym, w in zip(prototype, weights):
        if sym == WILDCARD:
            best += w * cfg.wildcard_score
            worst += w * cfg.wildcard_score
        else:
            best += w * cfg.match_score
            worst += w * cfg.mismatch_penalty
    return best, worst


def relative_distance(prototype: Sequence[int], weights: Sequence[float], request,
                      cfg: ScoringConfig = DEFAULT_SCORING) -> float:
    """Score-normalised match distance in [0, 1]; 0 is the best possible match.

    An all-wildcard prototype has no score range; it is reported as
    distance 1.0 (the caller is expected to have been warned at model build
    time).
    """
    if len(prototype) == 0:
        raise EmptyInputError("relative_distance requires a non-empty prototype")
    best, worst = prototype_score_bounds(prototype, weights, cfg)
    if not best > worst:
        return 1.0
    s = weighted_score(prototype, weights, request, cfg)
    d = 1.0 - (s - worst) / (best - worst)
    return min(1.0, max(0.0, d))
