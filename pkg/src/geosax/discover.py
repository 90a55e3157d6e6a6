"""Motif discovery over long symbol sequences.

Brute-force scan in the spirit of the classic time-series motif definition:
candidate subsequences are ranked by how many non-trivial matches they have
within radius R, motifs are emitted greedily with their neighborhoods
suppressed, and each motif is re-centered on the member minimizing the total
distance to the others.  Positions are 1-based throughout, matching the usual
subsequence notation T_{i,n}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook
from .encode import SymbolSequence
from .errors import ValidationError
from .match import _check_codebook


@dataclass(frozen=True)
class MotifQuery:
    """Motif search parameters: pattern length (in symbols), match radius,
    trivial-match neighborhood, and how many motifs to return."""

    length: int
    radius: float
    trivial_radius: int
    top_k: int

    def __post_init__(self):
        if self.length < 1:
            raise ValidationError("motif length must be >= 1")
        if self.radius < 0:
            raise ValidationError("radius must be >= 0")
        if self.trivial_radius < 1:
            raise ValidationError("trivial radius must be >= 1")
        if self.top_k < 1:
            raise ValidationError("top_k must be >= 1")


@dataclass(frozen=True)
class MotifResult:
    """A discovered motif.

    ``member_positions`` lists every occurrence in the group (center included)
    and is empty for a singleton candidate with no matches; ``count`` is its
    length.  ``member_distances`` are symbol distances from the center.
    """

    center_pos: int
    member_positions: tuple[int, ...]
    member_distances: tuple[float, ...]
    count: int


def subsequence(t: SymbolSequence, i: int, n: int) -> SymbolSequence:
    """Contiguous slice T_{i,n} = (t_i, ..., t_{i+n-1}), 1-based."""
    if n < 1 or i < 1 or i > len(t) - n + 1:
        raise ValidationError(
            f"subsequence start {i} length {n} out of range for |T| = {len(t)}"
        )
    sub = t.symbols[i - 1 : i - 1 + n]
    return SymbolSequence(
        codebook_id=t.codebook_id,
        window=t.window,
        symbols=sub,
        source_len=n * t.window,
        alphabet_size=t.alphabet_size,
        id=f"{t.id}[{i}:{i + n - 1}]",
        label=t.label,
    )


def is_trivial_match(p: int, q: int, m: int) -> bool:
    """True iff positions p and q overlap within the m-neighborhood,
    i.e. |p - q| <= m - 1 (p = q included)."""
    if p < 1 or q < 1:
        raise ValidationError("positions are 1-based")
    return abs(p - q) <= m - 1


def _subsequence_distances(t: SymbolSequence, length: int, cb: Codebook) -> np.ndarray:
    """All-pairs rigid symbol distances between length-l subsequences of t."""
    syms = t.symbols
    n_sub = len(t) - length + 1
    D = np.zeros((n_sub, n_sub))
    for offset in range(length):
        col = syms[offset : offset + n_sub]
        D += cb.lut[col[:, None], col[None, :]]
    return D


def _greedy_spaced(positions: list[int], m: int) -> list[int]:
    """Max subset of sorted positions with pairwise gaps >= m (greedy ascending)."""
    kept: list[int] = []
    for pos in positions:
        if not kept or pos - kept[-1] >= m:
            kept.append(pos)
    return kept


def _motif_at(c: int, D: np.ndarray, query: MotifQuery, suppressed: set[int]):
    """Build the would-be motif for candidate c (0-based) under suppression.

    The center/member set is the fixed point of: pick the member minimizing
    the total distance to the group (ties to the lowest position), then drop
    members farther than R from it.  The loop terminates because the group
    only shrinks.
    """
    m = query.trivial_radius
    row = D[c]
    matches = [
        j
        for j in range(D.shape[0])
        if j not in suppressed and abs(j - c) >= m and row[j] < query.radius
    ]
    if not matches:
        return (0, c, [], [])
    members = _greedy_spaced(sorted(matches + [c]), m)
    while True:
        sub = np.array(members)
        center = members[int(np.argmin(D[np.ix_(sub, sub)].sum(axis=1)))]
        trimmed = [j for j in members if D[center, j] <= query.radius]
        if trimmed == members:
            break
        members = trimmed
    dists = [float(D[center, j]) for j in members]
    return (len(members), center, members, dists)


def find_motifs(t: SymbolSequence, query: MotifQuery, cb: Codebook) -> list[MotifResult]:
    """Top-k motifs by brute force.

    Each emission picks the candidate whose (pairwise non-trivial) match group
    is largest, re-centers it on the member with minimum total distance, and
    suppresses the trivial neighborhoods of all members before the next round.
    Ties go to the lowest position.  A candidate with no matches yields a
    singleton motif with an empty member list.
    """
    _check_codebook(t, cb)
    if len(t) < query.length:
        raise ValidationError(f"|T| = {len(t)} is shorter than the motif length")
    D = _subsequence_distances(t, query.length, cb)
    n_sub = D.shape[0]
    suppressed: set[int] = set()
    results: list[MotifResult] = []
    for _ in range(query.top_k):
        best = None
        for c in range(n_sub):
            if c in suppressed:
                continue
            count, center, members, dists = _motif_at(c, D, query, suppressed)
            key = (-count, c)
            if best is None or key < best[0]:
                best = (key, count, center, members, dists)
        if best is None:
            break
        _, count, center, members, dists = best
        results.append(
            MotifResult(
                center_pos=center + 1,
                member_positions=tuple(j + 1 for j in members),
                member_distances=tuple(dists),
                count=count,
            )
        )
        for j in members if members else [center]:
            lo = max(0, j - (query.trivial_radius - 1))
            hi = min(n_sub, j + query.trivial_radius)
            suppressed.update(range(lo, hi))
    return results


def auto_radius(
    t: SymbolSequence,
    length: int,
    cb: Codebook,
    percentile: float = 5.0,
    max_pairs: int = 5000,
    seed: int = 0,
) -> float:
    """Data-driven match radius: a low percentile of sampled pairwise
    subsequence distances."""
    _check_codebook(t, cb)
    if len(t) < length:
        raise ValidationError("sequence shorter than the motif length")
    D = _subsequence_distances(t, length, cb)
    n_sub = D.shape[0]
    iu = np.triu_indices(n_sub, k=1)
    vals = D[iu]
    if vals.size > max_pairs:
        rng = np.random.default_rng(seed)
        vals = rng.choice(vals, size=max_pairs, replace=False)
    if vals.size == 0:
        return 0.0
    return float(np.percentile(vals, percentile))
