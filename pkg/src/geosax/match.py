"""Fast distances between symbol sequences, DTW matching, and kNN search.

Symbolic comparisons read only the codebook's lookup table; no manifold
geometry runs at query time (the geometry call counter stays flat).  Queries
are read-only over the database and codebook, so they can run in parallel;
adding entries requires exclusive access.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import geometry
from .codebook import Codebook
from .encode import SymbolSequence
from .errors import (
    ArtifactMismatchError,
    IncompatibleManifoldsError,
    LengthMismatchError,
    ValidationError,
)
from .stats import ManifoldSequence


@dataclass
class SequenceDatabase:
    """Encoded sequences sharing one codebook, with optional raw originals
    kept around for oracle comparisons."""

    codebook_id: str
    entries: list[SymbolSequence] = field(default_factory=list)
    raw: dict[str, ManifoldSequence] = field(default_factory=dict)

    def add(self, entry: SymbolSequence, raw: ManifoldSequence | None = None) -> None:
        if entry.codebook_id != self.codebook_id:
            raise ArtifactMismatchError("entry was encoded with a different codebook")
        self.entries.append(entry)
        if raw is not None:
            self.raw[entry.id] = raw

    def __len__(self) -> int:
        return len(self.entries)


def _check_codebook(ss: SymbolSequence, cb: Codebook) -> None:
    if ss.codebook_id != cb.id:
        raise ArtifactMismatchError(
            f"sequence was encoded with codebook {ss.codebook_id}, got {cb.id}"
        )


def symbol_distance(p: SymbolSequence, q: SymbolSequence, cb: Codebook) -> float:
    """Position-wise sum of prototype geodesic distances, read from the LUT.

    Defined for equal-length strings; unequal lengths need DTW.
    """
    _check_codebook(p, cb)
    _check_codebook(q, cb)
    if len(p) != len(q):
        raise LengthMismatchError(
            f"rigid symbol distance needs equal lengths ({len(p)} vs {len(q)}); use DTW"
        )
    return float(cb.lut[p.symbols, q.symbols].sum())


class DtwResult(NamedTuple):
    distance: float
    path: list[tuple[int, int]]


def dtw_cost_matrix(p, q, cost) -> np.ndarray:
    """Materialize the local cost matrix for dtw(); cost may already be one."""
    if isinstance(cost, np.ndarray):
        C = np.asarray(cost, dtype=np.float64)
        if C.shape != (len(p), len(q)):
            raise ValidationError(f"cost matrix shape {C.shape} != ({len(p)}, {len(q)})")
        return C
    return np.array([[cost(a, b) for b in q] for a in p], dtype=np.float64)


def dtw(p, q, cost, band: int | None = None) -> DtwResult:
    """Classic DTW with steps {(1,0),(0,1),(1,1)}, anchored at both ends.

    ``cost`` is either a callable on sequence elements or a precomputed
    (len(p), len(q)) matrix.  ``band`` optionally restricts |i - j| to a
    Sakoe-Chiba corridor.  Returns the summed cost along the optimal path and
    the path itself as 0-based index pairs.
    """
    if len(p) == 0 or len(q) == 0:
        raise ValidationError("DTW inputs must be nonempty")
    C = dtw_cost_matrix(p, q, cost)
    n, m = C.shape
    if band is not None:
        if band < abs(n - m):
            raise ValidationError(f"band {band} cannot align lengths {n} and {m}")
        acc = _accumulate_banded(C, band)
    else:
        acc = _accumulate(C)
    path = _backtrack(acc)
    return DtwResult(float(acc[-1, -1]), path)


def _accumulate(C: np.ndarray) -> np.ndarray:
    n, m = C.shape
    acc = np.empty_like(C)
    acc[0] = np.cumsum(C[0])
    for i in range(1, n):
        prev = acc[i - 1]
        best_above = np.empty(m)
        best_above[0] = prev[0]
        np.minimum(prev[1:], prev[:-1], out=best_above[1:])
        # row recurrence acc[i,j] = C[i,j] + min(best_above[j], acc[i,j-1]),
        # solved in closed form with a prefix-sum change of variables
        row_sum = np.cumsum(C[i])
        shifted = row_sum - C[i]
        acc[i] = np.minimum.accumulate(best_above - shifted) + row_sum
    return acc


def _accumulate_banded(C: np.ndarray, band: int) -> np.ndarray:
    n, m = C.shape
    acc = np.full((n, m), np.inf)
    acc[0, 0] = C[0, 0]
    for j in range(1, min(m, band + 1)):
        acc[0, j] = acc[0, j - 1] + C[0, j]
    for i in range(1, n):
        for j in range(max(0, i - band), min(m, i + band + 1)):
            best = np.inf
            if j > 0:
                best = acc[i, j - 1]
            best = min(best, acc[i - 1, j])
            if j > 0:
                best = min(best, acc[i - 1, j - 1])
            acc[i, j] = C[i, j] + best
    return acc


def _backtrack(acc: np.ndarray) -> list[tuple[int, int]]:
    i, j = acc.shape[0] - 1, acc.shape[1] - 1
    path = [(i, j)]
    while i > 0 or j > 0:
        candidates = []
        if i > 0 and j > 0:
            candidates.append((acc[i - 1, j - 1], 0, (i - 1, j - 1)))
        if i > 0:
            candidates.append((acc[i - 1, j], 1, (i - 1, j)))
        if j > 0:
            candidates.append((acc[i, j - 1], 2, (i, j - 1)))
        _, _, (i, j) = min(candidates)
        path.append((i, j))
    path.reverse()
    return path


def dtw_symbolic(
    p: SymbolSequence, q: SymbolSequence, cb: Codebook, band: int | None = None
) -> DtwResult:
    """DTW where local costs are LUT lookups; never touches the manifold."""
    _check_codebook(p, cb)
    _check_codebook(q, cb)
    C = cb.lut[p.symbols[:, None], q.symbols[None, :]]
    return dtw(p.symbols, q.symbols, C, band=band)


def dtw_geodesic(
    a: ManifoldSequence, b: ManifoldSequence, band: int | None = None
) -> DtwResult:
    """Baseline DTW with geodesic distances on the raw points."""
    if a.descriptor != b.descriptor:
        raise IncompatibleManifoldsError("sequences live on different manifolds")
    C = geometry.pairwise_distances(a.descriptor, a.points, b.points)
    return dtw(a.points, b.points, C, band=band)


def knn(
    query: SymbolSequence, db: SequenceDatabase, cb: Codebook, k: int
) -> list[tuple[str, float]]:
    """k nearest database entries under symbolic DTW, ties broken by entry id."""
    if len(db) == 0:
        raise ValidationError("database is empty")
    if k > len(db):
        raise ValidationError(f"k={k} exceeds database size {len(db)}")
    if db.codebook_id != cb.id:
        raise ArtifactMismatchError("database uses a different codebook")
    scored = [
        (dtw_symbolic(query, entry, cb).distance, entry.id) for entry in db.entries
    ]
    scored.sort()
    return [(entry_id, dist) for dist, entry_id in scored[:k]]


def nn_classify(query: SymbolSequence, db: SequenceDatabase, cb: Codebook) -> str:
    """Label of the 1-NN under symbolic DTW."""
    labels = {e.id: e.label for e in db.entries}
    if any(lbl is None for lbl in labels.values()):
        raise ValidationError("database entries must be labeled for classification")
    (best_id, _), = knn(query, db, cb, 1)
    return labels[best_id]


def find_exact(haystack: SymbolSequence, needle) -> list[int]:
    """1-based start positions where the symbol pattern occurs exactly.

    Exact-substring lookup over the symbol string; the discovery module uses
    it to confirm repeated patterns.
    """
    pattern = np.asarray(
        needle.symbols if isinstance(needle, SymbolSequence) else needle, dtype=np.int64
    )
    if pattern.size == 0:
        raise ValidationError("pattern must be nonempty")
    text = haystack.symbols
    n, m = text.size, pattern.size
    if m > n:
        return []
    windows = np.lib.stride_tricks.sliding_window_view(text, m)
    return [int(i) + 1 for i in np.nonzero((windows == pattern).all(axis=1))[0]]
