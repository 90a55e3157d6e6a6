"""Means on manifolds and piece-wise aggregate approximation of sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import geometry
from .errors import DegenerateMeanError, IncompatibleManifoldsError, ValidationError
from .geometry import GRASSMANN, ManifoldDescriptor, ManifoldPoint


@dataclass(frozen=True)
class ManifoldSequence:
    """An ordered, timestamped activity: N points on one manifold.

    ``points`` is the (N, ambient_size) stack of flat point arrays; rows are
    immutable once constructed.
    """

    descriptor: ManifoldDescriptor
    points: np.ndarray
    id: str = ""
    label: str | None = None

    def __post_init__(self):
        arr = np.asarray(self.points, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[1] != self.descriptor.ambient_size:
            raise ValidationError(
                f"sequence points must be (N, {self.descriptor.ambient_size}), "
                f"got {arr.shape}"
            )
        if arr.shape[0] < 1:
            raise ValidationError("sequence must contain at least one point")
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        object.__setattr__(self, "points", arr)

    @classmethod
    def from_points(cls, points: Sequence[ManifoldPoint], id: str = "", label=None):
        if not points:
            raise ValidationError("sequence must contain at least one point")
        desc = points[0].descriptor
        for p in points[1:]:
            if p.descriptor != desc:
                raise IncompatibleManifoldsError("sequence points mix manifolds")
        return cls(desc, np.stack([p.data for p in points]), id=id, label=label)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __getitem__(self, i: int) -> ManifoldPoint:
        return ManifoldPoint(self.descriptor, self.points[i])

    def validate(self) -> None:
        """Raise if any point violates its manifold invariants."""
        bad = geometry.validate_array(self.descriptor, self.points)
        if bad is not None:
            raise ValidationError(
                f"sequence {self.id!r} point {bad[0]}: {bad[1]} (magnitude {bad[2]:.3g})"
            )


@dataclass(frozen=True)
class KarcherConfig:
    """Fixed-point iteration controls; ``tol`` bounds the mean-gradient norm."""

    max_iters: int = 100
    tol: float = 1e-8
    step: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValidationError("tol must be positive")
        if not 0.0 < self.step <= 1.0:
            raise ValidationError("step must lie in (0, 1]")


class MeanResult(NamedTuple):
    point: ManifoldPoint
    converged: bool
    n_iters: int


def _canonical_order(X: np.ndarray) -> np.ndarray:
    """Rows sorted lexicographically; makes the iteration order-independent."""
    return X[np.lexsort(X.T[::-1])]


def karcher_mean_array(
    descriptor: ManifoldDescriptor, X: np.ndarray, cfg: KarcherConfig | None = None
):
    """Fréchet mean of the rows of X; returns (mean_row, converged, n_iters).

    Standard fixed-point scheme: mu <- exp_mu(step * mean_i log_mu x_i),
    initialized at the first point under a canonical input ordering so the
    result is bit-identical for any permutation of the rows.  Grassmann input
    dispatches to the closed-form extrinsic mean.
    """
    if X.shape[0] == 0:
        raise ValidationError("cannot average an empty point set")
    cfg = cfg or KarcherConfig()
    if descriptor.kind == GRASSMANN:
        return extrinsic_mean_array(descriptor, X), True, 0
    X = _canonical_order(X)
    mu = X[0]
    n = X.shape[0]
    for it in range(cfg.max_iters):
        logs = geometry.logs_at(descriptor, mu, X)
        grad = logs.sum(axis=0) / n
        if geometry.tangent_norm(descriptor, grad) <= cfg.tol:
            return mu, True, it
        mu = geometry.arr_exp(descriptor, mu, cfg.step * grad)
    logs = geometry.logs_at(descriptor, mu, X)
    grad = logs.sum(axis=0) / n
    converged = geometry.tangent_norm(descriptor, grad) <= cfg.tol
    return mu, converged, cfg.max_iters


def karcher_mean(points, cfg: KarcherConfig | None = None) -> MeanResult:
    """Fréchet/Karcher mean of a list of ManifoldPoints.

    Non-convergence within the iteration budget is flagged, not raised:
    downstream encoding tolerates slightly off window means.
    """
    desc, X = _as_point_array(points)
    mu, converged, iters = karcher_mean_array(desc, X, cfg)
    return MeanResult(ManifoldPoint(desc, mu), converged, iters)


def extrinsic_mean_array(descriptor: ManifoldDescriptor, X: np.ndarray) -> np.ndarray:
    """Grassmann extrinsic mean: project the Euclidean average of projectors."""
    if descriptor.kind != GRASSMANN:
        raise IncompatibleManifoldsError("extrinsic mean is defined for Grassmann points")
    if X.shape[0] == 0:
        raise ValidationError("cannot average an empty point set")
    m, d = descriptor.dims
    avg = X.mean(axis=0).reshape(m, m)
    S = np.linalg.svd(avg, compute_uv=False)
    sigma_next = S[d] if d < m else 0.0
    if S[d - 1] - sigma_next <= 1e-10 or S[d - 1] <= 1e-10:
        raise DegenerateMeanError(
            f"average projector has no rank-{d} gap "
            f"(sigma_{d}={S[d - 1]:.3g}, sigma_{d + 1}={sigma_next:.3g})"
        )
    geometry._count()
    return geometry._ops(descriptor).project(avg).reshape(-1)


def extrinsic_mean(points) -> ManifoldPoint:
    desc, X = _as_point_array(points)
    return ManifoldPoint(desc, extrinsic_mean_array(desc, X))


def mean_array(descriptor: ManifoldDescriptor, X: np.ndarray, cfg=None) -> np.ndarray:
    """Window-mean used throughout: extrinsic on Grassmann, Karcher elsewhere."""
    if descriptor.kind == GRASSMANN:
        return extrinsic_mean_array(descriptor, X)
    return karcher_mean_array(descriptor, X, cfg)[0]


def paa(seq: ManifoldSequence, window: int, cfg: KarcherConfig | None = None) -> ManifoldSequence:
    """Piece-wise aggregate approximation with non-overlapping windows.

    Window m (1-based) covers frames [(m-1)*W + 1, min(m*W, N)]; the last
    window may be short.  Output length is ceil(N / W).
    """
    if window < 1:
        raise ValidationError(f"window length must be >= 1, got {window}")
    if window == 1:
        return seq
    n = len(seq)
    m_out = math.ceil(n / window)
    out = np.empty((m_out, seq.descriptor.ambient_size))
    for m in range(m_out):
        chunk = seq.points[m * window : min((m + 1) * window, n)]
        out[m] = mean_array(seq.descriptor, chunk, cfg)
    return ManifoldSequence(seq.descriptor, out, id=seq.id, label=seq.label)


def _as_point_array(points):
    """Accept a list of ManifoldPoints or (descriptor, array); return both."""
    if isinstance(points, tuple) and len(points) == 2:
        desc, X = points
        return desc, np.asarray(X, dtype=np.float64)
    seq = list(points)
    if not seq:
        raise ValidationError("cannot average an empty point set")
    desc = seq[0].descriptor
    for p in seq[1:]:
        if p.descriptor != desc:
            raise IncompatibleManifoldsError("points mix manifolds")
    return desc, np.stack([p.data for p in seq])
