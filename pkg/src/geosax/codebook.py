"""Symbol learning: geodesic K-means, conscience-based equiprobable
competitive learning, the hybrid two-stage scheme, and the distance LUT.

Training is single-threaded and deterministic per seed (the conscience update
is order-dependent by design).  A trained Codebook is immutable and safe to
share across threads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry, stats
from .errors import ValidationError
from .geometry import ManifoldDescriptor, ManifoldPoint

_BASE62 = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"


def alphabet_tokens(k: int) -> list[str]:
    """Printable token per symbol: base-62 characters for k <= 62, else decimals."""
    if k <= len(_BASE62):
        return [_BASE62[i] for i in range(k)]
    return [str(i) for i in range(k)]


def render_symbols(indices, k: int) -> str:
    """Symbol indices as a printable string ('bccdea' style for small alphabets)."""
    tokens = alphabet_tokens(k)
    if k <= len(_BASE62):
        return "".join(tokens[i] for i in indices)
    return " ".join(tokens[i] for i in indices)


@dataclass(frozen=True)
class Codebook:
    """K learned prototypes plus the precomputed K x K geodesic distance LUT."""

    descriptor: ManifoldDescriptor
    prototypes: np.ndarray  # (K, ambient_size)
    lut: np.ndarray  # (K, K)
    id: str
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        protos = np.asarray(self.prototypes, dtype=np.float64)
        if protos.ndim != 2 or protos.shape[0] < 2:
            raise ValidationError("codebook needs at least 2 symbols")
        if protos.shape[1] != self.descriptor.ambient_size:
            raise ValidationError("prototype layout does not match the descriptor")
        lut = np.asarray(self.lut, dtype=np.float64)
        if lut.shape != (protos.shape[0], protos.shape[0]):
            raise ValidationError("LUT shape does not match the symbol count")
        if protos.flags.writeable:
            protos = protos.copy()
            protos.flags.writeable = False
        if lut.flags.writeable:
            lut = lut.copy()
            lut.flags.writeable = False
        object.__setattr__(self, "prototypes", protos)
        object.__setattr__(self, "lut", lut)

    @property
    def k(self) -> int:
        return self.prototypes.shape[0]

    @property
    def alphabet(self) -> list[str]:
        return alphabet_tokens(self.k)

    def symbol(self, i: int) -> ManifoldPoint:
        return ManifoldPoint(self.descriptor, self.prototypes[i])

    @property
    def symbols(self) -> list[ManifoldPoint]:
        return [self.symbol(i) for i in range(self.k)]

    def verify(self) -> None:
        """Recheck symbol validity and LUT integrity (used on load)."""
        bad = geometry.validate_array(self.descriptor, self.prototypes)
        if bad is not None:
            raise ValidationError(
                f"codebook symbol {bad[0]}: {bad[1]} (magnitude {bad[2]:.3g})"
            )
        fresh = build_lut((self.descriptor, self.prototypes))
        if not np.allclose(self.lut, fresh, atol=1e-10, rtol=0.0):
            raise ValidationError("codebook LUT disagrees with its symbols")
        if codebook_id(self.descriptor, self.prototypes) != self.id:
            raise ValidationError("codebook id does not match its contents")


def codebook_id(descriptor: ManifoldDescriptor, prototypes: np.ndarray) -> str:
    """Content hash of the symbols; ties encoded sequences to their codebook."""
    h = hashlib.sha256()
    h.update(descriptor.spec().encode())
    h.update(np.ascontiguousarray(prototypes, dtype=np.float64).tobytes())
    return h.hexdigest()[:16]


def build_lut(symbols) -> np.ndarray:
    """K x K matrix of pairwise geodesic distances between symbols."""
    desc, X = stats._as_point_array(symbols)
    k = X.shape[0]
    lut = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            lut[i, j] = lut[j, i] = geometry.arr_distance(desc, X[i], X[j])
    return lut


def make_codebook(descriptor, prototypes, training_meta=None) -> Codebook:
    prototypes = np.asarray(prototypes, dtype=np.float64)
    bad = geometry.validate_array(descriptor, prototypes)
    if bad is not None:
        raise ValidationError(
            f"learned symbol {bad[0]} is off-manifold: {bad[1]} (magnitude {bad[2]:.3g})"
        )
    lut = build_lut((descriptor, prototypes))
    return Codebook(
        descriptor,
        prototypes,
        lut,
        codebook_id(descriptor, prototypes),
        training_meta or {},
    )


def assign(p: ManifoldPoint, cb: Codebook) -> int:
    """Index of the nearest symbol by geodesic distance; ties go to the lowest index."""
    if p.descriptor != cb.descriptor:
        from .errors import IncompatibleManifoldsError

        raise IncompatibleManifoldsError(
            f"point on {p.descriptor.spec()} vs codebook on {cb.descriptor.spec()}"
        )
    d = geometry.distances_to(cb.descriptor, cb.prototypes, p.data)
    return int(np.argmin(d))


def assign_many(X: np.ndarray, cb: Codebook) -> np.ndarray:
    """Nearest-symbol labels for a (N, size) batch of points."""
    d = geometry.pairwise_distances(cb.descriptor, X, cb.prototypes)
    return d.argmin(axis=1)


def entropy(labels, k: int) -> float:
    """Shannon entropy (bits) of the empirical symbol distribution."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        raise ValidationError("entropy of an empty label list is undefined")
    if labels.min() < 0 or labels.max() >= k:
        raise ValidationError(f"labels must lie in [0, {k})")
    counts = np.bincount(labels, minlength=k)
    p = counts[counts > 0] / labels.size
    return float(-(p * np.log2(p)).sum())


# ---------------------------------------------------------------------------
# geodesic K-means


def kmeans_geodesic(
    descriptor: ManifoldDescriptor,
    data,
    k: int,
    max_iters: int = 100,
    seed: int = 0,
    karcher_cfg: stats.KarcherConfig | None = None,
) -> Codebook:
    """Lloyd iterations with geodesic assignment and intrinsic center updates.

    Centers are recomputed with the Karcher mean (extrinsic mean on the
    Grassmannian); empty clusters are re-seeded at the point farthest from its
    assigned center, so the squared-distance objective never increases.
    """
    X = _data_array(descriptor, data)
    n = X.shape[0]
    if n < k:
        raise ValidationError(f"need at least k={k} points, got {n}")
    rng = np.random.default_rng(seed)
    centers = X[rng.choice(n, size=k, replace=False)].copy()
    labels = np.full(n, -1)
    objective: list[float] = []
    iters_run = 0
    for it in range(max_iters):
        iters_run = it + 1
        dist = geometry.pairwise_distances(descriptor, X, centers)
        new_labels = dist.argmin(axis=1)
        point_d = dist[np.arange(n), new_labels]
        objective.append(float((point_d**2).sum()))
        for c in range(k):
            if np.any(new_labels == c):
                continue
            farthest = int(np.argmax(point_d))
            centers[c] = X[farthest]
            new_labels[farthest] = c
            point_d[farthest] = 0.0
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = stats.mean_array(descriptor, X[labels == c], karcher_cfg)
    meta = {
        "method": "kmeans",
        "k": k,
        "seed": seed,
        "iters": iters_run,
        "objective": objective,
        "entropy": entropy(labels, k),
    }
    return make_codebook(descriptor, centers, meta)


# ---------------------------------------------------------------------------
# conscience-based competitive learning


@dataclass(frozen=True)
class ConscienceConfig:
    """Hyperparameters for equiprobable symbol learning.

    ``alpha`` decays linearly to ``alpha_end`` over the passes.  ``conscience``
    (the C factor) is scaled internally by the mean squared pairwise distance
    of the training data, so the bias is significant on manifolds of any
    diameter.  ``biased_win_rate`` selects the pseudocode variant that updates
    win rates with the biased winner; set False for the unbiased-winner one.
    """

    k: int
    alpha: float = 0.05
    alpha_end: float = 0.005
    win_factor: float = 1e-4  # B
    conscience: float = 10.0  # C
    max_passes: int = 50
    seed: int = 0
    biased_win_rate: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must lie in (0, 1)")
        if not 0.0 < self.win_factor < 1.0:
            raise ValidationError("win factor B must lie in (0, 1)")
        if self.conscience < 0.0:
            raise ValidationError("conscience factor C must be >= 0")
        if self.max_passes < 1:
            raise ValidationError("max_passes must be >= 1")


def _mean_sq_distance(descriptor, X, rng) -> float:
    """Mean squared pairwise distance over a seeded subsample (C's scale)."""
    n = X.shape[0]
    take = min(n, 128)
    idx = rng.choice(n, size=take, replace=False)
    sub = X[idx]
    d = geometry.pairwise_distances(descriptor, sub, sub)
    if take < 2:
        return 1.0
    total = float((d**2).sum()) / (take * (take - 1))
    return total if total > 0 else 1.0


def _conscience_prototypes(descriptor, X, cfg: ConscienceConfig, init=None, rng=None):
    """Core of Algorithm-style conscience learning; returns (S, p, entropy curve)."""
    n = X.shape[0]
    k = cfg.k
    if n < k:
        raise ValidationError(f"need at least k={k} points, got {n}")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    c_scale = cfg.conscience * _mean_sq_distance(descriptor, X, rng)
    if init is not None:
        S = np.array(init, dtype=np.float64, copy=True)
        if S.shape != (k, descriptor.ambient_size):
            raise ValidationError("init symbols have the wrong shape")
    else:
        S = X[rng.choice(n, size=k, replace=False)].copy()
    p = np.full(k, 1.0 / k)
    bias = np.zeros(k)
    passes = cfg.max_passes
    entropy_curve = []
    for pass_i in range(passes):
        if passes > 1:
            alpha = cfg.alpha + (cfg.alpha_end - cfg.alpha) * pass_i / (passes - 1)
        else:
            alpha = cfg.alpha
        order = rng.permutation(n)
        for idx in order:
            x = X[idx]
            d2 = geometry.distances_to(descriptor, S, x) ** 2
            winner = int(np.argmin(d2 - bias))
            S[winner] = geometry.arr_exp(
                descriptor, S[winner], alpha * geometry.arr_log(descriptor, S[winner], x)
            )
            tracked = winner if cfg.biased_win_rate else int(np.argmin(d2))
            p *= 1.0 - cfg.win_factor
            p[tracked] += cfg.win_factor
            bias = c_scale * (1.0 / k - p)
        entropy_curve.append(entropy(assign_labels_raw(descriptor, X, S), k))
    return S, p, entropy_curve


def assign_labels_raw(descriptor, X, S) -> np.ndarray:
    return geometry.pairwise_distances(descriptor, X, S).argmin(axis=1)


def conscience_learn(
    descriptor: ManifoldDescriptor,
    data,
    cfg: ConscienceConfig,
    init: np.ndarray | None = None,
) -> Codebook:
    """Equiprobable symbol learning with a conscience bias.

    Each presentation runs a biased competition on squared geodesic distance
    (d^2 - b), moves the winner partially toward the input through the exp/log
    maps, and nudges the tracked win rates; the bias b = C(1/K - p) penalizes
    frequent winners so all symbols end up winning about equally often.
    Presentation order is reshuffled every pass with the seeded generator and
    the win rates persist across passes, so results are bit-reproducible.
    """
    X = _data_array(descriptor, data)
    S, p, curve = _conscience_prototypes(descriptor, X, cfg, init=init)
    labels = assign_labels_raw(descriptor, X, S)
    meta = {
        "method": "conscience",
        "k": cfg.k,
        "alpha": cfg.alpha,
        "alpha_end": cfg.alpha_end,
        "win_factor": cfg.win_factor,
        "conscience": cfg.conscience,
        "max_passes": cfg.max_passes,
        "seed": cfg.seed,
        "biased_win_rate": cfg.biased_win_rate,
        "win_rates": p.tolist(),
        "entropy_per_pass": curve,
        "entropy": entropy(labels, cfg.k),
    }
    return make_codebook(descriptor, S, meta)


def hybrid_learn(
    descriptor: ManifoldDescriptor,
    data,
    stage1_k: int,
    r: int,
    cfg: ConscienceConfig,
    kmeans_iters: int = 100,
) -> Codebook:
    """Two-stage codebook: coarse K-means, then equiprobable sub-clusters.

    Stage-1 clusters get ceil((p_i / p_s) * r) sub-clusters each, where p_s is
    the smallest stage-1 cluster probability, so the final symbol count adapts
    to the data's skew.  The final codebook is the union of all sub-cluster
    symbols with a fresh LUT.
    """
    X = _data_array(descriptor, data)
    stage1 = kmeans_geodesic(descriptor, X, stage1_k, max_iters=kmeans_iters, seed=cfg.seed)
    labels = assign_many(X, stage1)
    counts = np.bincount(labels, minlength=stage1_k)
    if np.any(counts == 0):
        raise ValidationError("a stage-1 cluster is empty; use fewer stage-1 clusters")
    probs = counts / counts.sum()
    p_s = probs.min()
    sub_counts = np.ceil(probs / p_s * r).astype(int)
    children = np.random.SeedSequence(cfg.seed).spawn(stage1_k)
    pieces = []
    for i in range(stage1_k):
        cluster = X[labels == i]
        if cluster.shape[0] < sub_counts[i]:
            raise ValidationError(
                f"stage-1 cluster {i} has {cluster.shape[0]} points, "
                f"cannot split into {sub_counts[i]} sub-clusters"
            )
        sub_cfg = replace(cfg, k=int(sub_counts[i]))
        S, _, _ = _conscience_prototypes(
            descriptor, cluster, sub_cfg, rng=np.random.default_rng(children[i])
        )
        pieces.append(S)
    final = np.vstack(pieces)
    final_labels = assign_labels_raw(descriptor, X, final)
    meta = {
        "method": "hybrid",
        "stage1_k": stage1_k,
        "r": r,
        "k": int(final.shape[0]),
        "stage1_probs": probs.tolist(),
        "sub_counts": sub_counts.tolist(),
        "seed": cfg.seed,
        "alpha": cfg.alpha,
        "win_factor": cfg.win_factor,
        "conscience": cfg.conscience,
        "max_passes": cfg.max_passes,
        "entropy": entropy(final_labels, int(final.shape[0])),
    }
    return make_codebook(descriptor, final, meta)


def _data_array(descriptor: ManifoldDescriptor, data) -> np.ndarray:
    """Training data as a (N, size) array; accepts arrays or point lists."""
    if isinstance(data, np.ndarray):
        X = np.asarray(data, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != descriptor.ambient_size:
            raise ValidationError(f"data must be (N, {descriptor.ambient_size})")
        return X
    desc, X = stats._as_point_array(data)
    if desc != descriptor:
        from .errors import IncompatibleManifoldsError

        raise IncompatibleManifoldsError("data points live on a different manifold")
    return X
