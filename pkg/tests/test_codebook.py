import math

import numpy as np
import pytest

from geosax import geometry, storage
from geosax.codebook import (
    Codebook,
    ConscienceConfig,
    alphabet_tokens,
    assign,
    assign_many,
    build_lut,
    conscience_learn,
    entropy,
    hybrid_learn,
    kmeans_geodesic,
    make_codebook,
    render_symbols,
)
from geosax.errors import IncompatibleManifoldsError, ValidationError
from geosax.geometry import ManifoldDescriptor, ManifoldPoint, random_point
from geosax.stats import karcher_mean_array


def cap(desc, center, radius, n, rng):
    out = np.empty((n, desc.ambient_size))
    for i in range(n):
        out[i] = geometry.arr_exp(
            desc, center, geometry.random_tangent(desc, center, radius / 2, rng)
        )
    return out


# ---------------------------------------------------------------------------
# entropy


def test_entropy_uniform_ten_symbols():
    labels = np.repeat(np.arange(10), 100)
    assert entropy(labels, 10) == pytest.approx(math.log2(10), abs=1e-12)


def test_entropy_constant_labels():
    assert entropy([3] * 50, 10) == 0.0


def test_entropy_even_split():
    assert entropy([0] * 10 + [1] * 10, 8) == pytest.approx(1.0, abs=1e-12)


def test_entropy_range_errors():
    with pytest.raises(ValidationError):
        entropy([], 4)
    with pytest.raises(ValidationError):
        entropy([4], 4)


# ---------------------------------------------------------------------------
# LUT and assignment


def test_build_lut_single_symbol():
    desc = ManifoldDescriptor.hypersphere(3)
    lut = build_lut([random_point(desc, 0)])
    np.testing.assert_array_equal(lut, [[0.0]])


def test_build_lut_orthogonal_units():
    desc = ManifoldDescriptor.hypersphere(3)
    syms = [ManifoldPoint(desc, v) for v in np.eye(3)]
    lut = build_lut(syms)
    expected = np.full((3, 3), np.pi / 2)
    np.fill_diagonal(expected, 0.0)
    np.testing.assert_allclose(lut, expected, atol=1e-12)


def test_build_lut_matches_fresh_distances_grassmann():
    desc = ManifoldDescriptor.grassmann(4, 2)
    rng = np.random.default_rng(5)
    syms = [random_point(desc, rng) for _ in range(5)]
    lut = build_lut(syms)
    for i in range(5):
        for j in range(5):
            assert lut[i, j] == pytest.approx(
                geometry.distance(syms[i], syms[j]), abs=1e-10
            )
    assert np.array_equal(lut, lut.T)
    assert np.all(np.diag(lut) == 0.0)


def _toy_codebook(desc, k, seed=0):
    protos = geometry.random_points(desc, k, np.random.default_rng(seed))
    return make_codebook(desc, protos)


def test_assign_exact_symbol():
    desc = ManifoldDescriptor.hypersphere(5)
    cb = _toy_codebook(desc, 6)
    assert assign(cb.symbol(3), cb) == 3


def test_assign_tie_breaks_low_index():
    desc = ManifoldDescriptor.hypersphere(3)
    protos = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
    cb = make_codebook(desc, protos)
    p = ManifoldPoint(desc, [1.0, 0.0, 0.0])  # equidistant from all three
    assert assign(p, cb) == 0


def test_assign_matches_brute_force_scan():
    desc = ManifoldDescriptor.hypersphere(6)
    cb = _toy_codebook(desc, 12)
    rng = np.random.default_rng(9)
    for _ in range(1000):
        p = random_point(desc, rng)
        scan = min(
            range(cb.k), key=lambda i: (geometry.distance(p, cb.symbol(i)), i)
        )
        assert assign(p, cb) == scan


def test_assign_descriptor_mismatch():
    cb = _toy_codebook(ManifoldDescriptor.hypersphere(5), 4)
    with pytest.raises(IncompatibleManifoldsError):
        assign(random_point(ManifoldDescriptor.hypersphere(6), 0), cb)


def test_codebook_requires_two_symbols():
    desc = ManifoldDescriptor.hypersphere(3)
    with pytest.raises(ValidationError):
        make_codebook(desc, geometry.random_points(desc, 1, np.random.default_rng(0)))


def test_alphabet_rendering():
    assert alphabet_tokens(4) == ["a", "b", "c", "d"]
    assert render_symbols([1, 2, 2, 3, 4, 0], 26) == "bccdea"
    assert render_symbols([0, 63], 64) == "0 63"


# ---------------------------------------------------------------------------
# geodesic K-means


def test_kmeans_exact_cover():
    desc = ManifoldDescriptor.hypersphere(4)
    X = geometry.random_points(desc, 5, np.random.default_rng(3))
    cb = kmeans_geodesic(desc, X, 5, seed=1)
    # centers must be the data points themselves (objective 0 up to the
    # arccos floor of ~1.5e-8 for coincident unit vectors)
    d = geometry.pairwise_distances(desc, X, cb.prototypes)
    assert d.min(axis=1).max() < 1e-7
    assert cb.training_meta["objective"][-1] < 1e-12


def test_kmeans_two_caps_recovers_cap_means():
    desc = ManifoldDescriptor.hypersphere(3)
    rng = np.random.default_rng(0)
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    cap1 = cap(desc, e1, 0.3, 100, rng)
    cap2 = cap(desc, e2, 0.3, 100, rng)
    X = np.vstack([cap1, cap2])
    cb = kmeans_geodesic(desc, X, 2, seed=0)
    mean1 = karcher_mean_array(desc, cap1)[0]
    mean2 = karcher_mean_array(desc, cap2)[0]
    got = cb.prototypes
    # match centers to caps by proximity
    order = [int(np.argmin(geometry.distances_to(desc, got, mean1)))]
    order.append(1 - order[0])
    assert geometry.arr_distance(desc, got[order[0]], mean1) < 0.1
    assert geometry.arr_distance(desc, got[order[1]], mean2) < 0.1


def test_kmeans_objective_monotone_non_increasing():
    desc = ManifoldDescriptor.hypersphere(5)
    X = geometry.random_points(desc, 200, np.random.default_rng(8))
    cb = kmeans_geodesic(desc, X, 6, seed=2)
    obj = cb.training_meta["objective"]
    assert all(obj[i + 1] <= obj[i] + 1e-9 for i in range(len(obj) - 1))


def test_kmeans_needs_enough_points():
    desc = ManifoldDescriptor.hypersphere(3)
    X = geometry.random_points(desc, 3, np.random.default_rng(0))
    with pytest.raises(ValidationError):
        kmeans_geodesic(desc, X, 4)


# ---------------------------------------------------------------------------
# conscience learning


def test_conscience_uniform_sphere_win_rates_balanced():
    # count nearest-symbol assignments after training on uniform S^2 data
    desc = ManifoldDescriptor.hypersphere(3)
    X = geometry.random_points(desc, 1000, np.random.default_rng(0))
    cb = conscience_learn(desc, X, ConscienceConfig(k=2, seed=0))
    labels = assign_many(X, cb)
    share = np.bincount(labels, minlength=2) / len(labels)
    assert 0.45 <= share[0] <= 0.55


def test_conscience_win_rates_sum_to_one():
    desc = ManifoldDescriptor.hypersphere(4)
    X = geometry.random_points(desc, 300, np.random.default_rng(1))
    cb = conscience_learn(desc, X, ConscienceConfig(k=5, seed=3, max_passes=10))
    p = np.array(cb.training_meta["win_rates"])
    assert abs(p.sum() - 1.0) < 1e-9
    assert np.all(p >= 0)


def test_conscience_bit_reproducible():
    desc = ManifoldDescriptor.hypersphere(4)
    X = geometry.random_points(desc, 200, np.random.default_rng(2))
    cfg = ConscienceConfig(k=4, seed=11, max_passes=5)
    cb1 = conscience_learn(desc, X, cfg)
    cb2 = conscience_learn(desc, X, cfg)
    assert np.array_equal(cb1.prototypes, cb2.prototypes)
    assert cb1.id == cb2.id


def test_conscience_zero_bias_reduces_to_plain_competitive_learning():
    # C = 0 keeps the bias identically zero: the winner rule must equal the
    # pure nearest-symbol competition presentation by presentation
    desc = ManifoldDescriptor.euclidean(3)
    rng = np.random.default_rng(4)
    X = rng.standard_normal((150, 3))
    cfg = ConscienceConfig(k=3, seed=5, max_passes=3, conscience=0.0, win_factor=1e-9)
    cb = conscience_learn(desc, X, cfg)

    # mirror implementation with an unbiased winner and the same seeded stream
    rng2 = np.random.default_rng(5)
    take = min(len(X), 128)
    rng2.choice(len(X), size=take, replace=False)  # C-scale sample draw
    S = X[rng2.choice(len(X), size=3, replace=False)].copy()
    for pass_i in range(3):
        alpha = 0.05 + (0.005 - 0.05) * pass_i / 2
        for idx in rng2.permutation(len(X)):
            x = X[idx]
            w = int(np.argmin(((S - x) ** 2).sum(axis=1)))
            S[w] = S[w] + alpha * (x - S[w])
    np.testing.assert_allclose(cb.prototypes, S, atol=1e-12)


def test_conscience_euclidean_update_matches_vector_space_form():
    desc = ManifoldDescriptor.euclidean(2)
    rng = np.random.default_rng(6)
    X = rng.standard_normal((100, 2)) * 2.0
    cfg = ConscienceConfig(k=4, seed=7, max_passes=4)
    cb = conscience_learn(desc, X, cfg)

    rng2 = np.random.default_rng(7)
    take = min(len(X), 128)
    sub = X[rng2.choice(len(X), size=take, replace=False)]
    d = np.linalg.norm(sub[:, None, :] - sub[None, :, :], axis=2)
    c_scale = cfg.conscience * float((d**2).sum()) / (take * (take - 1))
    S = X[rng2.choice(len(X), size=4, replace=False)].copy()
    p = np.full(4, 0.25)
    bias = np.zeros(4)
    for pass_i in range(4):
        alpha = cfg.alpha + (cfg.alpha_end - cfg.alpha) * pass_i / 3
        for idx in rng2.permutation(len(X)):
            x = X[idx]
            d2 = ((S - x) ** 2).sum(axis=1)
            z = int(np.argmin(d2 - bias))
            S[z] = S[z] + alpha * (x - S[z])
            p *= 1.0 - cfg.win_factor
            p[z] += cfg.win_factor
            bias = c_scale * (0.25 - p)
    np.testing.assert_allclose(cb.prototypes, S, atol=1e-12)


def test_conscience_beats_kmeans_entropy_on_skewed_mixture():
    desc = ManifoldDescriptor.hypersphere(8)
    ds = storage.gen_synthetic(
        desc, storage.ClustersScenario(n_points=2000), seed=1
    )
    X = ds.all_points()
    km = kmeans_geodesic(desc, X, 10, seed=1)
    cl = conscience_learn(desc, X, ConscienceConfig(k=10, seed=1, max_passes=25))
    assert cl.training_meta["entropy"] > km.training_meta["entropy"]


def test_conscience_needs_enough_points():
    desc = ManifoldDescriptor.hypersphere(3)
    X = geometry.random_points(desc, 2, np.random.default_rng(0))
    with pytest.raises(ValidationError):
        conscience_learn(desc, X, ConscienceConfig(k=3))


def test_conscience_config_validation():
    with pytest.raises(ValidationError):
        ConscienceConfig(k=3, win_factor=1.0)
    with pytest.raises(ValidationError):
        ConscienceConfig(k=3, alpha=0.0)
    with pytest.raises(ValidationError):
        ConscienceConfig(k=3, conscience=-1.0)


def test_conscience_symbols_stay_on_manifold():
    desc = ManifoldDescriptor.grassmann(4, 2)
    X = geometry.random_points(desc, 120, np.random.default_rng(3))
    cb = conscience_learn(desc, X, ConscienceConfig(k=4, seed=0, max_passes=5))
    assert geometry.validate_array(desc, cb.prototypes) is None


# ---------------------------------------------------------------------------
# hybrid two-stage scheme


def test_hybrid_sub_cluster_arithmetic():
    # three euclidean blobs with mass 0.5 / 0.3 / 0.2 -> splits (3, 2, 1)
    rng = np.random.default_rng(0)
    centers = np.array([[0.0, 0.0], [30.0, 0.0], [0.0, 30.0]])
    sizes = (500, 300, 200)
    X = np.vstack(
        [c + 0.5 * rng.standard_normal((n, 2)) for c, n in zip(centers, sizes)]
    )
    desc = ManifoldDescriptor.euclidean(2)
    cfg = ConscienceConfig(k=2, seed=0, max_passes=5)
    cb = hybrid_learn(desc, X, stage1_k=3, r=1, cfg=cfg)
    assert sorted(cb.training_meta["sub_counts"]) == [1, 2, 3]
    assert cb.k == 6


def test_hybrid_equiprobable_clusters_r1_keeps_stage1_size():
    rng = np.random.default_rng(1)
    centers = np.array([[0.0, 0.0], [30.0, 0.0], [0.0, 30.0]])
    X = np.vstack([c + 0.5 * rng.standard_normal((200, 2)) for c in centers])
    desc = ManifoldDescriptor.euclidean(2)
    cfg = ConscienceConfig(k=2, seed=1, max_passes=5)
    cb = hybrid_learn(desc, X, stage1_k=3, r=1, cfg=cfg)
    assert cb.training_meta["sub_counts"] == [1, 1, 1]
    assert cb.k == 3


def test_hybrid_operating_point_on_skewed_mixture():
    # K derived from the stage-1 probabilities lands in the 40-50 band
    desc = ManifoldDescriptor.hypersphere(8)
    sc = storage.ClustersScenario(
        n_points=3000, n_clusters=5, spread=0.25, skew=(0.35, 0.28, 0.18, 0.12, 0.07)
    )
    ds = storage.gen_synthetic(desc, sc, seed=0)
    cfg = ConscienceConfig(k=2, seed=0, max_passes=8)
    cb = hybrid_learn(desc, ds.all_points(), stage1_k=5, r=3, cfg=cfg)
    probs = cb.training_meta["stage1_probs"]
    expected_k = sum(math.ceil(p / min(probs) * 3) for p in probs)
    assert cb.k == expected_k
    assert 40 <= cb.k <= 50


def test_codebook_verify_detects_tampering():
    desc = ManifoldDescriptor.hypersphere(4)
    cb = _toy_codebook(desc, 4)
    bad_lut = cb.lut.copy()
    bad_lut[0, 1] = bad_lut[1, 0] = 99.0
    tampered = Codebook(desc, cb.prototypes, bad_lut, cb.id, {})
    with pytest.raises(ValidationError):
        tampered.verify()
