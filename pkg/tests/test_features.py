import numpy as np
import pytest

from geosax.errors import DegenerateProjectionError, ValidationError
from geosax.features import hoof, landmarks_to_grassmann
from geosax.geometry import validate_point


def test_hoof_single_horizontal_vector():
    # theta = 0 lands in bin 3 of 4: [-pi/2 + pi/2, -pi/2 + 3pi/4)
    out = hoof(np.array([[1.0, 0.0]]), bins=4)
    np.testing.assert_allclose(out.data, [0.0, 0.0, 1.0, 0.0], atol=1e-15)


def test_hoof_left_right_fold():
    # the primary angle of (-1, 0) equals that of (1, 0)
    right = hoof(np.array([[1.0, 0.0]]), bins=4)
    both = hoof(np.array([[1.0, 0.0], [-1.0, 0.0]]), bins=4)
    np.testing.assert_allclose(both.data, right.data, atol=1e-15)


def test_hoof_uniform_bin_centers():
    bins = 8
    centers = -np.pi / 2 + np.pi * (np.arange(bins) + 0.5) / bins
    flow = np.stack([np.cos(centers), np.sin(centers)], axis=1)
    out = hoof(flow, bins=bins)
    np.testing.assert_allclose(out.data, np.full(bins, 1 / np.sqrt(bins)), atol=1e-12)


def test_hoof_histogram_mass_and_norm():
    rng = np.random.default_rng(0)
    flow = rng.standard_normal((200, 2))
    out = hoof(flow, bins=10)
    assert validate_point(out).ok
    assert np.sum(out.data**2) == pytest.approx(1.0, abs=1e-12)


def test_hoof_scale_invariant():
    rng = np.random.default_rng(1)
    flow = rng.standard_normal((50, 2))
    a = hoof(flow, bins=6)
    b = hoof(7.3 * flow, bins=6)
    np.testing.assert_allclose(a.data, b.data, atol=1e-12)


def test_hoof_vertical_flow_clamps_to_last_bin():
    up = hoof(np.array([[0.0, 1.0]]), bins=4)
    assert up.data[3] == 1.0
    down = hoof(np.array([[0.0, -1.0]]), bins=4)
    assert down.data[0] == 1.0  # theta = -pi/2 is the closed lower boundary


def test_hoof_rejects_zero_flow():
    with pytest.raises(ValidationError):
        hoof(np.zeros((5, 2)), bins=4)
    with pytest.raises(ValidationError):
        hoof(np.array([[1.0, 0.0]]), bins=1)


def test_hoof_skips_noise_floor_vectors():
    big = np.array([[1.0, 0.0]])
    with_noise = np.vstack([big, 1e-15 * np.ones((3, 2))])
    np.testing.assert_allclose(
        hoof(with_noise, bins=4).data, hoof(big, bins=4).data, atol=1e-15
    )


# ---------------------------------------------------------------------------
# landmarks


def test_landmarks_affine_invariance():
    rng = np.random.default_rng(2)
    L = rng.standard_normal((12, 2))
    for _ in range(10):
        A = rng.standard_normal((2, 2))
        while abs(np.linalg.det(A)) < 0.1:
            A = rng.standard_normal((2, 2))
        p = landmarks_to_grassmann(L)
        q = landmarks_to_grassmann(L @ A.T)
        assert np.max(np.abs(p.data - q.data)) < 1e-9


def test_landmarks_orthonormal_columns():
    # zero-centered orthonormal columns: P = L L^T exactly
    L = np.zeros((4, 2))
    L[0, 0] = 1 / np.sqrt(2)
    L[1, 0] = -1 / np.sqrt(2)
    L[2, 1] = 1 / np.sqrt(2)
    L[3, 1] = -1 / np.sqrt(2)
    out = landmarks_to_grassmann(L)
    np.testing.assert_allclose(out.as_matrix(), L @ L.T, atol=1e-12)


def test_landmarks_collinear_rejected():
    t = np.linspace(-1, 1, 9)
    L = np.stack([t, 2 * t], axis=1)  # all points on one line
    with pytest.raises(DegenerateProjectionError):
        landmarks_to_grassmann(L)


def test_landmarks_output_is_valid_grassmann_point():
    rng = np.random.default_rng(3)
    for _ in range(25):
        L = rng.standard_normal((10, 2))
        assert validate_point(landmarks_to_grassmann(L)).ok
