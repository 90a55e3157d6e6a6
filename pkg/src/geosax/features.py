"""Feature constructors mapping raw inputs onto the supported manifolds:
magnitude-weighted flow-direction histograms onto the hypersphere, and
zero-centered landmark matrices onto the Grassmannian.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateProjectionError, ValidationError
from .geometry import ManifoldDescriptor, ManifoldPoint, grassmann_project

_NOISE_FLOOR = 1e-12


def hoof(flow: np.ndarray, bins: int) -> ManifoldPoint:
    """Histogram of oriented flow as a unit vector on S^{bins-1}.

    Each vector (x, y) contributes its magnitude to the bin holding its
    primary angle theta = atan(y/x) in (-pi/2, pi/2]; bin b covers
    [-pi/2 + pi(b-1)/B, -pi/2 + pi b/B).  The angle pi/2 itself (vertical
    flow) is clamped into the last bin.  The histogram is normalized to sum
    to one and re-parameterized by element-wise square root, which puts it on
    the unit hypersphere.
    """
    if bins < 2:
        raise ValidationError("need at least 2 bins")
    v = np.asarray(flow, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 2:
        raise ValidationError(f"flow must be (N, 2) vectors, got shape {v.shape}")
    mags = np.hypot(v[:, 0], v[:, 1])
    keep = mags > _NOISE_FLOOR
    if not np.any(keep):
        raise ValidationError("all flow vectors are zero; histogram is degenerate")
    v = v[keep]
    mags = mags[keep]
    theta = np.arctan2(v[:, 1], v[:, 0])
    # fold to the primary angle: atan2 in (-pi, pi] -> atan(y/x) in (-pi/2, pi/2]
    theta = np.where(theta > np.pi / 2, theta - np.pi, theta)
    theta = np.where(theta < -np.pi / 2, theta + np.pi, theta)
    idx = np.floor((theta + np.pi / 2) * bins / np.pi).astype(int)
    idx = np.clip(idx, 0, bins - 1)
    hist = np.bincount(idx, weights=mags, minlength=bins)
    hist /= hist.sum()
    root = np.sqrt(hist)
    root /= np.linalg.norm(root)
    return ManifoldPoint(ManifoldDescriptor.hypersphere(bins), root)


def landmarks_to_grassmann(landmarks: np.ndarray) -> ManifoldPoint:
    """Affine-invariant shape: the projector onto the column space of the
    zero-centered m x 2 landmark matrix (a Grassmann point with d = 2).

    Right-multiplying the landmarks by any invertible 2 x 2 matrix leaves the
    column space, and hence the output, unchanged.
    """
    L = np.asarray(landmarks, dtype=np.float64)
    if L.ndim != 2 or L.shape[1] != 2 or L.shape[0] <= 2:
        raise ValidationError(f"landmarks must be (m, 2) with m > 2, got {L.shape}")
    L = L - L.mean(axis=0)
    sv = np.linalg.svd(L, compute_uv=False)
    if sv[1] <= 1e-10:
        raise DegenerateProjectionError("landmarks are collinear after centering")
    return grassmann_project(L @ L.T, 2)
