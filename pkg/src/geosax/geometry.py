"""Manifold descriptors and geometric primitives.

Supported spaces and their point layouts (all points are flat float64 arrays):

* ``euclidean`` -- R^n, n values.
* ``hypersphere`` -- unit sphere S^{B-1} in R^B, B values with unit L2 norm.
* ``grassmann`` -- d-dimensional subspaces of R^m, represented by the m x m
  rank-d orthogonal projection matrix, stored row-major (m*m values).
* ``product_se3`` -- J-fold product of SE(3); J homogeneous 4x4 rigid
  transforms stored row-major (J*16 values).

Distances are geodesic for the sphere and SE(3) product (left-invariant,
through the matrix logarithm) and the projection-Frobenius metric for the
Grassmannian, whose exp/log are extrinsic surrogates: move linearly in the
embedding space, then re-project to the nearest rank-d projector.

Every operation is a pure function over immutable values, so everything here
is safe for unrestricted concurrent use.  A module-level counter tallies how
many elementary geodesic/exp/log evaluations have run; symbolic matching is
expected to keep it at zero once training is done.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DegenerateProjectionError,
    IncompatibleManifoldsError,
    InjectivityRadiusError,
    ValidationError,
)

EUCLIDEAN = "euclidean"
HYPERSPHERE = "hypersphere"
GRASSMANN = "grassmann"
PRODUCT_SE3 = "product_se3"

_KINDS = (EUCLIDEAN, HYPERSPHERE, GRASSMANN, PRODUCT_SE3)

# Aliases accepted when parsing descriptor spec strings such as "se3:19".
_SPEC_ALIASES = {
    "euclidean": EUCLIDEAN,
    "hypersphere": HYPERSPHERE,
    "sphere": HYPERSPHERE,
    "grassmann": GRASSMANN,
    "product_se3": PRODUCT_SE3,
    "se3": PRODUCT_SE3,
}

# ---------------------------------------------------------------------------
# instrumentation

_GEOMETRY_CALLS = 0


def _count(n: int = 1) -> None:
    global _GEOMETRY_CALLS
    _GEOMETRY_CALLS += n


def geometry_call_count() -> int:
    """Number of elementary geometry evaluations since the last reset."""
    return _GEOMETRY_CALLS


def reset_geometry_calls() -> None:
    global _GEOMETRY_CALLS
    _GEOMETRY_CALLS = 0


# ---------------------------------------------------------------------------
# descriptors and value types


@dataclass(frozen=True)
class ManifoldDescriptor:
    """Identifies a manifold by kind plus its shape parameters.

    ``dims`` is kind-specific: (n,) for Euclidean, ambient (B,) for the
    hypersphere S^{B-1}, (m, d) for the Grassmannian, (J,) for SE(3)^J.
    """

    kind: str
    dims: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown manifold kind {self.kind!r}")
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if any(d <= 0 for d in dims):
            raise ValidationError(f"shape parameters must be positive, got {dims}")
        expected = {EUCLIDEAN: 1, HYPERSPHERE: 1, GRASSMANN: 2, PRODUCT_SE3: 1}[self.kind]
        if len(dims) != expected:
            raise ValidationError(
                f"{self.kind} takes {expected} shape parameter(s), got {dims}"
            )
        if self.kind == GRASSMANN and dims[1] >= dims[0]:
            raise ValidationError(f"grassmann requires d < m, got m={dims[0]}, d={dims[1]}")

    @staticmethod
    def euclidean(n: int) -> "ManifoldDescriptor":
        return ManifoldDescriptor(EUCLIDEAN, (n,))

    @staticmethod
    def hypersphere(ambient_dim: int) -> "ManifoldDescriptor":
        return ManifoldDescriptor(HYPERSPHERE, (ambient_dim,))

    @staticmethod
    def grassmann(m: int, d: int) -> "ManifoldDescriptor":
        return ManifoldDescriptor(GRASSMANN, (m, d))

    @staticmethod
    def product_se3(n_factors: int) -> "ManifoldDescriptor":
        return ManifoldDescriptor(PRODUCT_SE3, (n_factors,))

    @property
    def ambient_size(self) -> int:
        """Length of the flat array holding one point."""
        if self.kind == GRASSMANN:
            return self.dims[0] * self.dims[0]
        if self.kind == PRODUCT_SE3:
            return self.dims[0] * 16
        return self.dims[0]

    def spec(self) -> str:
        """Compact string form, e.g. ``hypersphere:8`` or ``grassmann:10,2``."""
        return f"{self.kind}:{','.join(str(d) for d in self.dims)}"

    @staticmethod
    def from_spec(spec: str) -> "ManifoldDescriptor":
        try:
            kind_token, dim_token = spec.split(":", 1)
            kind = _SPEC_ALIASES[kind_token.strip().lower()]
            dims = tuple(int(t) for t in dim_token.split(","))
        except (ValueError, KeyError) as exc:
            raise ValidationError(f"cannot parse manifold spec {spec!r}") from exc
        return ManifoldDescriptor(kind, dims)


def _freeze(arr) -> np.ndarray:
    out = np.asarray(arr, dtype=np.float64).reshape(-1)
    if out.flags.writeable:
        out = out.copy()
        out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ManifoldPoint:
    """A point on a manifold: descriptor plus flat array in the kind's layout."""

    descriptor: ManifoldDescriptor
    data: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.data)
        if arr.size != self.descriptor.ambient_size:
            raise ValidationError(
                f"point has {arr.size} values, {self.descriptor.spec()} "
                f"needs {self.descriptor.ambient_size}"
            )
        object.__setattr__(self, "data", arr)

    def as_matrix(self) -> np.ndarray:
        """Grassmann point as its (m, m) projection matrix."""
        m = self.descriptor.dims[0]
        return self.data.reshape(m, m)

    def frames(self) -> np.ndarray:
        """SE(3)^J point as a (J, 4, 4) stack of rigid transforms."""
        return self.data.reshape(self.descriptor.dims[0], 4, 4)


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector at ``base``, stored in the ambient layout of its kind.

    For ``product_se3`` the data holds J Lie-algebra matrices (skew upper-left
    block, zero bottom row); its norm is the per-factor vec(B) 6-vector norm.
    """

    descriptor: ManifoldDescriptor
    base: ManifoldPoint
    data: np.ndarray

    def __post_init__(self):
        if self.base.descriptor != self.descriptor:
            raise IncompatibleManifoldsError("tangent base lives on a different manifold")
        arr = _freeze(self.data)
        if arr.size != self.descriptor.ambient_size:
            raise ValidationError("tangent data does not match the ambient layout")
        object.__setattr__(self, "data", arr)

    def norm(self) -> float:
        return tangent_norm(self.descriptor, self.data)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a point check: the first violated invariant, if any."""

    ok: bool
    violation: str | None = None
    magnitude: float | None = None

    def message(self) -> str:
        if self.ok:
            return "ok"
        return f"{self.violation} (magnitude {self.magnitude:.6g})"


# ---------------------------------------------------------------------------
# SE(3) kernels (batched over leading axes)

_EYE3 = np.eye(3)


def _skew(u):
    """(..., 3) rotation vectors to (..., 3, 3) skew matrices."""
    out = np.zeros(u.shape[:-1] + (3, 3))
    out[..., 0, 1] = -u[..., 2]
    out[..., 0, 2] = u[..., 1]
    out[..., 1, 0] = u[..., 2]
    out[..., 1, 2] = -u[..., 0]
    out[..., 2, 0] = -u[..., 1]
    out[..., 2, 1] = u[..., 0]
    return out


def _vee(U):
    return np.stack([U[..., 2, 1], U[..., 0, 2], U[..., 1, 0]], axis=-1)


def _rot_coeffs(theta):
    """Rodrigues/V-matrix coefficients with series fallbacks near zero.

    a = sin t / t,  b = (1 - cos t) / t^2,  c = (t - sin t) / t^3.
    """
    t2 = theta * theta
    small = theta < 1e-4
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(theta) / theta)
        b = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0,
                     (1.0 - np.cos(theta)) / t2)
        c = np.where(small, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
                     (theta - np.sin(theta)) / (t2 * theta))
    return a, b, c


def _so3_exp(u):
    """(..., 3) rotation vectors to rotation matrices via Rodrigues."""
    theta = np.linalg.norm(u, axis=-1)
    a, b, _ = _rot_coeffs(theta)
    U = _skew(u)
    U2 = U @ U
    return _EYE3 + a[..., None, None] * U + b[..., None, None] * U2


def _se3_exp(u, w):
    """exp of the algebra element with rotation part u, translation part w.

    Both (..., 3); returns (..., 4, 4) homogeneous transforms.
    """
    theta = np.linalg.norm(u, axis=-1)
    a, b, c = _rot_coeffs(theta)
    U = _skew(u)
    U2 = U @ U
    R = _EYE3 + a[..., None, None] * U + b[..., None, None] * U2
    V = _EYE3 + b[..., None, None] * U + c[..., None, None] * U2
    t = (V @ w[..., None])[..., 0]
    out = np.zeros(u.shape[:-1] + (4, 4))
    out[..., :3, :3] = R
    out[..., :3, 3] = t
    out[..., 3, 3] = 1.0
    return out


def _se3_log(T):
    """(..., 4, 4) transforms to algebra coordinates (u, w), each (..., 3).

    Raises if any rotation angle reaches the cut locus at pi.
    """
    R = T[..., :3, :3]
    trace = R[..., 0, 0] + R[..., 1, 1] + R[..., 2, 2]
    cos_t = np.clip((trace - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(cos_t)
    if np.any(theta > np.pi - 1e-6):
        raise InjectivityRadiusError(
            "rotation angle too close to pi; matrix logarithm is ill-conditioned"
        )
    t2 = theta * theta
    small = theta < 1e-4
    # f = theta / (2 sin theta); e solves Vinv = I - U/2 + e U^2.
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(small, 0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0,
                     theta / (2.0 * np.sin(theta)))
        e = np.where(
            small,
            1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0,
            (1.0 - theta * np.sin(theta) / (2.0 * (1.0 - np.cos(theta)))) / np.where(t2 > 0, t2, 1.0),
        )
    U = f[..., None, None] * (R - np.swapaxes(R, -1, -2))
    u = _vee(U)
    Vinv = _EYE3 - 0.5 * U + e[..., None, None] * (U @ U)
    w = (Vinv @ T[..., :3, 3:4])[..., 0]
    return u, w


def _rigid_inverse(T):
    """Inverse of (..., 4, 4) rigid transforms without a linear solve."""
    Rt = np.swapaxes(T[..., :3, :3], -1, -2)
    out = np.zeros_like(T)
    out[..., :3, :3] = Rt
    out[..., :3, 3] = -(Rt @ T[..., :3, 3:4])[..., 0]
    out[..., 3, 3] = 1.0
    return out


def _algebra_matrix(u, w):
    """Assemble (..., 4, 4) Lie-algebra matrices from (u, w) coordinates."""
    out = np.zeros(u.shape[:-1] + (4, 4))
    out[..., :3, :3] = _skew(u)
    out[..., :3, 3] = w
    return out


def _algebra_coords(B):
    """Extract (u, w) from (..., 4, 4) Lie-algebra matrices."""
    return _vee(B[..., :3, :3]), B[..., :3, 3]


# ---------------------------------------------------------------------------
# per-kind operation kernels
#
# Each kernel works on flat arrays in the kind's layout: single points are
# (size,) and batches are (n, size).  Dispatch happens once per public call.


class _EuclideanOps:
    def __init__(self, dims):
        self.n = dims[0]

    def dist(self, x, y):
        return float(np.linalg.norm(x - y))

    def dist_to_many(self, X, y):
        return np.linalg.norm(X - y, axis=1)

    def pairwise(self, A, B):
        diff = A[:, None, :] - B[None, :, :]
        return np.linalg.norm(diff, axis=2)

    def exp(self, base, v):
        return base + v

    def log(self, base, target):
        return target - base

    def log_many(self, base, targets):
        return targets - base

    def tnorm(self, v):
        return float(np.linalg.norm(v))

    def validate(self, x):
        if not np.all(np.isfinite(x)):
            return ("non-finite values", float("inf"))
        return None

    def validate_many(self, X):
        if not np.all(np.isfinite(X)):
            bad = int(np.argwhere(~np.isfinite(X).all(axis=1))[0, 0])
            return (bad, "non-finite values", float("inf"))
        return None

    def validate_tangent(self, base, v):
        return None

    def random(self, rng):
        return rng.standard_normal(self.n)

    def random_tangent(self, base, scale, rng):
        g = rng.standard_normal(self.n)
        g /= max(np.linalg.norm(g), 1e-300)
        return g * abs(rng.normal(0.0, scale))


class _SphereOps:
    def __init__(self, dims):
        self.n = dims[0]

    def dist(self, x, y):
        return float(np.arccos(np.clip(x @ y, -1.0, 1.0)))

    def dist_to_many(self, X, y):
        return np.arccos(np.clip(X @ y, -1.0, 1.0))

    def pairwise(self, A, B):
        return np.arccos(np.clip(A @ B.T, -1.0, 1.0))

    def exp(self, base, v):
        nv = np.linalg.norm(v)
        if nv > np.pi + 1e-12:
            raise InjectivityRadiusError(
                f"tangent norm {nv:.6g} exceeds the injectivity radius pi"
            )
        if nv == 0.0:
            return base
        out = np.cos(nv) * base + np.sin(nv) * (v / nv)
        return out / np.linalg.norm(out)

    def log(self, base, target):
        c = float(np.clip(base @ target, -1.0, 1.0))
        if c <= -1.0 + 1e-9:
            raise InjectivityRadiusError("antipodal points: log map undefined")
        u = target - c * base
        nu = np.linalg.norm(u)
        theta = np.arccos(c)
        if nu < 1e-15:
            return np.zeros_like(base)
        return u * (theta / nu)

    def log_many(self, base, targets):
        c = np.clip(targets @ base, -1.0, 1.0)
        if np.any(c <= -1.0 + 1e-9):
            raise InjectivityRadiusError("antipodal points: log map undefined")
        U = targets - c[:, None] * base
        nu = np.linalg.norm(U, axis=1)
        theta = np.arccos(c)
        scale = np.where(nu > 1e-15, theta / np.maximum(nu, 1e-300), 0.0)
        return U * scale[:, None]

    def tnorm(self, v):
        return float(np.linalg.norm(v))

    def validate(self, x):
        if not np.all(np.isfinite(x)):
            return ("non-finite values", float("inf"))
        mag = abs(float(np.linalg.norm(x)) - 1.0)
        if mag >= 1e-9:
            return ("unit-norm violation", mag)
        return None

    def validate_many(self, X):
        if not np.all(np.isfinite(X)):
            bad = int(np.argwhere(~np.isfinite(X).all(axis=1))[0, 0])
            return (bad, "non-finite values", float("inf"))
        mags = np.abs(np.linalg.norm(X, axis=1) - 1.0)
        worst = int(np.argmax(mags))
        if mags[worst] >= 1e-9:
            return (worst, "unit-norm violation", float(mags[worst]))
        return None

    def validate_tangent(self, base, v):
        mag = abs(float(base @ v))
        if mag >= 1e-9:
            return ("tangency violation", mag)
        return None

    def random(self, rng):
        g = rng.standard_normal(self.n)
        return g / np.linalg.norm(g)

    def random_tangent(self, base, scale, rng):
        g = rng.standard_normal(self.n)
        u = g - (g @ base) * base
        u /= max(np.linalg.norm(u), 1e-300)
        mag = min(abs(rng.normal(0.0, scale)), 0.95 * np.pi)
        return u * mag


class _GrassmannOps:
    def __init__(self, dims):
        self.m, self.d = dims

    def _mat(self, x):
        return x.reshape(self.m, self.m)

    def dist(self, x, y):
        diff = self._mat(x) - self._mat(y)
        # literal projection metric: sqrt tr((P1-P2)^T (P1-P2))
        return float(np.sqrt(max(np.trace(diff.T @ diff), 0.0)))

    def dist_to_many(self, X, y):
        sq = np.einsum("ij,ij->i", X, X) + y @ y - 2.0 * (X @ y)
        return np.sqrt(np.maximum(sq, 0.0))

    def pairwise(self, A, B):
        sq = (
            np.einsum("ij,ij->i", A, A)[:, None]
            + np.einsum("ij,ij->i", B, B)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.sqrt(np.maximum(sq, 0.0))

    def exp(self, base, v):
        return self.project(self._mat(base) + self._mat(v)).reshape(-1)

    def log(self, base, target):
        return target - base

    def log_many(self, base, targets):
        return targets - base

    def tnorm(self, v):
        return float(np.linalg.norm(v))

    def project(self, M):
        """Nearest rank-d projector to M.

        Symmetric input: span of the d eigenvectors with largest signed
        eigenvalues (the Frobenius-nearest projector).  General input: U U^T
        from the d-rank SVD, which agrees with the former whenever M is
        positive semidefinite (every averaging/update path here is).
        """
        M = np.asarray(M, dtype=np.float64)
        if np.allclose(M, M.T, atol=1e-12, rtol=0.0):
            w, V = np.linalg.eigh(M)
            if abs(w[-self.d]) <= 1e-10:
                raise DegenerateProjectionError(
                    f"eigenvalue lambda_{self.d} = {w[-self.d]:.3g} is too small"
                )
            Ud = V[:, -self.d :]
        else:
            U, S, _ = np.linalg.svd(M)
            if S[self.d - 1] <= 1e-10:
                raise DegenerateProjectionError(
                    f"singular value sigma_{self.d} = {S[self.d - 1]:.3g} is too small"
                )
            Ud = U[:, : self.d]
        return Ud @ Ud.T

    def validate(self, x):
        if not np.all(np.isfinite(x)):
            return ("non-finite values", float("inf"))
        P = self._mat(x)
        sym = float(np.linalg.norm(P - P.T))
        if sym >= 1e-6:
            return ("symmetry violation", sym)
        idem = float(np.linalg.norm(P @ P - P))
        if idem >= 1e-6:
            return ("idempotence violation", idem)
        tr = abs(float(np.trace(P)) - self.d)
        if tr >= 1e-6:
            return ("trace/rank violation", tr)
        return None

    def validate_many(self, X):
        for i in range(X.shape[0]):
            bad = self.validate(X[i])
            if bad is not None:
                return (i, bad[0], bad[1])
        return None

    def validate_tangent(self, base, v):
        return None

    def random(self, rng):
        return self.project(rng.standard_normal((self.m, self.m))).reshape(-1)

    def random_tangent(self, base, scale, rng):
        G = rng.standard_normal((self.m, self.m))
        G = 0.5 * (G + G.T)
        G /= max(np.linalg.norm(G), 1e-300)
        return (G * abs(rng.normal(0.0, scale))).reshape(-1)


class _ProductSE3Ops:
    def __init__(self, dims):
        self.j = dims[0]

    def _frames(self, x):
        return x.reshape(self.j, 4, 4)

    def _frames_many(self, X):
        return X.reshape(X.shape[0], self.j, 4, 4)

    def dist(self, x, y):
        rel = _rigid_inverse(self._frames(x)) @ self._frames(y)
        u, w = _se3_log(rel)
        return float(np.sqrt(np.sum(u * u) + np.sum(w * w)))

    def dist_to_many(self, X, y):
        rel = _rigid_inverse(self._frames_many(X)) @ self._frames(y)
        u, w = _se3_log(rel)
        return np.sqrt(np.sum(u * u, axis=(1, 2)) + np.sum(w * w, axis=(1, 2)))

    def pairwise(self, A, B):
        n, m = A.shape[0], B.shape[0]
        fa = _rigid_inverse(self._frames_many(A))
        fb = self._frames_many(B)
        out = np.empty((n, m))
        # row blocks keep the (rows*m*J, 4, 4) temporaries modest
        block = max(1, 200_000 // max(m * self.j, 1))
        for lo in range(0, n, block):
            hi = min(lo + block, n)
            rel = fa[lo:hi, None] @ fb[None, :]
            u, w = _se3_log(rel)
            out[lo:hi] = np.sqrt(np.sum(u * u, axis=(2, 3)) + np.sum(w * w, axis=(2, 3)))
        return out

    def exp(self, base, v):
        B = v.reshape(self.j, 4, 4)
        u, w = _algebra_coords(B)
        return (self._frames(base) @ _se3_exp(u, w)).reshape(-1)

    def log(self, base, target):
        rel = _rigid_inverse(self._frames(base)) @ self._frames(target)
        u, w = _se3_log(rel)
        return _algebra_matrix(u, w).reshape(-1)

    def log_many(self, base, targets):
        rel = _rigid_inverse(self._frames(base)) @ self._frames_many(targets)
        u, w = _se3_log(rel)
        return _algebra_matrix(u, w).reshape(targets.shape[0], -1)

    def tnorm(self, v):
        u, w = _algebra_coords(v.reshape(self.j, 4, 4))
        return float(np.sqrt(np.sum(u * u) + np.sum(w * w)))

    def validate(self, x):
        if not np.all(np.isfinite(x)):
            return ("non-finite values", float("inf"))
        T = self._frames(x)
        bottom = float(np.max(np.abs(T[:, 3, :] - np.array([0.0, 0.0, 0.0, 1.0]))))
        if bottom >= 1e-6:
            return ("homogeneous bottom-row violation", bottom)
        R = T[:, :3, :3]
        ortho = float(np.max(np.linalg.norm(np.swapaxes(R, 1, 2) @ R - _EYE3, axis=(1, 2))))
        if ortho >= 1e-6:
            return ("rotation orthogonality violation", ortho)
        dets = np.linalg.det(R)
        if np.any(dets <= 0):
            return ("rotation determinant violation", float(np.min(dets)))
        return None

    def validate_many(self, X):
        for i in range(X.shape[0]):
            bad = self.validate(X[i])
            if bad is not None:
                return (i, bad[0], bad[1])
        return None

    def validate_tangent(self, base, v):
        B = v.reshape(self.j, 4, 4)
        U = B[:, :3, :3]
        mag = float(np.max(np.abs(U + np.swapaxes(U, 1, 2))))
        if mag >= 1e-9:
            return ("skew-symmetry violation", mag)
        bottom = float(np.max(np.abs(B[:, 3, :])))
        if bottom >= 1e-9:
            return ("nonzero bottom row", bottom)
        return None

    def random(self, rng):
        axis = rng.standard_normal((self.j, 3))
        axis /= np.linalg.norm(axis, axis=1, keepdims=True)
        angle = rng.uniform(0.0, np.pi / 2.0, size=self.j)
        R = _so3_exp(axis * angle[:, None])
        T = np.zeros((self.j, 4, 4))
        T[:, :3, :3] = R
        T[:, :3, 3] = rng.standard_normal((self.j, 3))
        T[:, 3, 3] = 1.0
        return T.reshape(-1)

    def random_tangent(self, base, scale, rng):
        g = rng.standard_normal((self.j, 6))
        g /= max(np.linalg.norm(g), 1e-300)
        g *= abs(rng.normal(0.0, scale))
        return _algebra_matrix(g[:, :3], g[:, 3:]).reshape(-1)


_OPS_CLASSES = {
    EUCLIDEAN: _EuclideanOps,
    HYPERSPHERE: _SphereOps,
    GRASSMANN: _GrassmannOps,
    PRODUCT_SE3: _ProductSE3Ops,
}


@lru_cache(maxsize=None)
def _ops_cached(kind: str, dims: tuple):
    return _OPS_CLASSES[kind](dims)


def _ops(descriptor: ManifoldDescriptor):
    return _ops_cached(descriptor.kind, descriptor.dims)


def _check_same(a: ManifoldDescriptor, b: ManifoldDescriptor) -> None:
    if a != b:
        raise IncompatibleManifoldsError(f"manifolds differ: {a.spec()} vs {b.spec()}")


# ---------------------------------------------------------------------------
# public point-level operations


def distance(a: ManifoldPoint, b: ManifoldPoint) -> float:
    """Geodesic distance between two points on the same manifold."""
    _check_same(a.descriptor, b.descriptor)
    _count()
    return _ops(a.descriptor).dist(a.data, b.data)


def exp_map(base: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
    """Follow the geodesic from ``base`` along tangent vector ``v``."""
    _check_same(base.descriptor, v.descriptor)
    _count()
    if not np.any(v.data):
        return base
    out = _ops(base.descriptor).exp(base.data, v.data)
    return ManifoldPoint(base.descriptor, out)


def log_map(base: ManifoldPoint, target: ManifoldPoint) -> TangentVector:
    """Tangent vector at ``base`` pointing to ``target`` (inverse exp map)."""
    _check_same(base.descriptor, target.descriptor)
    _count()
    out = _ops(base.descriptor).log(base.data, target.data)
    return TangentVector(base.descriptor, base, out)


def grassmann_project(M: np.ndarray, d: int) -> ManifoldPoint:
    """Nearest rank-d projector to an m x m matrix (d-rank SVD, then U U^T)."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {M.shape}")
    desc = ManifoldDescriptor.grassmann(M.shape[0], d)
    _count()
    return ManifoldPoint(desc, _ops(desc).project(M))


def validate_point(p: ManifoldPoint) -> ValidationReport:
    """Check the point invariants of ``p`` and report the first violation."""
    bad = _ops(p.descriptor).validate(p.data)
    if bad is None:
        return ValidationReport(True)
    return ValidationReport(False, bad[0], bad[1])


def validate_tangent(v: TangentVector) -> ValidationReport:
    bad = _ops(v.descriptor).validate_tangent(v.base.data, v.data)
    if bad is None:
        return ValidationReport(True)
    return ValidationReport(False, bad[0], bad[1])


def random_point(descriptor: ManifoldDescriptor, rng_seed) -> ManifoldPoint:
    """Seed-deterministic random point (accepts an int seed or a Generator)."""
    rng = np.random.default_rng(rng_seed) if not isinstance(rng_seed, np.random.Generator) else rng_seed
    return ManifoldPoint(descriptor, _ops(descriptor).random(rng))


def random_points(descriptor: ManifoldDescriptor, n: int, rng) -> np.ndarray:
    """(n, size) array of random points; array-level companion of random_point."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    ops = _ops(descriptor)
    return np.stack([ops.random(rng) for _ in range(n)])


def random_tangent(
    descriptor: ManifoldDescriptor, base: np.ndarray, scale: float, rng
) -> np.ndarray:
    """Random tangent array at ``base`` with magnitude ~ |N(0, scale)|."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    return _ops(descriptor).random_tangent(base, scale, rng)


# ---------------------------------------------------------------------------
# array-level operations (used by training and matching internals)


def arr_distance(descriptor: ManifoldDescriptor, x: np.ndarray, y: np.ndarray) -> float:
    _count()
    return _ops(descriptor).dist(x, y)


def distances_to(descriptor: ManifoldDescriptor, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distances from each row of X (n, size) to the single point y."""
    _count(X.shape[0])
    return _ops(descriptor).dist_to_many(X, y)


def pairwise_distances(descriptor: ManifoldDescriptor, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(n, m) geodesic distance matrix between row sets A and B."""
    _count(A.shape[0] * B.shape[0])
    return _ops(descriptor).pairwise(A, B)


def arr_exp(descriptor: ManifoldDescriptor, base: np.ndarray, v: np.ndarray) -> np.ndarray:
    _count()
    if not np.any(v):
        return base
    return _ops(descriptor).exp(base, v)


def arr_log(descriptor: ManifoldDescriptor, base: np.ndarray, target: np.ndarray) -> np.ndarray:
    _count()
    return _ops(descriptor).log(base, target)


def logs_at(descriptor: ManifoldDescriptor, base: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Log map of every row of ``targets`` at the single base point."""
    _count(targets.shape[0])
    return _ops(descriptor).log_many(base, targets)


def tangent_norm(descriptor: ManifoldDescriptor, v: np.ndarray) -> float:
    return _ops(descriptor).tnorm(np.asarray(v, dtype=np.float64).reshape(-1))


def validate_array(descriptor: ManifoldDescriptor, X: np.ndarray):
    """First invariant violation in a (n, size) batch as (row, name, magnitude)."""
    return _ops(descriptor).validate_many(X)
