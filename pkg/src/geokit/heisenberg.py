"""Group structure of the Heisenberg group H^n.

Points are stored in real coordinates ``(x1, y1, ..., xn, yn, t)``.  Every
array function below is vectorised over leading axes, so a batch of points
is simply an array of shape ``(..., 2n+1)``.

The group law is

    (z, t) * (z', t') = (z + z', t + t' + 2 Im sum_j z_j conj(z'_j))

with left invariant frame ``X_j = d/dx_j + 2 y_j d/dt`` and
``Y_j = d/dy_j - 2 x_j d/dt``.  With this convention ``[X_j, Y_j] = -4T``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HeisPoint",
    "HorizontalVec",
    "as_points",
    "group_mul",
    "inverse",
    "dilate",
    "koranyi_norm",
    "koranyi_dist",
    "in_center",
    "frame_push",
    "frame_matrix",
    "contact_form",
    "horizontal_norm",
    "origin",
]


def _dim_to_n(dim: int) -> int:
    if dim < 3 or dim % 2 == 0:
        raise ValueError(f"a Heisenberg point needs 2n+1 >= 3 coordinates, got {dim}")
    return (dim - 1) // 2


def as_points(p) -> np.ndarray:
    """Coerce ``p`` to a float array with a valid trailing Heisenberg axis."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0:
        raise ValueError("expected coordinates, got a scalar")
    _dim_to_n(arr.shape[-1])
    return arr


def _check_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p, q = as_points(p), as_points(q)
    if p.shape[-1] != q.shape[-1]:
        raise ValueError(
            f"dimension mismatch: H^{_dim_to_n(p.shape[-1])} vs H^{_dim_to_n(q.shape[-1])}"
        )
    return p, q


def _xy(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return p[..., 0:-1:2], p[..., 1:-1:2]


def origin(n: int) -> np.ndarray:
    return np.zeros(2 * n + 1)


def group_mul(p, q) -> np.ndarray:
    p, q = _check_pair(p, q)
    x, y = _xy(p)
    xq, yq = _xy(q)
    # Im(z conj z') = y x' - x y'
    twist = 2.0 * np.sum(y * xq - x * yq, axis=-1)
    out = p + q
    out[..., -1] += twist
    return out


def inverse(p) -> np.ndarray:
    return -as_points(p)


def dilate(r, p) -> np.ndarray:
    """``(z, t) -> (r z, r^2 t)``; an array ``r`` must broadcast against ``p[..., :1]``."""
    r = np.asarray(r, dtype=float)
    if not np.all(r > 0):
        raise ValueError("dilation factor must be positive")
    p = as_points(p)
    scale = np.broadcast_to(r, p[..., :1].shape) if r.ndim else r
    out = scale * p
    out[..., -1] *= scale[..., 0] if r.ndim else r
    return out


def koranyi_norm(p) -> np.ndarray:
    p = as_points(p)
    z2 = np.sum(p[..., :-1] ** 2, axis=-1)
    return (z2 * z2 + p[..., -1] ** 2) ** 0.25


def koranyi_dist(p, q) -> np.ndarray:
    """Koranyi distance ``||q^{-1} * p||_K``."""
    p, q = _check_pair(p, q)
    return koranyi_norm(group_mul(inverse(q), p))


def in_center(p, tol: float = 0.0) -> np.ndarray:
    """True where every horizontal coordinate is within ``tol`` of zero."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    p = as_points(p)
    return np.max(np.abs(p[..., :-1]), axis=-1) <= tol


def frame_matrix(p) -> np.ndarray:
    """Ambient components of the frame ``X_1, Y_1, ..., X_n, Y_n`` at ``p``.

    Returns shape ``(..., 2n+1, 2n)``; column ``k`` is the k-th frame field.
    """
    p = as_points(p)
    dim = p.shape[-1]
    m = dim - 1
    frame = np.zeros(p.shape[:-1] + (dim, m))
    idx = np.arange(m)
    frame[..., idx, idx] = 1.0
    x, y = _xy(p)
    frame[..., -1, 0::2] = 2.0 * y
    frame[..., -1, 1::2] = -2.0 * x
    return frame


def contact_form(p, w) -> np.ndarray:
    """Evaluate ``alpha_p(w) = w_t + 2 sum_j (x_j w_yj - y_j w_xj)``."""
    p, w = _check_pair(p, w)
    x, y = _xy(p)
    wx, wy = _xy(w)
    return w[..., -1] + 2.0 * np.sum(x * wy - y * wx, axis=-1)


@dataclass(frozen=True)
class HeisPoint:
    """A single validated point of H^n."""

    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float)
        if arr.ndim != 1:
            raise ValueError("HeisPoint expects a flat coordinate vector")
        _dim_to_n(arr.size)
        if not np.all(np.isfinite(arr)):
            raise ValueError("HeisPoint coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def origin(cls, n: int) -> "HeisPoint":
        return cls(origin(n))

    @property
    def n(self) -> int:
        return (self.coords.size - 1) // 2

    @property
    def z(self) -> np.ndarray:
        return self.coords[:-1]

    @property
    def t(self) -> float:
        return float(self.coords[-1])

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype)

    def __mul__(self, other: "HeisPoint") -> "HeisPoint":
        return HeisPoint(group_mul(self.coords, np.asarray(other)))

    def inverse(self) -> "HeisPoint":
        return HeisPoint(-self.coords)

    def dilate(self, r: float) -> "HeisPoint":
        return HeisPoint(dilate(r, self.coords))

    def __eq__(self, other):
        if not isinstance(other, HeisPoint):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())

    def __repr__(self):
        return f"HeisPoint({self.coords.tolist()})"


@dataclass(frozen=True)
class HorizontalVec:
    """Horizontal tangent vector at ``base`` given by frame coefficients."""

    base: HeisPoint
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (2 * self.base.n,):
            raise ValueError(
                f"expected {2 * self.base.n} frame coefficients, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("frame coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.base.n


def frame_push(v: HorizontalVec) -> np.ndarray:
    """Ambient vector ``sum_j a_j X_j(base) + b_j Y_j(base)``."""
    return frame_matrix(v.base.coords) @ v.coeffs


def horizontal_norm(v: HorizontalVec) -> float:
    return float(np.linalg.norm(v.coeffs))
