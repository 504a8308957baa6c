"""Horizontal embeddings of the sphere S^n into H^n.

Two constructions are provided:

* the Cayley route: rotate the real sphere inside the unit ball of
  C^{n+1} by ``z_{n+1} -> i z_{n+1}``, push it to the Siegel domain
  boundary with the Cayley transform and drop ``Im w_{n+1}``.  In the chart
  ``x = xi' / (1 - xi_{n+1})`` this is the closed form :func:`cayley_phi`.
* the Legendrian lift of ``(x0, x') -> (x_j, x0 x_j)_j`` with vertical
  coordinate ``(2/3) x0^3 - 2 x0``.

Sphere points are arrays of shape ``(..., n+1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from geokit.heisenberg import contact_form, koranyi_dist

__all__ = [
    "SpherePoint",
    "PointAtInfinityError",
    "cayley_transform",
    "siegel_defect",
    "siegel_project",
    "siegel_lift",
    "rotate",
    "cayley_phi",
    "cayley_sphere",
    "cayley_phi_inf",
    "stereographic",
    "legendrian_F",
    "pullback_defect",
    "DistortionReport",
    "bilip_estimate",
    "great_circle",
    "fibonacci_sphere",
    "uniform_sphere",
]


class PointAtInfinityError(ValueError):
    pass


@dataclass(frozen=True)
class SpherePoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("sphere point needs n+1 >= 2 coordinates")
        if abs(np.linalg.norm(c) - 1.0) > 1e-12:
            raise ValueError("sphere point must have unit norm")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.size - 1

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype)


def _to_heis(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1] + 1,))
    out[..., 0:-1:2] = z.real
    out[..., 1:-1:2] = z.imag
    out[..., -1] = t
    return out


def cayley_transform(z) -> np.ndarray:
    """``(z_j / (1 + z_{n+1}), i (1 - z_{n+1}) / (1 + z_{n+1}))``."""
    z = np.asarray(z, dtype=complex)
    last = z[..., -1]
    if np.any(np.abs(1.0 + last) == 0):
        raise PointAtInfinityError("the south pole z_{n+1} = -1 maps to infinity")
    denom = 1.0 + last
    w = np.empty_like(z)
    w[..., :-1] = z[..., :-1] / denom[..., None]
    w[..., -1] = 1j * (1.0 - last) / denom
    return w


def siegel_defect(w) -> np.ndarray:
    """``Im w_{n+1} - sum |w_j|^2``; zero on the Siegel boundary."""
    w = np.asarray(w, dtype=complex)
    return w[..., -1].imag - np.sum(np.abs(w[..., :-1]) ** 2, axis=-1)


def siegel_project(w, tol: float = 1e-8) -> np.ndarray:
    """Keep ``(w_1, ..., w_n, Re w_{n+1})`` as a point of H^n."""
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(siegel_defect(w)) > tol):
        raise ValueError("point is not on the Siegel domain boundary")
    return _to_heis(w[..., :-1], w[..., -1].real)


def siegel_lift(p) -> np.ndarray:
    """Inverse of :func:`siegel_project`: restore ``Im w_{n+1} = sum |w_j|^2``."""
    p = np.asarray(p, dtype=float)
    z = p[..., 0:-1:2] + 1j * p[..., 1:-1:2]
    last = p[..., -1] + 1j * np.sum(np.abs(z) ** 2, axis=-1)
    return np.concatenate([z, last[..., None]], axis=-1)


def rotate(z) -> np.ndarray:
    """The unitary map ``(z', z_{n+1}) -> (z', i z_{n+1})``."""
    z = np.array(z, dtype=complex)
    z[..., -1] *= 1j
    return z


def cayley_phi(x) -> np.ndarray:
    """Closed-form horizontal embedding of ``R^n u {inf}`` into H^n.

    Rows containing a non-finite entry stand for the point at infinity and
    map to ``(0, 1)``.
    """
    x = np.asarray(x, dtype=float)
    at_inf = ~np.all(np.isfinite(x), axis=-1)
    x = np.where(at_inf[..., None], 0.0, x)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        r2 = np.sum(x * x, axis=-1)
        # far out, divide through by |x|^4 so huge |x| cannot overflow
        big = r2 > 1.0
        inv = np.where(big, 1.0 / np.where(big, r2, 1.0), 0.0)
        small_r4 = r2 * r2 + 1.0
        a = np.where(big, (inv + inv * inv) / (1.0 + inv * inv), (r2 + 1.0) / small_r4)
        b = np.where(big, (inv - inv * inv) / (1.0 + inv * inv), (r2 - 1.0) / small_r4)
        t = np.where(big, (1.0 - inv * inv) / (1.0 + inv * inv), (r2 * r2 - 1.0) / small_r4)
    z = (a[..., None] - 1j * b[..., None]) * x
    out = _to_heis(z, t)
    out[at_inf] = 0.0
    out[at_inf, -1] = 1.0
    return out


def cayley_phi_inf(n: int) -> np.ndarray:
    out = np.zeros(2 * n + 1)
    out[-1] = 1.0
    return out


def stereographic(xi) -> np.ndarray:
    """Chart ``xi -> xi' / (1 - xi_{n+1})`` sending the last-axis pole to infinity."""
    xi = np.asarray(xi, dtype=float)
    return xi[..., :-1] / (1.0 - xi[..., -1:])


def cayley_sphere(xi) -> np.ndarray:
    """The Cayley embedding evaluated directly on the sphere (no chart singularity)."""
    xi = np.asarray(xi, dtype=float)
    return siegel_project(cayley_transform(rotate(xi)))


def legendrian_F(p) -> np.ndarray:
    """Legendrian lift of ``(x0, x') -> (x_1, x0 x_1, ..., x_n, x0 x_n)``."""
    p = np.asarray(p, dtype=float)
    x0, xr = p[..., 0], p[..., 1:]
    z = xr + 1j * (x0[..., None] * xr)
    # one rounding at the poles: t(+-1) is exactly -+4/3
    return _to_heis(z, 2.0 * x0 * (x0 * x0 - 3.0) / 3.0)


def _tangent_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal tangent frames of S^n at each row of ``p``: shape (N, n, n+1)."""
    N, d = p.shape
    frames = np.empty((N, d - 1, d))
    for i in range(N):
        # rows 1..n of Q span the orthogonal complement of p
        q, _ = np.linalg.qr(np.column_stack([p[i], np.eye(d)]))
        frames[i] = q[:, 1:].T
    return frames


def uniform_sphere(n: int, samples: int, seed=0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((samples, n + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def fibonacci_sphere(n: int, samples: int) -> np.ndarray:
    """Deterministic near-uniform points on S^1 or S^2."""
    k = np.arange(samples) + 0.5
    if n == 1:
        theta = 2.0 * np.pi * k / samples
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if n == 2:
        z = 1.0 - 2.0 * k / samples
        r = np.sqrt(1.0 - z * z)
        ang = np.pi * (1.0 + np.sqrt(5.0)) * k
        return np.column_stack([z, r * np.cos(ang), r * np.sin(ang)])
    raise ValueError("fibonacci lattice implemented for n = 1, 2 only")


def pullback_defect(sampler, mesh: float, n: int, points=None, samples: int = 200) -> float:
    """Max of ``|alpha(F(exp_p(mesh e)) - F(p))| / mesh`` over sphere samples.

    ``e`` runs over an orthonormal tangent basis at each sample ``p``.  The
    forward difference makes this O(mesh) for smooth horizontal maps.
    """
    if not mesh > 0:
        raise ValueError("mesh must be positive")
    p = fibonacci_sphere(n, samples) if points is None else np.asarray(points, dtype=float)
    frames = _tangent_basis(p)
    base = sampler(p)
    worst = 0.0
    for k in range(frames.shape[1]):
        e = frames[:, k]
        moved = np.cos(mesh) * p + np.sin(mesh) * e
        diff = sampler(moved) - base
        worst = max(worst, float(np.max(np.abs(contact_form(base, diff)))) / mesh)
    return worst


def great_circle(p, q) -> np.ndarray:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    cross = np.linalg.norm(p - q, axis=-1)
    # 2 asin(chord/2) is accurate at small angles, unlike acos(dot)
    return 2.0 * np.arcsin(np.clip(0.5 * cross, 0.0, 1.0))


@dataclass(frozen=True)
class DistortionReport:
    lower: float
    upper: float
    argmin_pair: tuple
    argmax_pair: tuple
    samples: int


def bilip_estimate(sampler, n: int, metric: str = "koranyi", samples: int = 10_000,
                   seed=0, cfg=None) -> DistortionReport:
    """Range of ``d_target(F p, F q) / d_sphere(p, q)`` over random pairs."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((2, samples, n + 1))
    p, q = g / np.linalg.norm(g, axis=-1, keepdims=True)
    ds = great_circle(p, q)
    keep = ds > 1e-12
    p, q, ds = p[keep], q[keep], ds[keep]
    fp, fq = sampler(p), sampler(q)
    if metric == "koranyi":
        dt = koranyi_dist(fp, fq)
    elif metric == "cc":
        from geokit.ccmetric import cc_dist
        dt = cc_dist(fp, fq, cfg)
    elif metric == "euclidean":
        dt = np.linalg.norm(fp - fq, axis=-1)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    ratio = dt / ds
    lo, hi = int(np.argmin(ratio)), int(np.argmax(ratio))
    return DistortionReport(float(ratio[lo]), float(ratio[hi]), (p[lo], q[lo]),
                            (p[hi], q[hi]), int(keep.sum()))
