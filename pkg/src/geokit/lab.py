"""Winding numbers, a discrete Stokes check and Jacobian rank estimates."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from geokit.curves import SampledCurve

__all__ = [
    "winding_number",
    "Polynomial",
    "OneForm",
    "disk_rect_area",
    "stokes_check",
    "numerical_jacobian",
    "RankReport",
    "rank_check",
]


def _segment_distance(pts: np.ndarray, point: np.ndarray) -> float:
    a, b = pts[:-1], pts[1:]
    ab = b - a
    denom = np.sum(ab * ab, axis=1)
    s = np.clip(np.sum((point - a) * ab, axis=1) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    proj = a + s[:, None] * ab
    return float(np.min(np.linalg.norm(proj - point, axis=1)))


def winding_number(curve, point, tol: float = 1e-12) -> int:
    """Winding number of a closed planar polyline around ``point``."""
    pts = curve.points if isinstance(curve, SampledCurve) else np.asarray(curve, dtype=float)
    point = np.asarray(point, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("winding numbers need a planar curve")
    if _segment_distance(pts, point) <= tol:
        raise ValueError("point lies on the curve")
    rel = pts - point
    a, b = rel[:-1], rel[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = np.sum(a * b, axis=1)
    total = np.sum(np.arctan2(cross, dot)) / (2.0 * np.pi)
    k = round(total)
    if abs(total - k) > 0.01:
        raise ValueError(f"angle sum {total:.4f} turns is not an integer; is the curve closed?")
    return int(k)


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial ``{exponents: coefficient}`` in ``nvars`` variables."""

    nvars: int
    terms: dict = field(default_factory=dict)

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape[:-1])
        for exps, c in self.terms.items():
            term = np.full(y.shape[:-1], float(c))
            for i, e in enumerate(exps):
                if e:
                    term = term * y[..., i] ** e
            out = out + term
        return out

    def deriv(self, i: int) -> "Polynomial":
        terms = {}
        for exps, c in self.terms.items():
            if exps[i]:
                new = list(exps)
                new[i] -= 1
                key = tuple(new)
                terms[key] = terms.get(key, 0.0) + c * exps[i]
        return Polynomial(self.nvars, terms)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0.0) - c
        return Polynomial(self.nvars, {k: c for k, c in terms.items() if c != 0})


@dataclass(frozen=True)
class OneForm:
    """``sum_i a_i(y) dy_i`` with polynomial coefficients on R^l."""

    coeffs: tuple

    @classmethod
    def from_terms(cls, nvars: int, *coeff_terms: dict) -> "OneForm":
        polys = [Polynomial(nvars, dict(t)) for t in coeff_terms]
        polys += [Polynomial(nvars, {})] * (nvars - len(polys))
        return cls(tuple(polys))

    @property
    def nvars(self) -> int:
        return len(self.coeffs)

    def d(self) -> dict:
        """Coefficients ``c_ij`` of ``d(omega) = sum_{i<j} c_ij dy_i ^ dy_j``."""
        out = {}
        for i in range(self.nvars):
            for j in range(i + 1, self.nvars):
                c = self.coeffs[j].deriv(i) - self.coeffs[i].deriv(j)
                if c.terms:
                    out[(i, j)] = c
        return out


def _quarter_area(a, b):
    """Area of the unit disk intersected with ``{x <= a, y <= b}``."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))

    def G(x):
        x = np.clip(x, -1.0, 1.0)
        return 0.5 * (x * np.sqrt(1.0 - x * x) + np.arcsin(x))

    c = np.clip(a, -1.0, 1.0)
    bb = np.clip(b, -1.0, 1.0)
    s = np.sqrt(1.0 - bb * bb)
    upper = b >= 0

    def span(u, v):
        return u, np.maximum(np.minimum(v, c), u)

    u1, v1 = span(-np.ones_like(s), -s)
    u2, v2 = span(-s, s)
    u3, v3 = span(s, np.ones_like(s))
    full = 2.0 * (G(v1) - G(u1)) + 2.0 * (G(v3) - G(u3))
    part = bb * (v2 - u2) + G(v2) - G(u2)
    out = np.where(upper, full, 0.0) + part
    out = np.where(b >= 1, 2.0 * (G(c) - G(-1.0)), out)
    return np.where(b <= -1, 0.0, out)


def disk_rect_area(x0, x1, y0, y1):
    """Exact area of ``[x0, x1] x [y0, y1]`` inside the unit disk."""
    return (_quarter_area(x1, y1) - _quarter_area(x0, y1)
            - _quarter_area(x1, y0) + _quarter_area(x0, y0))


def stokes_check(g, omega: OneForm, h: float, boundary_samples: int | None = None,
                 extension: str = "direct"):
    """Compare ``int_{dB} g*omega`` with ``int_B g*(d omega)`` on the unit disk.

    ``g`` maps arrays of shape ``(..., 2)`` to ``(..., l)``.  Grid nodes just
    outside the disk are evaluated directly (``extension="direct"``) or by
    the radial extension ``g(x/|x|)`` (``"radial"``), which only needs ``g``
    on the closed disk but costs an O(h) error in the cut cells.  The interior
    is a midpoint rule over grid cells weighted by their exact overlap with
    the disk; the boundary is a trapezoid sum over an inscribed polygon.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    if extension not in ("direct", "radial"):
        raise ValueError(f"unknown extension {extension!r}")
    cells = int(np.ceil(2.0 / h))
    ax = -1.0 + h * np.arange(cells + 1)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    nodes = np.stack([X, Y], axis=-1)
    if extension == "radial":
        r = np.linalg.norm(nodes, axis=-1, keepdims=True)
        nodes = np.where(r > 1.0, nodes / np.maximum(r, 1.0), nodes)
    vals = np.asarray(g(nodes), dtype=float)
    if vals.shape[-1] != omega.nvars:
        raise ValueError("form and map disagree on the target dimension")

    g00, g10, g01, g11 = vals[:-1, :-1], vals[1:, :-1], vals[:-1, 1:], vals[1:, 1:]
    mid = 0.25 * (g00 + g10 + g01 + g11)
    du = 0.5 * (g10 - g00 + g11 - g01) / h
    dv = 0.5 * (g01 - g00 + g11 - g10) / h
    weight = disk_rect_area(ax[:-1, None], ax[1:, None], ax[None, :-1], ax[None, 1:])
    dens = np.zeros(weight.shape)
    for (i, j), c in omega.d().items():
        dens += c(mid) * (du[..., i] * dv[..., j] - dv[..., i] * du[..., j])
    interior = float(np.sum(dens * weight))

    N = boundary_samples or int(np.ceil(2.0 * np.pi / h))
    theta = 2.0 * np.pi * np.arange(N + 1) / N
    ring = np.column_stack([np.cos(theta), np.sin(theta)])
    ring[-1] = ring[0]
    gb = np.asarray(g(ring), dtype=float)
    boundary = 0.0
    for i, a in enumerate(omega.coeffs):
        if not a.terms:
            continue
        av = a(gb)
        boundary += float(np.sum(0.5 * (av[1:] + av[:-1]) * np.diff(gb[:, i])))
    return boundary, interior


def numerical_jacobian(func, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobians at each row of ``x``: shape (N, k, m)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    N, m = x.shape
    cols = []
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        cols.append((np.asarray(func(x + e)) - np.asarray(func(x - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class RankReport:
    max_rank: int
    singular_values: np.ndarray

    def relative(self, index: int) -> np.ndarray:
        """``sigma_index / sigma_0`` at every sample (zero where undefined)."""
        s = self.singular_values
        if index >= s.shape[1]:
            return np.zeros(s.shape[0])
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(s[:, 0] > 0, s[:, index] / s[:, 0], 0.0)


def rank_check(func, points, tol: float = 1e-6, h: float = 1e-5) -> RankReport:
    """Largest numerical rank of ``d func`` over the sample points.

    Rank counts singular values above ``tol`` times the largest one.
    """
    J = numerical_jacobian(func, points, h)
    s = np.linalg.svd(J, compute_uv=False)
    top = s[:, :1]
    ranks = np.sum(s > tol * np.where(top > 0, top, np.inf), axis=1)
    return RankReport(int(ranks.max()), s)
