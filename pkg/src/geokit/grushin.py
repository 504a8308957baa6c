"""The Grushin plane: frame ``d/dx, x d/dy`` on R^2.

Off the axis ``x = 0`` the metric is Riemannian with ``ds^2 = dx^2 + x^-2 dy^2``
(``x^-2n dy^2`` for the step n+1 frame ``x^n d/dy``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from geokit._controls import OracleResult, penalty_search
from geokit.ccmetric import CCSolverConfig, UnconvergedError
from geokit.curves import SampledCurve

__all__ = [
    "GrushinGeodesic",
    "AxisCrossingError",
    "grushin_geodesic_point",
    "sample_geodesic",
    "grushin_length",
    "grushin_oracle",
    "grushin_dist",
    "grushin_curvature",
    "brioschi_curvature",
]


class AxisCrossingError(ValueError):
    pass


@dataclass(frozen=True)
class GrushinGeodesic:
    """Geodesic from ``(0, 0)`` to ``(0, y1)`` looping ``m`` times."""

    m: int
    y1: float
    sign: int = 1

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")
        if not self.y1 > 0:
            raise ValueError("y1 must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def length(self) -> float:
        return float(np.sqrt(2.0 * np.pi * self.m * self.y1))


def grushin_geodesic_point(g: GrushinGeodesic, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("t must lie in [0, 1]")
    w = g.m * np.pi
    x = g.sign * np.sqrt(2.0 * g.y1 / w) * np.sin(w * t)
    y = g.y1 * (t - np.sin(2.0 * w * t) / (2.0 * w))
    # the curve meets the axis at t = j/m; sin(j pi) is not exactly zero
    turns = g.m * t
    x = np.where(np.abs(turns - np.round(turns)) < 1e-12, 0.0, x)
    y = np.where(t == 0, 0.0, np.where(t == 1, g.y1, y))
    return np.stack([x, y], axis=-1)


def sample_geodesic(g: GrushinGeodesic, samples: int) -> SampledCurve:
    t = np.linspace(0.0, 1.0, samples)
    return SampledCurve(t, grushin_geodesic_point(g, t))


def _polyline_length(pts: np.ndarray, power: int) -> float:
    d = np.diff(pts, axis=0)
    xm = 0.5 * (pts[1:, 0] + pts[:-1, 0])
    return float(np.sum(np.sqrt(d[:, 0] ** 2 + (d[:, 1] / np.abs(xm) ** power) ** 2)))


def _piece_length(pts: np.ndarray, power: int) -> float:
    fine = _polyline_length(pts, power)
    if len(pts) % 2 == 0 or len(pts) < 5:
        return fine
    coarse = _polyline_length(pts[::2], power)
    return (4.0 * fine - coarse) / 3.0


def grushin_length(curve: SampledCurve, axis_policy: str = "forbid", power: int = 1) -> float:
    """Riemannian length with midpoint abscissae, Richardson-extrapolated.

    ``axis_policy`` controls contact with the singular axis ``x = 0``:
    ``"forbid"`` rejects it, ``"endpoints"`` allows the first and last
    samples on it, and ``"split"`` also allows interior samples on it and
    measures the pieces in between separately.  Midpoints never lie on the
    axis, so the degenerate metric is never evaluated.  A sign change of
    ``x`` between consecutive samples always raises
    :class:`AxisCrossingError`.
    """
    if axis_policy not in ("forbid", "endpoints", "split"):
        raise ValueError(f"unknown axis policy {axis_policy!r}")
    pts = curve.points
    if pts.shape[1] != 2:
        raise ValueError("Grushin curves are planar")
    x = pts[:, 0]
    if np.any(np.sign(x[1:]) * np.sign(x[:-1]) < 0):
        raise AxisCrossingError("curve jumps across the axis between samples")
    on_axis = np.flatnonzero(x == 0)
    interior = on_axis[(on_axis > 0) & (on_axis < len(x) - 1)]
    if axis_policy == "forbid" and on_axis.size:
        raise AxisCrossingError("curve meets the singular axis x = 0")
    if axis_policy == "endpoints" and interior.size:
        raise AxisCrossingError("curve meets the axis away from its endpoints")
    cuts = [0, *interior.tolist(), len(x) - 1]
    if np.any(np.diff(cuts) < 2) and len(cuts) > 2:
        raise AxisCrossingError("consecutive samples on the axis")
    return float(sum(_piece_length(pts[a:b + 1], power) for a, b in zip(cuts[:-1], cuts[1:])))


def _grushin_endpoint(x0):
    def endpoint(flat):
        u = flat.reshape(-1, 2)
        a, b = u[:, 0], u[:, 1]
        before = x0 + np.cumsum(a) - a
        xmid = before + 0.5 * a
        later_b = np.sum(b) - np.cumsum(b)
        end = np.array([np.sum(a), np.sum(b * xmid)])
        jac = np.zeros((2, u.size))
        jac[0, 0::2] = 1.0
        jac[1, 0::2] = 0.5 * b + later_b
        jac[1, 1::2] = xmid
        return end, jac

    return endpoint


def grushin_oracle(p, q, K: int = 64, restarts: int = 8, seed=0) -> OracleResult:
    """Shortest piecewise-constant-control horizontal path from ``p`` to ``q``.

    On each segment ``x`` moves linearly and ``y`` gains ``b * mean(x)``;
    the segment length is ``|(a, b)|``.
    """
    (x0, y0), (x1, y1) = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    # translate y to 0 and dilate (x, y) -> (x/s, y/s^2)
    scale = max(abs(x0), abs(x1), np.sqrt(abs(y1 - y0)))
    if scale == 0:
        return OracleResult(0.0, 0.0, np.zeros((K, 2)))
    # divide twice: scale ** 2 underflows for subnormal scales
    target = np.array([(x1 - x0) / scale, (y1 - y0) / scale / scale])
    straight = np.tile([target[0] / K, 0.0], (K, 1))
    best = penalty_search(_grushin_endpoint(x0 / scale), target, K, 2, restarts,
                          seed=seed, initial=straight)
    return OracleResult(best.length * scale, best.residual * scale, best.controls * scale)


def grushin_dist(p, q, cfg: CCSolverConfig | None = None) -> float:
    cfg = cfg or CCSolverConfig()
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p[0] == 0 and q[0] == 0:
        # the m = 1 member of the geodesic family is the shortest
        return float(np.sqrt(2.0 * np.pi * abs(q[1] - p[1])))
    res = grushin_oracle(p, q, cfg.controls_per_path, cfg.restarts, cfg.seed)
    scale = max(abs(p[0]), abs(q[0]), np.sqrt(abs(q[1] - p[1])))
    if res.residual > 1e-6 * scale:
        raise UnconvergedError(
            f"endpoint residual {res.residual:.2e} after {cfg.restarts} restarts",
            best_bound=res.length,
        )
    return res.length


def grushin_curvature(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise ValueError("the metric degenerates on the axis x = 0")
    return -2.0 / (x * x)


def brioschi_curvature(E, G, x, y, h: float = 1e-3):
    """Gauss curvature of ``E dx^2 + G dy^2`` by nested central differences.

    ``K = -1/(2 sqrt(EG)) [ (G_x / sqrt(EG))_x + (E_y / sqrt(EG))_y ]``.
    """
    def W(x, y):
        return np.sqrt(E(x, y) * G(x, y))

    def gx_over_w(x, y):
        return (G(x + h, y) - G(x - h, y)) / (2 * h) / W(x, y)

    def ey_over_w(x, y):
        return (E(x, y + h) - E(x, y - h)) / (2 * h) / W(x, y)

    outer_x = (gx_over_w(x + h, y) - gx_over_w(x - h, y)) / (2 * h)
    outer_y = (ey_over_w(x, y + h) - ey_over_w(x, y - h)) / (2 * h)
    return -(outer_x + outer_y) / (2.0 * W(x, y))
