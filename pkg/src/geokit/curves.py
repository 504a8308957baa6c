"""Sampled curves, horizontal lifts and contact defects."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from geokit.heisenberg import as_points, group_mul

__all__ = [
    "SampledCurve",
    "HorizontalityError",
    "horizontal_lift",
    "horizontal_length",
    "contact_defect",
    "segment_defects",
    "left_translate",
    "polygon_area",
]


class HorizontalityError(ValueError):
    def __init__(self, message, segment=None, defect=None):
        super().__init__(message)
        self.segment = segment
        self.defect = defect


@dataclass(frozen=True)
class SampledCurve:
    """Points sampled at strictly increasing parameters."""

    params: np.ndarray
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        s = np.array(self.params, dtype=float)
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if s.ndim != 1 or s.size < 2 or pts.shape[0] != s.size:
            raise ValueError("need at least 2 samples with matching params and points")
        if np.any(np.diff(s) <= 0):
            raise ValueError("params must be strictly increasing")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(pts))):
            raise ValueError("curve samples must be finite")
        if self.closed and np.max(np.abs(pts[0] - pts[-1])) > 1e-9:
            raise ValueError("closed curve must end where it starts")
        s.setflags(write=False)
        pts.setflags(write=False)
        object.__setattr__(self, "params", s)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_function(cls, func, a: float, b: float, samples: int, closed=False):
        s = np.linspace(a, b, samples)
        pts = np.asarray(func(s), dtype=float)
        if closed:
            pts = pts.copy()
            pts[-1] = pts[0]
        return cls(s, pts, closed)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.params.size


def horizontal_lift(planar: SampledCurve, t0: float = 0.0) -> SampledCurve:
    """Lift a curve in R^2n by integrating ``dt = 2 sum_j (y_j dx_j - x_j dy_j)``.

    Trapezoid rule, which is exact on polygons.
    """
    z = planar.points
    if z.shape[1] % 2:
        raise ValueError("planar curve must live in R^2n")
    x, y = z[:, 0::2], z[:, 1::2]
    dx, dy = np.diff(x, axis=0), np.diff(y, axis=0)
    xm, ym = 0.5 * (x[1:] + x[:-1]), 0.5 * (y[1:] + y[:-1])
    dt = 2.0 * np.sum(ym * dx - xm * dy, axis=1)
    t = t0 + np.concatenate([[0.0], np.cumsum(dt)])
    return SampledCurve(planar.params, np.column_stack([z, t]), closed=False)


def segment_defects(curve: SampledCurve) -> np.ndarray:
    """Per-segment contact defect ``|alpha(midpoint, increment)| / ds``."""
    pts = as_points(curve.points)
    d = np.diff(pts, axis=0)
    mid = 0.5 * (pts[1:] + pts[:-1])
    xm, ym = mid[:, 0:-1:2], mid[:, 1:-1:2]
    alpha = d[:, -1] + 2.0 * np.sum(xm * d[:, 1:-1:2] - ym * d[:, 0:-1:2], axis=1)
    return np.abs(alpha) / np.diff(curve.params)


def contact_defect(curve: SampledCurve) -> float:
    return float(np.max(segment_defects(curve)))


def horizontal_length(curve: SampledCurve, tol: float = 1e-6) -> float:
    defects = segment_defects(curve)
    worst = int(np.argmax(defects))
    if defects[worst] > tol:
        raise HorizontalityError(
            f"segment {worst} has contact defect {defects[worst]:.3e} > {tol:.1e}",
            segment=worst, defect=float(defects[worst]),
        )
    z = curve.points[:, :-1]
    return float(np.sum(np.linalg.norm(np.diff(z, axis=0), axis=1)))


def left_translate(g, curve: SampledCurve) -> SampledCurve:
    g = as_points(g)
    pts = group_mul(np.broadcast_to(g, curve.points.shape), curve.points)
    return SampledCurve(curve.params, pts, curve.closed)


def polygon_area(vertices) -> float:
    """Signed shoelace area of a closed planar polygon (CCW positive)."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
