"""Carnot-Caratheodory distance on H^n.

Geodesics from the origin are horizontal lifts of circular arcs in C^n.
A unit speed arc with curvature ``k`` and initial direction ``v`` reaches

    z(s) = v e^{iks/2} s sinc(ks/2),      t(s) = -2 (ks - sin ks) / k^2

so for a target ``(z, t)`` with ``r = |z|`` the total turning angle
``phi = kL`` solves ``|t| * 2 sin^2(phi/2) = r^2 (phi - sin phi)`` on
``[0, 2pi]``.  The distance is then ``L = r (phi/2) / sin(phi/2)``.
The formula is validated against :func:`cc_oracle`, which knows nothing
about arcs and simply minimises over piecewise-constant horizontal paths.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from geokit._controls import OracleResult, penalty_search
from geokit.heisenberg import (
    HeisPoint,
    _check_pair,
    group_mul,
    in_center,
    inverse,
    koranyi_dist,
)

__all__ = [
    "CCSolverConfig",
    "GeodesicArc",
    "UnconvergedError",
    "NearCenterError",
    "geodesic_point",
    "cc_geodesic",
    "cc_dist",
    "cc_oracle",
    "eikonal_check",
    "ComparabilityReport",
    "comparability_scan",
]

TWO_PI = 2.0 * np.pi


class UnconvergedError(RuntimeError):
    """Raised when a solver gives up; ``best_bound`` holds its best estimate."""

    def __init__(self, message, best_bound=None):
        super().__init__(message)
        self.best_bound = best_bound


class NearCenterError(ValueError):
    pass


@dataclass(frozen=True)
class CCSolverConfig:
    controls_per_path: int = 64
    restarts: int = 8
    tol: float = 1e-12
    max_iter: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.controls_per_path < 2:
            raise ValueError("controls_per_path must be >= 2")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


def _sinc(u):
    """sin(u)/u."""
    return np.sinc(np.asarray(u, dtype=float) / np.pi)


def _cusp(u):
    """(u - sin u) / u^2, with a series near zero to dodge cancellation."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < 0.1
    us = u[small]
    u2 = us * us
    out[small] = us * (1 / 6 - u2 * (1 / 120 - u2 * (1 / 5040 - u2 * (1 / 362880 - u2 / 39916800))))
    ub = u[~small]
    out[~small] = (ub - np.sin(ub)) / (ub * ub)
    return out


@dataclass(frozen=True)
class GeodesicArc:
    start: HeisPoint
    direction: np.ndarray
    twist: float
    duration: float

    def __post_init__(self):
        d = np.array(self.direction, dtype=float)
        if d.shape != (2 * self.start.n,):
            raise ValueError("direction must have 2n components")
        if abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        if self.duration < 0:
            raise ValueError("duration must be nonnegative")
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)

    @property
    def n(self) -> int:
        return self.start.n


def _arc_from_origin(direction, twist, s):
    """Points at arclength ``s`` (array) along an arc issued from the origin."""
    s = np.asarray(s, dtype=float)
    v = direction[0::2] + 1j * direction[1::2]
    ks = twist * s
    phase = np.exp(0.5j * ks) * s * _sinc(0.5 * ks)
    z = phase[..., None] * v
    out = np.empty(s.shape + (direction.size + 1,))
    out[..., 0:-1:2] = z.real
    out[..., 1:-1:2] = z.imag
    out[..., -1] = -2.0 * s * s * _cusp(ks)
    return out


def geodesic_point(arc: GeodesicArc, s) -> np.ndarray:
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(s_arr > arc.duration):
        raise ValueError(f"arclength outside [0, {arc.duration}]")
    local = _arc_from_origin(arc.direction, arc.twist, s_arr)
    return group_mul(np.broadcast_to(arc.start.coords, local.shape), local)


def _solve_turning(r, t_abs, tol, max_iter):
    """Turning angle in [0, 2pi] for radial profile (r, |t|); bisection."""
    lo = np.zeros_like(r)
    hi = np.full_like(r, TWO_PI)

    def gap(phi):
        return t_abs * 0.5 * _sinc(0.5 * phi) ** 2 - r * r * _cusp(phi)

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        pos = gap(mid) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
        if np.all(hi - lo <= tol * TWO_PI):
            break
    return 0.5 * (lo + hi), hi - lo


def _length_from_turning(phi, r, t_abs):
    with np.errstate(divide="ignore", invalid="ignore"):
        by_r = r / _sinc(0.5 * phi)
        by_t = np.sqrt(t_abs / (2.0 * _cusp(phi)))
    return np.where(phi <= np.pi, by_r, by_t)


def _radial_dist(w, cfg):
    r = np.linalg.norm(w[..., :-1], axis=-1)
    t_abs = np.abs(w[..., -1])
    r, t_abs = np.broadcast_arrays(np.atleast_1d(r), np.atleast_1d(t_abs))
    r, t_abs = r.astype(float), t_abs.astype(float)
    out = np.empty_like(r)
    phis = np.zeros_like(r)
    flat = t_abs == 0
    axis = (r == 0) & ~flat
    out[flat] = r[flat]
    out[axis] = np.sqrt(np.pi * t_abs[axis])
    phis[axis] = TWO_PI
    gen = ~(flat | axis)
    if np.any(gen):
        phi, width = _solve_turning(r[gen], t_abs[gen], cfg.tol, cfg.max_iter)
        est = _length_from_turning(phi, r[gen], t_abs[gen])
        bad = (width > cfg.tol * TWO_PI * 1.0001) | ~np.isfinite(est)
        if np.any(bad):
            raise UnconvergedError(
                f"turning-angle bisection did not converge for {int(bad.sum())} target(s)",
                best_bound=float(np.nanmax(est)),
            )
        out[gen] = est
        phis[gen] = phi
    return out, phis


def cc_dist(p, q, cfg: CCSolverConfig | None = None):
    """CC distance between ``p`` and ``q``; vectorised over leading axes."""
    cfg = cfg or CCSolverConfig()
    p, q = _check_pair(p, q)
    w = group_mul(inverse(q), p)
    d, _ = _radial_dist(w, cfg)
    d = d.reshape(w.shape[:-1])
    return float(d) if d.ndim == 0 else d


def cc_geodesic(p, q, cfg: CCSolverConfig | None = None) -> GeodesicArc:
    """Unit speed minimising arc from ``p`` to ``q``."""
    cfg = cfg or CCSolverConfig()
    p, q = _check_pair(p, q)
    if p.ndim != 1:
        raise ValueError("cc_geodesic takes single points")
    w = group_mul(inverse(p), q)
    dist, phi = _radial_dist(w, cfg)
    L, phi = float(dist[0]), float(phi[0])
    zc = w[0:-1:2] + 1j * w[1:-1:2]
    r = np.linalg.norm(zc)
    sign = -1.0 if w[-1] > 0 else 1.0
    if r > 0:
        v = zc / r * np.exp(-0.5j * sign * phi)
    else:
        v = np.zeros_like(zc)
        v[0] = 1.0
    direction = np.empty(w.size - 1)
    direction[0::2], direction[1::2] = v.real, v.imag
    direction /= np.linalg.norm(direction)
    twist = sign * phi / L if L > 0 else 0.0
    return GeodesicArc(HeisPoint(p), direction, twist, L)


def _heis_endpoint(n):
    def endpoint(flat):
        u = flat.reshape(-1, 2 * n)
        dx, dy = u[:, 0::2], u[:, 1::2]
        total = u.sum(axis=0)
        before = np.cumsum(u, axis=0) - u
        after = total - np.cumsum(u, axis=0)
        px, py = before[:, 0::2], before[:, 1::2]
        t_end = 2.0 * np.sum(py * dx - px * dy)
        end = np.append(total, t_end)
        jac = np.zeros((2 * n + 1, u.size))
        eye = np.tile(np.eye(2 * n), (1, u.shape[0]))
        jac[:-1] = eye
        dt = np.empty_like(u)
        dt[:, 0::2] = 2.0 * (py - after[:, 1::2])
        dt[:, 1::2] = 2.0 * (after[:, 0::2] - px)
        jac[-1] = dt.ravel()
        return end, jac

    return endpoint


def cc_oracle(p, q, K: int = 64, restarts: int = 8, seed=0) -> OracleResult:
    """Shortest piecewise-constant-control horizontal path found from p to q.

    The target is left translated to the origin and dilated to unit
    Koranyi norm, so the endpoint residual is relative to that scale.
    """
    p, q = _check_pair(p, q)
    w = group_mul(inverse(p), q)
    n = (w.size - 1) // 2
    scale = float(koranyi_dist(q, p))
    if scale == 0:
        return OracleResult(0.0, 0.0, np.zeros((K, 2 * n)))
    target = w / scale
    target[-1] /= scale
    straight = np.tile(target[:-1] / K, (K, 1))
    best = penalty_search(_heis_endpoint(n), target, K, 2 * n, restarts,
                          seed=seed, initial=straight)
    return OracleResult(best.length * scale, best.residual * scale, best.controls * scale)


def eikonal_check(q, p, h: float = 1e-4, cfg: CCSolverConfig | None = None) -> float:
    """Finite-difference horizontal gradient norm of ``d_q`` at ``p``."""
    if not h > 0:
        raise ValueError("h must be positive")
    p, q = _check_pair(p, q)
    if in_center(group_mul(inverse(q), p), 10.0 * h):
        raise NearCenterError("p lies within 10h of the center coset of q")
    dim = p.size
    steps = np.zeros((2 * (dim - 1), dim))
    for k in range(dim - 1):
        steps[2 * k, k] = h
        steps[2 * k + 1, k] = -h
    # right translation by exp(hX) follows the flow of the left invariant field
    probes = group_mul(np.broadcast_to(p, steps.shape), steps)
    d = cc_dist(probes, np.broadcast_to(q, steps.shape), cfg)
    grads = (d[0::2] - d[1::2]) / (2.0 * h)
    return float(np.sqrt(np.sum(grads ** 2)))


@dataclass(frozen=True)
class ComparabilityReport:
    c_low: float
    c_high: float
    c_root: float
    koranyi_low: float
    koranyi_high: float
    pairs: int


def comparability_scan(box=(-1.0, 1.0), samples: int = 10_000, n: int = 1,
                       seed=0, cfg: CCSolverConfig | None = None) -> ComparabilityReport:
    """Empirical constants in ``|p-q|/C <= d_cc <= C |p-q|^(1/2)`` on a box.

    ``c_root`` is the single constant serving both sides.  The Koranyi ratio
    range ``d_cc / d_K`` is reported alongside.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    lo, hi = box
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (2 * n + 1,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (2 * n + 1,))
    rng = np.random.default_rng(seed)
    p = rng.uniform(lo, hi, size=(samples, 2 * n + 1))
    q = rng.uniform(lo, hi, size=(samples, 2 * n + 1))
    euclid = np.linalg.norm(p - q, axis=1)
    keep = euclid > 0
    p, q, euclid = p[keep], q[keep], euclid[keep]
    d = np.atleast_1d(cc_dist(p, q, cfg))
    dk = np.atleast_1d(koranyi_dist(p, q))
    c_low = float(np.max(euclid / d))
    c_high = float(np.max(d / np.sqrt(euclid)))
    ratio = d / dk
    return ComparabilityReport(c_low, c_high, max(c_low, c_high, 1.0),
                               float(ratio.min()), float(ratio.max()), int(keep.sum()))
