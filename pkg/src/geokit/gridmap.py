"""Maps sampled on regular grids, and their horizontal Sobolev energy.

A :class:`GridMap` stores values on the full box of nodes together with a
mask of the nodes that belong to the domain (a box, or a ball with an
optional puncture at the origin).  Partial derivatives are central where
both neighbours are in the domain and one-sided where only one is.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "GridMap",
    "ContactError",
    "cavitation",
    "sample_on_box",
    "sample_on_ball",
    "compose_on_grid",
    "partials",
    "frame_decompose",
    "contact_residual",
    "horizontal_gradient_norm",
    "horizontal_energy",
    "annular_energies",
    "write_gridmap",
    "read_gridmap",
]


class ContactError(ValueError):
    pass


@dataclass(frozen=True)
class GridMap:
    lower: np.ndarray
    h: float
    values: np.ndarray
    mask: np.ndarray
    exclusion_radius: float = 0.0
    codomain: str = "heisenberg"
    domain: str = "box"

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        if self.values.shape[:-1] != self.mask.shape:
            raise ValueError("values and mask disagree on the grid shape")
        if self.codomain not in ("heisenberg", "euclidean"):
            raise ValueError(f"unknown codomain {self.codomain!r}")

    @property
    def m(self) -> int:
        return self.mask.ndim

    @property
    def k(self) -> int:
        return self.values.shape[-1]

    def axes(self) -> list[np.ndarray]:
        return [lo + self.h * np.arange(N) for lo, N in zip(self.lower, self.mask.shape)]

    def nodes(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.nodes(), axis=-1)


def cavitation(x) -> np.ndarray:
    """Radial projection ``x / |x|``."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(r == 0):
        raise ValueError("the radial projection is undefined at the origin")
    return x / r


def _grid_axes(lo, hi, h):
    count = int(np.floor((hi - lo) / h + 1e-9)) + 1
    return lo + h * np.arange(count)


def sample_on_box(func, lower, upper, h: float, codomain="heisenberg") -> GridMap:
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.broadcast_to(np.asarray(upper, dtype=float), lower.shape)
    axes = [_grid_axes(lo, hi, h) for lo, hi in zip(lower, upper)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.asarray(func(pts), dtype=float)
    mask = np.ones(pts.shape[:-1], dtype=bool)
    return GridMap(lower, h, vals, mask, 0.0, codomain, "box")


def sample_on_ball(func, m: int, h: float, eps: float = 0.0, radius: float = 1.0,
                   codomain="heisenberg") -> GridMap:
    """Sample ``func`` at nodes of ``h Z^m`` with ``eps <= |x| <= radius``."""
    half = int(np.floor(radius / h + 1e-9))
    ax = h * np.arange(-half, half + 1)
    pts = np.stack(np.meshgrid(*([ax] * m), indexing="ij"), axis=-1)
    r = np.linalg.norm(pts, axis=-1)
    mask = (r <= radius + 1e-12) & (r >= eps)
    if eps > 0:
        mask &= r > 0
    inside = np.asarray(func(pts[mask]), dtype=float)
    vals = np.full(pts.shape[:-1] + (inside.shape[-1],), np.nan)
    vals[mask] = inside
    return GridMap(np.full(m, ax[0]), h, vals, mask, float(eps), codomain, "ball")


def compose_on_grid(embedding, m: int, h: float, eps: float) -> GridMap:
    """Sample ``x -> embedding(x / |x|)`` on the punctured unit ball of R^m."""
    if eps < 2 * h:
        raise ValueError("exclusion radius must be at least 2h")
    return sample_on_ball(lambda x: embedding(cavitation(x)), m, h, eps)


def partials(f: GridMap, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Derivative along grid axis ``axis`` and the mask where it is central."""
    v, mask, h = f.values, f.mask, f.h

    def shift(a, step, fill):
        out = np.full_like(a, fill)
        src = [slice(None)] * a.ndim
        dst = [slice(None)] * a.ndim
        if step > 0:
            src[axis], dst[axis] = slice(step, None), slice(None, -step)
        else:
            src[axis], dst[axis] = slice(None, step), slice(-step, None)
        out[tuple(dst)] = a[tuple(src)]
        return out

    fwd_ok = mask & shift(mask, 1, False)
    bwd_ok = mask & shift(mask, -1, False)
    fwd = shift(v, 1, np.nan)
    bwd = shift(v, -1, np.nan)
    with np.errstate(invalid="ignore"):
        central = (fwd - bwd) / (2 * h)
        forward = (fwd - v) / h
        backward = (v - bwd) / h
    both = fwd_ok & bwd_ok
    d = np.where(both[..., None], central,
                 np.where(fwd_ok[..., None], forward,
                          np.where(bwd_ok[..., None], backward, 0.0)))
    d[~mask] = np.nan
    return d, both


def frame_decompose(values: np.ndarray, deriv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split an ambient derivative into frame coefficients and vertical residual.

    The coefficients are the z-components themselves; the residual is
    ``dt - 2 sum_j (y_j dx_j - x_j dy_j)``, zero for horizontal derivatives.
    """
    coeffs = deriv[..., :-1]
    x, y = values[..., 0:-1:2], values[..., 1:-1:2]
    dx, dy = deriv[..., 0:-1:2], deriv[..., 1:-1:2]
    resid = deriv[..., -1] - 2.0 * np.sum(y * dx - x * dy, axis=-1)
    return coeffs, resid


def _region(f: GridMap, region):
    sel = f.mask.copy()
    if region is not None:
        r = f.radii()
        rmin, rmax = region
        sel &= (r >= rmin) & (r < rmax)
    return sel


def _energy_terms(f: GridMap, region):
    if f.codomain != "heisenberg":
        raise ValueError("horizontal energy needs a Heisenberg-valued map")
    sel = _region(f, region)
    grad2 = np.zeros(f.mask.shape)
    resid = np.zeros(f.mask.shape)
    for axis in range(f.m):
        d, central = partials(f, axis)
        coeffs, res = frame_decompose(f.values, d)
        grad2 += np.where(sel, np.sum(coeffs ** 2, axis=-1), 0.0)
        res = np.where(central & sel, np.abs(res), 0.0)
        resid = np.maximum(resid, res)
    return sel, grad2, resid


def contact_residual(f: GridMap, region=None, relative: bool = False) -> float:
    """Max contact-equation residual over nodes with central stencils.

    With ``relative=True`` each node's residual is divided by
    ``max(|grad f|_H, 1)``.
    """
    sel, grad2, resid = _energy_terms(f, region)
    if relative:
        resid = resid / np.maximum(np.sqrt(grad2), 1.0)
    return float(resid[sel].max(initial=0.0))


def horizontal_gradient_norm(f: GridMap) -> np.ndarray:
    _, grad2, _ = _energy_terms(f, None)
    out = np.sqrt(grad2)
    out[~f.mask] = np.nan
    return out


def horizontal_energy(f: GridMap, p: float, region=None, tol: float | None = 0.05) -> float:
    """``sum |grad f|_H^p h^m`` over the domain (optionally an annulus).

    ``tol`` bounds the relative contact residual; pass ``None`` to skip the
    check.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    sel, grad2, resid = _energy_terms(f, region)
    if tol is not None:
        rel = resid / np.maximum(np.sqrt(grad2), 1.0)
        worst = float(rel[sel].max(initial=0.0))
        if worst > tol:
            raise ContactError(f"relative contact residual {worst:.3e} exceeds {tol:.1e}")
    return float(np.sum(grad2[sel] ** (0.5 * p)) * f.h ** f.m)


def annular_energies(f: GridMap, p: float, radii, tol: float | None = 0.05) -> np.ndarray:
    """Energy in each annulus ``radii[i] <= |x| < radii[i+1]``."""
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must increase")
    r = f.radii()
    sel, grad2, resid = _energy_terms(f, (radii[0], radii[-1]))
    if tol is not None:
        rel = resid / np.maximum(np.sqrt(grad2), 1.0)
        worst = float(rel[sel].max(initial=0.0))
        if worst > tol:
            raise ContactError(f"relative contact residual {worst:.3e} exceeds {tol:.1e}")
    dens = grad2 ** (0.5 * p) * f.h ** f.m
    return np.array([dens[sel & (r >= a) & (r < b)].sum()
                     for a, b in zip(radii[:-1], radii[1:])])


def write_gridmap(f: GridMap, path) -> tuple[Path, Path]:
    """CSV ``i1..im,val1..valk`` for domain nodes plus a JSON sidecar."""
    path = Path(path)
    idx = np.argwhere(f.mask)
    vals = f.values[f.mask]
    header = ",".join([f"i{j + 1}" for j in range(f.m)] + [f"val{j + 1}" for j in range(f.k)])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i, v in zip(idx, vals):
            fh.write(",".join(map(str, i)) + "," + ",".join(repr(float(x)) for x in v) + "\n")
    meta = {
        "m": f.m, "k": f.k, "h": f.h, "exclusion_radius": f.exclusion_radius,
        "codomain": f.codomain, "domain": f.domain,
        "lower": [float(x) for x in f.lower], "shape": list(f.mask.shape),
    }
    side = path.with_suffix(".json")
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path, side


def read_gridmap(path) -> GridMap:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    m, k = meta["m"], meta["k"]
    shape = tuple(meta.get("shape") or (data[:, :m].max(axis=0).astype(int) + 1))
    lower = np.asarray(meta.get("lower", np.zeros(m)), dtype=float)
    idx = data[:, :m].astype(int)
    mask = np.zeros(shape, dtype=bool)
    mask[tuple(idx.T)] = True
    vals = np.full(shape + (k,), np.nan)
    vals[tuple(idx.T)] = data[:, m:]
    return GridMap(lower, float(meta["h"]), vals, mask, float(meta["exclusion_radius"]),
                   meta["codomain"], meta.get("domain", "box"))
