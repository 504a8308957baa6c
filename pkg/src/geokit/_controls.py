"""Penalty-continuation search over piecewise-constant horizontal controls.

A path is a list of ``K`` control increments ``u_k`` in R^m.  The caller
supplies an endpoint map ``u -> (end, jac)`` and the Euclidean norm of each
increment is its horizontal length.  We minimise the discrete energy
``K * sum |u_k|^2`` (whose minimisers have constant speed, hence minimal
length) plus ``mu * |end - target|^2`` and grow ``mu`` tenfold per stage.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

EndpointFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class OracleResult:
    length: float
    residual: float
    controls: np.ndarray

    def __float__(self):
        return self.length


def max_threads() -> int:
    try:
        return max(1, int(os.environ.get("GEOKIT_THREADS", "1")))
    except ValueError:
        return 1


def _project(endpoint: EndpointFn, target, u, residual, steps: int = 8):
    """Least-norm Gauss-Newton steps onto ``endpoint(u) = target``.

    The penalty stage leaves a small endpoint gap; closing it makes the
    reported length that of a path that really reaches the target, so it
    is an upper bound for the distance.
    """
    for _ in range(steps):
        if residual <= 1e-15:
            break
        end, jac = endpoint(u)
        du = np.linalg.lstsq(jac, end - target, rcond=None)[0]
        trial = u - du
        r = float(np.linalg.norm(endpoint(trial)[0] - target))
        if not r < residual:
            break
        u, residual = trial, r
    return u, residual


def _one_start(endpoint: EndpointFn, target, u0, K, m, mu0, mu_max, res_tol, maxiter):
    u = u0.ravel().copy()
    mu = mu0

    def objective(flat):
        end, jac = endpoint(flat)
        gap = end - target
        f = K * flat @ flat + mu * gap @ gap
        g = 2.0 * K * flat + 2.0 * mu * (jac.T @ gap)
        return f, g

    while True:
        res = minimize(objective, u, jac=True, method="L-BFGS-B",
                       options={"maxiter": maxiter, "gtol": 1e-12, "ftol": 1e-15})
        u = res.x
        residual = float(np.linalg.norm(endpoint(u)[0] - target))
        if residual <= res_tol or mu >= mu_max:
            break
        mu *= 10.0
    u, residual = _project(endpoint, target, u, residual)
    lengths = np.linalg.norm(u.reshape(K, m), axis=1)
    return OracleResult(float(lengths.sum()), residual, u.reshape(K, m))


def penalty_search(endpoint: EndpointFn, target, K: int, m: int, restarts: int,
                   seed=0, initial=None, res_tol: float = 1e-6,
                   mu0: float = 1.0, mu_max: float = 1e12, maxiter: int = 2000) -> OracleResult:
    """Best path over ``restarts`` randomised starts (plus ``initial`` if given).

    Paths within ``res_tol`` of the target compete on length; if none reach
    it the smallest residual wins.
    """
    if K < 2:
        raise ValueError("need at least 2 controls per path")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    target = np.asarray(target, dtype=float)
    children = np.random.SeedSequence(seed).spawn(restarts)
    starts = []
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        if i == 0 and initial is not None:
            starts.append(np.asarray(initial, dtype=float).reshape(K, m)
                          + 1e-3 * rng.standard_normal((K, m)) / K)
        else:
            starts.append(rng.standard_normal((K, m)) / np.sqrt(K))

    def run(u0):
        return _one_start(endpoint, target, u0, K, m, mu0, mu_max, res_tol, maxiter)

    workers = min(max_threads(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(u0) for u0 in starts]

    feasible = [r for r in results if r.residual <= res_tol]
    if feasible:
        return min(feasible, key=lambda r: r.length)
    return min(results, key=lambda r: r.residual)
