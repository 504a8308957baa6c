import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from geokit.ccmetric import (
    CCSolverConfig,
    GeodesicArc,
    NearCenterError,
    UnconvergedError,
    cc_dist,
    cc_geodesic,
    cc_oracle,
    comparability_scan,
    eikonal_check,
    geodesic_point,
)
from geokit.curves import SampledCurve, contact_defect
from geokit.heisenberg import HeisPoint, dilate, group_mul, koranyi_dist
from oracles import CC_FROZEN

coord = st.floats(-1.0, 1.0, allow_nan=False)
point = arrays(float, 3, elements=coord)


@pytest.mark.parametrize("r, t, expected", CC_FROZEN)
def test_cc_dist_against_frozen_values(r, t, expected):
    assert cc_dist([0, 0, 0], [r, 0, t]) == pytest.approx(expected, rel=1e-11)


def test_axis_scaling_law():
    # d(o, (0, r^2 t)) = r d(o, (0, t))
    base = cc_dist([0, 0, 0], [0, 0, 1.0])
    for r in (0.1, 2.0, 7.5):
        assert cc_dist([0, 0, 0], [0, 0, r * r]) == pytest.approx(r * base, rel=1e-12)


@pytest.mark.parametrize("z", [[1, 0], [0.3, -0.4], [-2, 5]])
def test_lines_through_origin(z):
    assert cc_dist([0, 0, 0], [*z, 0]) == pytest.approx(np.hypot(*z), rel=1e-14)


def test_rotational_reduction():
    rng = np.random.default_rng(3)
    for _ in range(20):
        r, t, a = rng.uniform(0.1, 1), rng.uniform(-1, 1), rng.uniform(0, 2 * np.pi)
        assert cc_dist([0, 0, 0], [r * np.cos(a), r * np.sin(a), t]) == pytest.approx(
            cc_dist([0, 0, 0], [r, 0, t]), rel=1e-12)


def test_higher_dimension_depends_on_modulus():
    p = np.array([0.3, 0.1, -0.2, 0.4, 0.5])
    r = np.linalg.norm(p[:4])
    assert cc_dist(np.zeros(5), p) == pytest.approx(cc_dist([0, 0, 0], [r, 0, 0.5]), rel=1e-12)


def test_geodesic_point_examples():
    arc = GeodesicArc(HeisPoint.origin(1), np.array([1.0, 0.0]), 0.0, 2.0)
    assert np.allclose(geodesic_point(arc, 1.0), [1, 0, 0])
    assert np.allclose(geodesic_point(arc, 0.0), [0, 0, 0])
    for s in (-0.1, 2.1):
        with pytest.raises(ValueError):
            geodesic_point(arc, s)
    with pytest.raises(ValueError):
        GeodesicArc(HeisPoint.origin(1), np.array([1.0, 1.0]), 0.0, 1.0)


@pytest.mark.parametrize("q", [[0.4, -0.3, 0.5], [0.0, 0.0, -1.0], [1.0, 2.0, 0.0],
                               [0.2, 0.1, 3.0]])
def test_cc_geodesic_hits_target_and_is_horizontal(q):
    p = np.array([0.1, 0.2, -0.3])
    arc = cc_geodesic(p, q)
    assert arc.duration == pytest.approx(cc_dist(p, q), rel=1e-12)
    assert np.allclose(geodesic_point(arc, arc.duration), q, atol=1e-9)
    s = np.linspace(0, arc.duration, 2001)
    curve = SampledCurve(s, geodesic_point(arc, s))
    assert contact_defect(curve) < 1e-5
    fine = SampledCurve(np.linspace(0, arc.duration, 4001),
                        geodesic_point(arc, np.linspace(0, arc.duration, 4001)))
    assert contact_defect(fine) < contact_defect(curve) / 3


def test_oracle_trivial_examples():
    assert cc_oracle([0.1, 0.2, 0.3], [0.1, 0.2, 0.3]).length == 0.0
    res = cc_oracle([0, 0, 0], [1, 0, 0], K=32)
    assert res.length == pytest.approx(1.0, rel=1e-2)


def test_oracle_agrees_on_axis_point():
    res = cc_oracle([0, 0, 0], [0, 0, 1.0])
    assert res.residual < 1e-6
    assert res.length == pytest.approx(np.sqrt(np.pi), rel=2e-2)
    assert cc_dist([0, 0, 0], [0, 0, 1.0]) <= res.length + 1e-9


def test_oracle_is_deterministic():
    a = cc_oracle([0, 0, 0], [0.3, 0.2, 0.4], K=16, restarts=2, seed=5)
    b = cc_oracle([0, 0, 0], [0.3, 0.2, 0.4], K=16, restarts=2, seed=5)
    assert a.length == b.length
    assert np.array_equal(a.controls, b.controls)


def test_eikonal_examples():
    assert eikonal_check([0, 0, 0], [1, 0, 0], 1e-4) == pytest.approx(1.0, abs=1e-3)
    assert eikonal_check([0, 0, 0], [0.3, -0.7, 0.2], 1e-4) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(NearCenterError):
        eikonal_check([0, 0, 0], [0, 0, 1], 1e-4)
    with pytest.raises(ValueError):
        eikonal_check([0, 0, 0], [1, 0, 0], 0.0)


def test_unconverged_error_carries_bound():
    cfg = CCSolverConfig(max_iter=2)
    with pytest.raises(UnconvergedError) as info:
        cc_dist([0, 0, 0], [0.3, 0.0, 2.0], cfg)
    assert info.value.best_bound is not None and info.value.best_bound > 0


def test_config_validation():
    with pytest.raises(ValueError):
        CCSolverConfig(controls_per_path=1)
    with pytest.raises(ValueError):
        CCSolverConfig(restarts=0)


@settings(max_examples=100, deadline=None)
@given(point, point, point)
def test_left_invariance_and_symmetry(g, p, q):
    d = cc_dist(p, q)
    assert cc_dist(group_mul(g, p), group_mul(g, q)) == pytest.approx(d, rel=1e-9, abs=1e-9)
    assert cc_dist(q, p) == pytest.approx(d, rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(point, point, st.floats(0.05, 20.0))
def test_dilation_scaling(p, q, r):
    d = cc_dist(p, q)
    assert cc_dist(dilate(r, p), dilate(r, q)) == pytest.approx(r * d, rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(point, point, point)
def test_triangle_inequality(p, q, w):
    assert cc_dist(p, w) <= cc_dist(p, q) + cc_dist(q, w) + 1e-9


def test_koranyi_bounds_on_random_pairs():
    rng = np.random.default_rng(1)
    p, q = rng.uniform(-1, 1, (2, 2000, 3))
    ratio = cc_dist(p, q) / koranyi_dist(p, q)
    # the CC distance dominates the Koranyi gauge and is within sqrt(pi) of it
    assert ratio.min() >= 1.0 - 1e-12
    assert ratio.max() <= np.sqrt(np.pi) + 1e-12


def test_comparability_scan_is_stable():
    a = comparability_scan(samples=5000, seed=0)
    b = comparability_scan(samples=10000, seed=0)
    assert np.isfinite([a.c_low, a.c_high]).all()
    assert b.c_low == pytest.approx(a.c_low, rel=0.1)
    assert b.c_high == pytest.approx(a.c_high, rel=0.1)
    assert a.c_root >= max(a.c_low, a.c_high)
    with pytest.raises(ValueError):
        comparability_scan(samples=1)


def test_comparability_on_planar_lines():
    rep = comparability_scan(box=([-1, -1, 0], [1, 1, 0]), samples=500)
    # with t = 0 the Euclidean gap is |dz|, and projection to C is 1-Lipschitz
    assert rep.c_low <= 1.0 + 1e-12


def test_thread_cap_does_not_change_results(monkeypatch):
    base = cc_oracle([0, 0, 0], [0.2, -0.4, 0.3], K=16, restarts=4, seed=11)
    monkeypatch.setenv("GEOKIT_THREADS", "3")
    threaded = cc_oracle([0, 0, 0], [0.2, -0.4, 0.3], K=16, restarts=4, seed=11)
    assert threaded.length == base.length
    assert np.array_equal(threaded.controls, base.controls)
