import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgbsde.geometry import DomainBox, TimeGrid, chart, chart_inverse, domain_bm, domain_gbm, periodize
from sgbsde.sparse_grid import Family, SparseGridSpace


def test_time_grid_nodes_end_exactly_at_horizon():
    for T, N in [(0.3, 10), (1.0, 7), (0.5, 3)]:
        grid = TimeGrid(T, N)
        assert grid.t(N) == T
        assert grid.h == T / N
        np.testing.assert_allclose(np.diff(grid.nodes), grid.h)


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(0.0, 3)
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0)


def test_domain_bm_unit_time():
    grid = TimeGrid(2.0, 2)  # t_1 = 1
    box = domain_bm(0.0, 0.0, 1.0, 2.0, grid, dim=3)
    lo, hi = box.bounds(1)
    np.testing.assert_allclose(lo, -2.0)
    np.testing.assert_allclose(hi, 2.0)


def test_domain_bm_width_grows_like_sqrt_t():
    grid = TimeGrid(1.0, 10)
    box = domain_bm(0.5, 0.0, 1 / np.sqrt(10), 2.5, grid, dim=10)
    widths = box.upper[:, 0] - box.lower[:, 0]
    t = grid.nodes[1:-1]
    np.testing.assert_allclose(widths / widths[0], np.sqrt(t / t[0]))
    np.testing.assert_allclose(0.5 * (box.upper + box.lower), 0.5)


def test_domain_gbm_without_drift_correction():
    grid = TimeGrid(0.5, 10)
    sigma, r = 0.2, 2.5
    box = domain_gbm(100.0, sigma**2 / 2, sigma, r, grid, dim=20)
    t = grid.nodes[1:-1, None]
    np.testing.assert_allclose(box.lower, 100 * np.exp(-r * sigma * np.sqrt(t)) * np.ones((1, 20)))
    np.testing.assert_allclose(box.upper, 100 * np.exp(r * sigma * np.sqrt(t)) * np.ones((1, 20)))


def test_domain_gbm_positive_and_rejects_bad_start():
    grid = TimeGrid(0.5, 10)
    box = domain_gbm(100.0, 0.06, 0.2, 5.0, grid, dim=2)
    assert np.all(box.lower > 0)
    with pytest.raises(ValueError):
        domain_gbm(-1.0, 0.06, 0.2, 2.0, grid, dim=2)


def test_domain_box_validation():
    with pytest.raises(ValueError):
        DomainBox(np.ones((2, 2)), np.ones((2, 2)))
    with pytest.raises(IndexError):
        domain_bm(0.0, 0.0, 1.0, 2.0, TimeGrid(1.0, 4), dim=1).bounds(0)


def test_chart_corners_and_midpoint():
    box = domain_bm(0.0, 0.1, 1.0, 2.0, TimeGrid(1.0, 4), dim=3)
    lo, hi = box.bounds(2)
    np.testing.assert_allclose(chart(box, 2, lo), 0.0)
    np.testing.assert_allclose(chart(box, 2, hi), 1.0)
    np.testing.assert_allclose(chart(box, 2, 0.5 * (lo + hi)), 0.5)


def test_chart_round_trip():
    box = domain_gbm(100.0, 0.06, 0.2, 2.0, TimeGrid(0.5, 10), dim=4)
    x = np.random.default_rng(0).uniform(50, 150, size=(100, 4))
    for n in (1, 5, 9):
        np.testing.assert_allclose(chart_inverse(box, n, chart(box, n, x)), x, rtol=1e-14)


def test_periodize_examples():
    np.testing.assert_allclose(periodize(1.3), 0.3)
    assert periodize(-0.25) == 0.75
    assert periodize(3.0) == 0.0
    assert periodize(-1e-18) == 0.0  # rounds to 1.0, wrapped back


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-50, 50, allow_nan=False), min_size=3, max_size=3),
    st.lists(st.integers(-3, 3), min_size=3, max_size=3),
)
def test_periodize_idempotent_and_periodic(x, q):
    x = np.array(x)
    p = periodize(x)
    assert np.all((p >= 0) & (p < 1))
    np.testing.assert_array_equal(periodize(p), p)
    np.testing.assert_allclose(periodize(x + np.array(q)), p, atol=1e-12)


@pytest.mark.parametrize("family", [Family.PREWAVELET, Family.MODHAT])
def test_periodization_identity(family):
    # sum over integer shifts of a [0,1]^d supported function equals the
    # function at the fractional part
    space = SparseGridSpace(2, 3, family)
    rng = np.random.default_rng(4)
    shifts = np.array(np.meshgrid(*[np.arange(-2, 3)] * 2)).reshape(2, -1).T
    for x in rng.uniform(-2, 2, size=(25, 2)):
        if np.any(np.isclose(x, np.round(x), atol=1e-9)):
            continue
        wrapped = space.eval_batch(x + shifts).sum(axis=0)
        np.testing.assert_allclose(wrapped, space.eval_batch(periodize(x)[None])[0], atol=1e-12)
