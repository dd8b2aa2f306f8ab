import numpy as np
import pytest

from sgbsde.models import make_model
from sgbsde.published import QUADRATIC_D5
from sgbsde.reference import UnsupportedError, cole_hopf, exact_y0, exact_z0

LOG3 = np.log(3.0)  # (1/a) log E[exp(a g)] at d = 5, a = 1, T = 1, x = 0


def test_closed_form_exponential_moment():
    # E[(1 + |W_1|^2) / 2] = (1 + d) / 2 for d = 5
    est = cole_hopf(make_model("quadratic", 5), 0.0, 0.0, 100_000, 0)
    assert abs(est.y0 - LOG3) < 4 * est.stderr


def test_published_interval_at_seed_zero():
    est = cole_hopf(make_model("quadratic", 5), 0.0, 0.0, 100_000, 0)
    lo, hi = QUADRATIC_D5["ci"]
    assert lo <= est.y0 <= hi
    assert est.ci_low <= est.y0 <= est.ci_high
    assert est.half_width == pytest.approx(0.0033, abs=0.0005)


def test_zero_coefficient_branch_is_plain_mean():
    model = make_model("quadratic", 3, a=0.0)
    est = cole_hopf(model, 0.0, 0.0, 50_000, 2)
    rng_pts = np.sqrt(model.horizon) * np.random.default_rng(0).standard_normal((400_000, 3))
    assert abs(est.y0 - model.terminal(rng_pts).mean()) < 4 * est.stderr + 0.005
    assert est.ci_high - est.y0 == pytest.approx(1.959963984540054 * est.stderr)


def test_gradient_vanishes_at_origin():
    est = cole_hopf(make_model("quadratic", 5), 0.0, 0.0, 100_000, 3)
    assert np.all(np.abs(est.z0) < 4 * est.z_stderr)


def test_gradient_points_outward_away_from_origin():
    est = cole_hopf(make_model("quadratic", 2), 0.0, [1.0, 0.0], 50_000, 3)
    assert est.z0[0] > 10 * est.z_stderr[0]
    assert abs(est.z0[1]) < 4 * est.z_stderr[1]


def test_two_seeds_agree():
    model = make_model("quadratic", 5)
    a = cole_hopf(model, 0.0, 0.0, 50_000, 11)
    b = cole_hopf(model, 0.0, 0.0, 50_000, 12)
    assert abs(a.y0 - b.y0) < 4 * np.hypot(a.stderr, b.stderr)
    assert a.y0 != b.y0


def test_interval_shrinks_like_inverse_root():
    model = make_model("quadratic", 5)
    small = cole_hopf(model, 0.0, 0.0, 10_000, 5)
    large = cole_hopf(model, 0.0, 0.0, 160_000, 5)
    assert large.half_width / small.half_width == pytest.approx(0.25, rel=0.15)


def test_chunking_does_not_change_estimate():
    model = make_model("quadratic", 3)
    a = cole_hopf(model, 0.0, 0.0, 30_000, 6, chunk=7_000)
    b = cole_hopf(model, 0.0, 0.0, 30_000, 6)
    assert a.y0 == pytest.approx(b.y0, rel=1e-12)


def test_interval_coverage():
    model = make_model("quadratic", 5)
    target = QUADRATIC_D5["reference"]
    hits = sum(
        est.ci_low <= target <= est.ci_high
        for est in (cole_hopf(model, 0.0, 0.0, 2000, 100 + s) for s in range(50))
    )
    assert hits >= 44


def test_argument_checks():
    with pytest.raises(UnsupportedError):
        cole_hopf(make_model("periodic", 2), 0.0, 0.0, 10_000, 0)
    with pytest.raises(ValueError):
        cole_hopf(make_model("quadratic", 2), 0.0, 0.0, 999, 0)


def test_exact_values():
    assert exact_y0(make_model("challenging", 1), 0.0, [0.5]) == pytest.approx(1.3776, abs=5e-5)
    assert exact_y0(make_model("challenging", 10), 0.0, np.full(10, 0.5)) == pytest.approx(-0.2149, abs=5e-5)
    periodic = make_model("periodic", 3)
    x = np.array([0.1, 0.7, 0.3])
    assert exact_y0(periodic, periodic.horizon, x) == pytest.approx(float(periodic.terminal(x)))
    assert exact_z0(periodic, 0.0, x).shape == (3,)


def test_exact_unsupported():
    with pytest.raises(UnsupportedError):
        exact_y0(make_model("financial", 2), 0.0, [100.0, 100.0])
    with pytest.raises(UnsupportedError):
        exact_z0(make_model("bifurcation", 2), 0.0, [0.0, 0.0])
