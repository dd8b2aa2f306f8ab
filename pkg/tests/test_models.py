import numpy as np
import pytest

from sgbsde.models import MODELS, make_model


def pde_residual(model, t, x, ht=1e-5, hx=1e-4):
    """Central-difference value of du/dt + L u + f(t, x, u, sigma^T grad u)."""
    d = model.dim
    u = lambda s, y: float(model.exact(s, y))
    ut = (u(t + ht, x) - u(t - ht, x)) / (2 * ht)
    grad = np.empty(d)
    lap = 0.0
    sig = model.sigma_diag(x)
    for j in range(d):
        e = np.zeros(d)
        e[j] = hx
        up, dn = u(t, x + e), u(t, x - e)
        grad[j] = (up - dn) / (2 * hx)
        lap += sig[j] ** 2 * (up - 2 * u(t, x) + dn) / hx**2
    gen = model.drift(x) @ grad + 0.5 * lap
    return ut + gen + model.driver(t, x, u(t, x), sig * grad), sig * grad


def quadratic_exact(d, T):
    # log E[exp g(x + W_tau)] = log((1 + |x|^2 + d tau) / 2); this solves the
    # PDE whose driver is |z|^2 / 2
    return lambda t, x: np.log(0.5 * (1 + np.sum(np.asarray(x) ** 2, axis=-1) + d * (T - t)))


@pytest.mark.parametrize("name,d", [("periodic", 1), ("periodic", 3), ("challenging", 1), ("challenging", 4)])
def test_closed_form_pde_residual(name, d):
    model = make_model(name, d)
    rng = np.random.default_rng(d)
    for _ in range(50):
        t = rng.uniform(0.05, 0.95) * model.horizon
        x = rng.uniform(-1, 1, d)
        # keep away from the kink of the challenging solution at x_j = 0
        x = np.where(np.abs(x) < 0.05, 0.3, x)
        res, z = pde_residual(model, t, x)
        assert abs(res) < 1e-3
        np.testing.assert_allclose(model.exact_z(t, x), z, atol=1e-5)


def test_quadratic_closed_form_solves_pde_with_half_coefficient():
    model = make_model("quadratic", 3, a=0.5)
    object.__setattr__(model, "exact", quadratic_exact(3, 1.0))
    rng = np.random.default_rng(9)
    for _ in range(20):
        res, _ = pde_residual(model, rng.uniform(0.1, 0.9), rng.normal(size=3))
        assert abs(res) < 1e-4


def test_quadratic_closed_form_misses_gradient_term_at_unit_coefficient():
    # with a = 1 the exponential-moment formula leaves |grad u|^2 / 2 over
    model = make_model("quadratic", 3, a=1.0)
    object.__setattr__(model, "exact", quadratic_exact(3, 1.0))
    rng = np.random.default_rng(9)
    for _ in range(10):
        res, z = pde_residual(model, rng.uniform(0.1, 0.9), rng.normal(size=3))
        assert res == pytest.approx(0.5 * z @ z, abs=1e-4)


@pytest.mark.parametrize("name", ["periodic", "challenging"])
def test_terminal_consistency(name):
    model = make_model(name, 3)
    x = np.random.default_rng(0).normal(size=(20, 3))
    np.testing.assert_allclose(model.terminal(x), model.exact(model.horizon, x), atol=1e-14)


def test_periodic_values():
    model = make_model("periodic", 3)
    assert model.exact(model.horizon, np.zeros(3)) == pytest.approx(1 / np.pi)


def test_periodic_coefficients_are_periodic():
    model = make_model("periodic", 3)
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, size=(30, 3))
    q = rng.integers(-3, 4, size=(30, 3))
    np.testing.assert_allclose(model.drift(x + q), model.drift(x), atol=1e-12)
    np.testing.assert_allclose(model.sigma_diag(x + q), model.sigma_diag(x), atol=1e-12)
    y, z = rng.normal(size=30), rng.normal(size=(30, 3))
    np.testing.assert_allclose(model.driver(0.1, x + q, y, z), model.driver(0.1, x, y, z), atol=1e-10)


def test_quadratic_examples():
    model = make_model("quadratic", 4, a=0.7)
    z = np.random.default_rng(2).normal(size=4)
    assert model.driver(0, np.zeros(4), 1.3, np.zeros(4)) == 0.0
    assert model.driver_dz(0, None, 0.0, z) @ z == pytest.approx(2 * 0.7 * z @ z)
    assert model.terminal(np.zeros(4)) == pytest.approx(np.log(0.5))


def test_financial_examples():
    model = make_model("financial", 3)
    assert model.terminal(np.array([100.0, 120.0, 90.0])) == pytest.approx(10.0)
    assert model.terminal(np.array([140.0, 100.0, 90.0])) == pytest.approx(10.0)
    assert model.terminal(np.array([100.0, 105.0, 90.0])) == 0.0
    assert model.driver(0, np.full(3, 100.0), 0.0, np.zeros(3)) == 0.0


def test_financial_kink_uses_zero_subgradient():
    model = make_model("financial", 2)
    z = np.array([0.1, 0.1])
    y = z.sum() / 0.2  # exactly on the kink
    assert model.driver_dy(0, None, y, z) == pytest.approx(-0.04)
    np.testing.assert_allclose(model.driver_dz(0, None, y, z), -(0.06 - 0.04) / 0.2)


def test_challenging_values():
    one = make_model("challenging", 1)
    assert one.exact(0.0, np.array([0.5])) == pytest.approx(1.3776, abs=5e-5)
    ten = make_model("challenging", 10)
    assert ten.exact(0.0, np.full(10, 0.5)) == pytest.approx(-0.2149, abs=5e-5)
    x = np.random.default_rng(3).normal(size=(5, 10))
    np.testing.assert_allclose(ten.terminal(x), np.cos(x @ np.arange(1, 11)))


def test_bifurcation_examples():
    model = make_model("bifurcation", 2, a=-0.4)
    x = np.random.default_rng(4).normal(scale=5, size=(100, 2))
    g = model.terminal(x)
    assert np.all((g > 0) & (g < 1))
    assert model.driver(0, np.zeros(2), 0.0, np.zeros(2)) == 0.0
    assert model.driver_dy(0, None, 2.0, None) == pytest.approx(-0.4 / (1 + 0.64))


@pytest.mark.parametrize("name", sorted(MODELS))
def test_driver_gradients_match_finite_differences(name):
    d = 3
    model = make_model(name, d)
    rng = np.random.default_rng(5)
    eps = 1e-6
    for _ in range(20):
        t = rng.uniform(0, model.horizon)
        x = rng.uniform(0.1, 1, d) * (100 if name == "financial" else 1)
        y = rng.normal()
        z = rng.normal(size=d)
        if name == "financial" and abs(z.sum() / 0.2 - y) < 1e-3:
            continue
        f = lambda yy, zz: float(model.driver(t, x, yy, zz))
        dy = (f(y + eps, z) - f(y - eps, z)) / (2 * eps)
        assert float(model.driver_dy(t, x, y, z)) == pytest.approx(dy, rel=1e-6, abs=1e-8)
        dz = model.driver_dz(t, x, y, z)
        for j in range(d):
            e = np.zeros(d)
            e[j] = eps
            fd = (f(y, z + e) - f(y, z - e)) / (2 * eps)
            assert dz[j] == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_sigma_matrix_is_diagonal():
    model = make_model("periodic", 3)
    x = np.array([0.1, 0.2, 0.3])
    np.testing.assert_allclose(model.sigma(x), np.diag(model.sigma_diag(x)))


def test_unknown_model_lists_names():
    with pytest.raises(ValueError, match="periodic.*quadratic.*financial.*challenging.*bifurcation"):
        make_model("heston", 2)
