"""Benchmark semilinear PDEs in BSDE form.

Every callable is vectorised: points have shape ``(..., d)``, ``y`` has shape
``(...)`` and ``z`` has shape ``(..., d)``. The driver takes ``(t, x, y, z)``;
models whose driver ignores ``t`` or ``x`` simply do not use them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class ProcessKind(enum.Enum):
    BROWNIAN = "brownian"  # x0 + mu t + sigma W
    GBM = "gbm"  # x0 exp((mu - sigma^2/2) t + sigma W)
    UNIT = "unit"  # periodic setting, approximation on the unit cube


class InitialLaw(enum.Enum):
    DIRAC = "dirac"
    UNIFORM01 = "uniform01"


@dataclass(frozen=True, eq=False)
class ModelSpec:
    name: str
    dim: int
    horizon: float
    drift: Callable
    sigma_diag: Callable
    driver: Callable
    driver_dy: Callable
    driver_dz: Callable
    terminal: Callable
    initial_law: InitialLaw
    process_kind: ProcessKind
    x0: Optional[np.ndarray] = None
    process_mu: float = 0.0
    process_sigma: float = 1.0
    exact: Optional[Callable] = None
    exact_z: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    def sigma(self, x) -> np.ndarray:
        """Full volatility matrix; every shipped model has a diagonal one."""
        diag = self.sigma_diag(np.asarray(x, dtype=float))
        return diag[..., :, None] * np.eye(self.dim)

    @property
    def has_exact(self) -> bool:
        return self.exact is not None


def _sum(x):
    return np.sum(x, axis=-1)


def model_periodic(d: int, T: float = 0.3) -> ModelSpec:
    """1-periodic coefficients with a closed-form solution."""
    two_pi = 2.0 * np.pi

    def drift(x):
        return 0.2 * np.sin(two_pi * x)

    def sig(x):
        return (0.25 + 0.1 * np.cos(two_pi * x)) / np.sqrt(d * np.pi)

    def phase(t, x):
        return two_pi * _sum(x) + two_pi * (T - t)

    def forcing(t, x):
        p = phase(t, x)
        return 2.0 * (np.cos(p) - np.sin(p))

    def driver(t, x, y, z):
        s = sig(x)
        return 2 * np.pi**2 * y * _sum(s**2) - _sum(drift(x) * z / s) + forcing(t, x)

    def driver_dy(t, x, y, z):
        return np.broadcast_to(2 * np.pi**2 * _sum(sig(x) ** 2), np.shape(y))

    def driver_dz(t, x, y, z):
        return np.broadcast_to(-drift(x) / sig(x), np.shape(z))

    def exact(t, x):
        p = phase(t, np.asarray(x, dtype=float))
        return (np.sin(p) + np.cos(p)) / np.pi

    def exact_z(t, x):
        x = np.asarray(x, dtype=float)
        p = phase(t, x)
        grad = 2.0 * (np.cos(p) - np.sin(p))
        return sig(x) * grad[..., None]

    return ModelSpec(
        name="periodic", dim=d, horizon=T,
        drift=drift, sigma_diag=sig,
        driver=driver, driver_dy=driver_dy, driver_dz=driver_dz,
        terminal=lambda x: exact(T, x),
        initial_law=InitialLaw.UNIFORM01, process_kind=ProcessKind.UNIT,
        exact=exact, exact_z=exact_z,
    )


def model_quadratic(d: int, a: float = 1.0, T: float = 1.0) -> ModelSpec:
    """Driver ``a |z|^2``, terminal ``log((1 + |x|^2) / 2)``, X = W."""

    def driver(t, x, y, z):
        return a * _sum(z**2)

    def terminal(x):
        return np.log(0.5 * (1.0 + _sum(np.asarray(x, dtype=float) ** 2)))

    def terminal_grad(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * x / (1.0 + _sum(x**2))[..., None]

    return ModelSpec(
        name="quadratic", dim=d, horizon=T,
        drift=np.zeros_like, sigma_diag=np.ones_like,
        driver=driver,
        driver_dy=lambda t, x, y, z: np.zeros(np.shape(y)),
        driver_dz=lambda t, x, y, z: 2.0 * a * np.asarray(z),
        terminal=terminal,
        initial_law=InitialLaw.DIRAC, process_kind=ProcessKind.BROWNIAN,
        x0=np.zeros(d), process_mu=0.0, process_sigma=1.0,
        params={"a": a, "terminal_grad": terminal_grad},
    )


def model_financial(
    d: int,
    T: float = 0.5,
    mu: float = 0.06,
    sigma: float = 0.2,
    r_lend: float = 0.04,
    r_borrow: float = 0.06,
    k1: float = 110.0,
    k2: float = 130.0,
    x0: float = 100.0,
) -> ModelSpec:
    """Call spread on the maximum with different borrowing/lending rates."""

    def active(y, z):
        # kink at sum(z)/sigma == y: take the branch where the max term is 0
        return _sum(z) / sigma - y > 0

    def driver(t, x, y, z):
        s = _sum(z)
        return -r_lend * y - (mu - r_lend) / sigma * s + (r_borrow - r_lend) * np.maximum(0.0, s / sigma - y)

    def driver_dy(t, x, y, z):
        return -r_lend - (r_borrow - r_lend) * active(y, z)

    def driver_dz(t, x, y, z):
        g = -(mu - r_lend) / sigma + (r_borrow - r_lend) / sigma * active(y, z)
        return np.broadcast_to(np.asarray(g)[..., None], np.shape(z))

    def terminal(x):
        m = np.max(np.asarray(x, dtype=float), axis=-1)
        return np.maximum(m - k1, 0.0) - 2.0 * np.maximum(m - k2, 0.0)

    return ModelSpec(
        name="financial", dim=d, horizon=T,
        drift=lambda x: mu * np.asarray(x),
        sigma_diag=lambda x: sigma * np.asarray(x),
        driver=driver, driver_dy=driver_dy, driver_dz=driver_dz,
        terminal=terminal,
        initial_law=InitialLaw.DIRAC, process_kind=ProcessKind.GBM,
        x0=np.full(d, float(x0)), process_mu=mu, process_sigma=sigma,
        params=dict(mu=mu, sigma=sigma, r_lend=r_lend, r_borrow=r_borrow, k1=k1, k2=k2),
    )


def model_challenging(d: int, T: float = 1.0) -> ModelSpec:
    """Unbounded solution with oscillating cosine part; X = x0 + W / sqrt(d)."""
    weights = np.arange(1, d + 1, dtype=float)
    c = (d + 1) * (2 * d + 1) / 12.0
    vol = 1.0 / np.sqrt(d)

    def parts(x):
        x = np.asarray(x, dtype=float)
        neg = _sum(np.where(x < 0, np.sin(x), 0.0)) / d
        pos = _sum(np.where(x >= 0, x, 0.0)) / d
        return neg, pos

    def driver(t, x, y, z):
        neg, pos = parts(x)
        return (1.0 + (T - t) / (2 * d)) * neg + pos + c * np.cos(np.asarray(x) @ weights)

    def exact(t, x):
        neg, pos = parts(x)
        return (T - t) * (neg + pos) + np.cos(np.asarray(x, dtype=float) @ weights)

    def exact_z(t, x):
        x = np.asarray(x, dtype=float)
        slope = np.where(x < 0, np.cos(x), 1.0) * (T - t) / d
        grad = slope - np.sin(x @ weights)[..., None] * weights
        return vol * grad

    return ModelSpec(
        name="challenging", dim=d, horizon=T,
        drift=np.zeros_like, sigma_diag=lambda x: np.full(np.shape(x), vol),
        driver=driver,
        driver_dy=lambda t, x, y, z: np.zeros(np.shape(y)),
        driver_dz=lambda t, x, y, z: np.zeros(np.shape(z)),
        terminal=lambda x: np.cos(np.asarray(x, dtype=float) @ weights),
        initial_law=InitialLaw.DIRAC, process_kind=ProcessKind.BROWNIAN,
        x0=np.full(d, 0.5), process_mu=0.0, process_sigma=vol,
        exact=exact, exact_z=exact_z,
    )


def model_bifurcation(d: int = 2, a: float = -0.4, T: float = 1.0) -> ModelSpec:
    """Driver ``arctan(a y) + sum(z)``, logistic terminal, X = W."""

    def terminal(x):
        s = 1.0 + _sum(np.asarray(x, dtype=float))
        return 1.0 / (1.0 + np.exp(-s))

    return ModelSpec(
        name="bifurcation", dim=d, horizon=T,
        drift=np.zeros_like, sigma_diag=np.ones_like,
        driver=lambda t, x, y, z: np.arctan(a * np.asarray(y)) + _sum(z),
        driver_dy=lambda t, x, y, z: a / (1.0 + (a * np.asarray(y)) ** 2),
        driver_dz=lambda t, x, y, z: np.ones(np.shape(z)),
        terminal=terminal,
        initial_law=InitialLaw.DIRAC, process_kind=ProcessKind.BROWNIAN,
        x0=np.zeros(d), process_mu=0.0, process_sigma=1.0,
        params={"a": a},
    )


MODELS = {
    "periodic": model_periodic,
    "quadratic": model_quadratic,
    "financial": model_financial,
    "challenging": model_challenging,
    "bifurcation": model_bifurcation,
}


def make_model(name: str, dim: int, **params) -> ModelSpec:
    try:
        factory = MODELS[name]
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; valid names: {', '.join(MODELS)}"
        ) from None
    return factory(dim, **params)
