"""Robbins-Monro solvers: the direct algorithm and the Picard iteration.

Both solvers draw one fresh path per step. Paths and their basis values are
generated in chunks for speed, but updates stay strictly sequential in the
step index, so results do not depend on the chunk size.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .geometry import TimeGrid
from .models import InitialLaw, ModelSpec
from .parametrization import Coefficients, SpaceLayout, frozen_target
from .simulation import PathBatch, derive_seed, entry_generator, simulate

GROUPS = ("y", "z0", "zn")
DIVERGENCE_BOUND = 1e8
_CHECK_EVERY = 64
_CHUNK_FLOATS = 4_000_000


class DivergenceError(RuntimeError):
    def __init__(self, message: str, last_finite_step: int):
        super().__init__(message)
        self.last_finite_step = last_finite_step


# ---------------------------------------------------------------------------
# learning rates


@dataclass(frozen=True)
class GroupRate:
    """``(beta1 n + beta0) / (1 + (m + m0)^alpha)``."""

    alpha: float
    beta1: float
    beta0: float
    m0: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.beta0 < 0 or self.beta1 < 0 or self.m0 < 0:
            raise ValueError("beta0, beta1 and m0 must be non-negative")

    def __call__(self, n, m):
        return (self.beta1 * n + self.beta0) / (1.0 + (m + self.m0) ** self.alpha)

    def scaled(self, factor: float) -> "GroupRate":
        return replace(self, beta0=self.beta0 * factor, beta1=self.beta1 * factor)


@dataclass(frozen=True)
class EmpiricalSchedule:
    y: GroupRate
    z0: GroupRate
    zn: GroupRate

    def group(self, name: str) -> GroupRate:
        if name not in GROUPS:
            raise KeyError(f"unknown rate group {name!r}")
        return getattr(self, name)

    def scaled(self, factor: float) -> "EmpiricalSchedule":
        return EmpiricalSchedule(self.y.scaled(factor), self.z0.scaled(factor), self.zn.scaled(factor))


@dataclass(frozen=True)
class PowerLaw:
    """``gamma m^-rho``; the ``z`` groups are divided by ``sqrt(h)``."""

    gamma: float
    rho: float
    theory: bool = False

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.theory and not 0.5 < self.rho < 1:
            raise ValueError("theory mode needs rho in (1/2, 1)")

    def scaled(self, factor: float) -> "PowerLaw":
        return replace(self, gamma=self.gamma * factor)


Schedule = Union[EmpiricalSchedule, PowerLaw]


def rate(schedule: Schedule, group: str, n, m, h: Optional[float] = None):
    """Step size for ``group`` at time index ``n`` and SGD step ``m >= 1``."""
    if isinstance(schedule, PowerLaw):
        if group not in GROUPS:
            raise KeyError(f"unknown rate group {group!r}")
        g = schedule.gamma * float(m) ** -schedule.rho
        if group != "y" and h is not None:
            g = g / np.sqrt(h)
        return g * np.ones_like(np.asarray(n, dtype=float))
    return schedule.group(group)(np.asarray(n, dtype=float), m)


def _step_rates(schedule, m, steps, h):
    ns = np.arange(1, steps)
    return (
        float(rate(schedule, "y", 0, m, h)),
        float(rate(schedule, "z0", 0, m, h)),
        rate(schedule, "zn", ns, m, h),
    )


# ---------------------------------------------------------------------------
# reports


@dataclass
class IterationRecord:
    p: int
    y0: float
    z0: Optional[np.ndarray]
    mse: Optional[float] = None
    mse_fresh: Optional[float] = None


@dataclass
class SolveReport:
    algorithm: str
    coeffs: Coefficients
    y0: float
    z0: Optional[np.ndarray]
    trace: np.ndarray  # estimate of Y_0 after every step (last iteration for Picard)
    iterations: list = field(default_factory=list)
    mse: Optional[float] = None
    mse_fresh: Optional[float] = None
    wall_time: float = 0.0
    seed: int = 0
    beta_k: Optional[float] = None
    config: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# path chunks


def _chunk_size(layout: SpaceLayout, total: int) -> int:
    per_path = max(1, (layout.grid.steps - 1) * layout.k * 2)
    return int(max(1, min(total, 4096, _CHUNK_FLOATS // per_path)))


def _chunks(model, layout, total, seed, euler_strict):
    """Yield ``(paths, features)`` covering stream entries ``0 .. total-1``."""
    size = _chunk_size(layout, total)
    for start in range(0, total, size):
        paths = simulate(model, layout.grid, min(size, total - start), seed, start, euler_strict)
        yield paths, layout.features(paths)


def _check(coeffs: Coefficients, m: int, last_ok: int) -> int:
    if not coeffs.all_finite() or coeffs.max_abs() > DIVERGENCE_BOUND:
        raise DivergenceError(
            f"coefficients left the bound {DIVERGENCE_BOUND:g} after step {last_ok} "
            f"(detected at step {m})",
            last_ok,
        )
    return m


def _y0_estimate(layout: SpaceLayout, coeffs: Coefficients, theta: np.ndarray) -> float:
    return float(coeffs.y[0]) if layout.dirac else float(np.mean(theta @ coeffs.y))


def _z0_estimate(layout: SpaceLayout, coeffs: Coefficients):
    return coeffs.z0[0].copy() if layout.dirac else None


def fresh_mse(layout: SpaceLayout, coeffs: Coefficients, model: ModelSpec, samples: int = 10_000, seed: int = 0):
    """``E|Y_0 approximation - u(0, X_0)|^2`` on fresh draws of ``X_0``."""
    if not model.has_exact:
        return None
    if model.initial_law is InitialLaw.UNIFORM01:
        x0 = entry_generator(derive_seed(seed, 0xF5E5), 0).random((samples, model.dim))
    else:
        x0 = np.broadcast_to(model.x0, (1, model.dim))
    approx = layout.theta(x0) @ coeffs.y
    return float(np.mean((approx - model.exact(0.0, x0)) ** 2))


def _trailing(window_sq: np.ndarray, steps: int):
    if steps == 0 or window_sq.size == 0:
        return None
    w = min(10_000, max(1, steps // 2))
    return float(np.mean(window_sq[-w:]))


# ---------------------------------------------------------------------------
# direct algorithm


def _direct_step(model, grid, coeffs, rates, theta, psi0, psin, x, dw):
    """One Robbins-Monro step on a single path, in place. Returns the mismatch."""
    h, N = grid.h, grid.steps
    z = np.empty((N, x.shape[1]))
    z[0] = psi0 @ coeffs.z0
    if N > 1:
        z[1:] = np.einsum("nk,nkl->nl", psin, coeffs.zn)
    y = np.empty(N + 1)
    y[0] = theta @ coeffs.y
    for n in range(N):
        y[n + 1] = y[n] - h * model.driver(grid.t(n), x[n], y[n], z[n]) + z[n] @ dw[n]
    t = grid.nodes[:N]
    factors = 1.0 - h * model.driver_dy(t, x[:N], y[:N], z)
    dz = model.driver_dz(t, x[:N], y[:N], z)
    suffix = np.append(np.cumprod(factors[::-1])[::-1], 1.0)
    mismatch = float(model.terminal(x[N]) - y[N])
    c = -2.0 * mismatch
    w = (dw - h * dz) * (c * suffix[1:])[:, None]
    gy, gz0, gzn = rates
    coeffs.y -= (gy * c * suffix[0]) * theta
    coeffs.z0 -= gz0 * np.outer(psi0, w[0])
    if N > 1:
        coeffs.zn -= (gzn[:, None, None] * psin[:, :, None]) * w[1:, None, :]
    return mismatch


def solve_direct(
    model: ModelSpec,
    layout: SpaceLayout,
    schedule: Schedule,
    M: int,
    seed: int,
    init: Coefficients,
    euler_strict: bool = False,
) -> SolveReport:
    """Plain SGD on ``E|g(X_T) - Y_T|^2`` with one fresh path per step."""
    start = time.perf_counter()
    grid = layout.grid
    coeffs = init.copy()
    trace = np.empty(M)
    sq = np.empty(M)
    last_ok = 0
    m = 0
    for paths, (theta, psi0, psin) in _chunks(model, layout, M, seed, euler_strict):
        x, dw = paths.states, paths.increments
        u0 = model.exact(0.0, x[:, 0]) if model.has_exact else None
        for b in range(paths.batch):
            m += 1
            if u0 is not None:
                sq[m - 1] = (theta[b] @ coeffs.y - u0[b]) ** 2
            rates = _step_rates(schedule, m, grid.steps, grid.h)
            _direct_step(model, grid, coeffs, rates, theta[b], psi0[b], psin[b], x[b], dw[b])
            trace[m - 1] = coeffs.y[0] if layout.dirac else theta[b] @ coeffs.y
            if m % _CHECK_EVERY == 0:
                last_ok = _check(coeffs, m, last_ok)
    _check(coeffs, m, last_ok)
    fresh = fresh_mse(layout, coeffs, model, seed=seed)
    y0 = _fresh_y0(layout, coeffs, model, seed)
    return SolveReport(
        algorithm="direct", coeffs=coeffs, y0=y0, z0=_z0_estimate(layout, coeffs),
        trace=trace, mse=_trailing(sq, M) if model.has_exact else None, mse_fresh=fresh,
        wall_time=time.perf_counter() - start, seed=int(seed),
    )


def _fresh_y0(layout, coeffs, model, seed, samples=10_000):
    if layout.dirac:
        return float(coeffs.y[0])
    x0 = entry_generator(derive_seed(seed, 0xF5E5), 0).random((samples, model.dim))
    return float(np.mean(layout.theta(x0) @ coeffs.y))


# ---------------------------------------------------------------------------
# Picard algorithm


@dataclass(frozen=True)
class PicardConfig:
    """Outer/inner loop sizes and the update normalisation.

    ``scaling="normalized"`` uses the update maps with ``2 / beta_K`` and
    ``2 / (beta_K sqrt(h))``. ``scaling="raw"`` uses the plain block
    gradients (factor 2), which is what the tabulated empirical rates are
    tuned for. ``overrides`` maps an iteration ``k`` to the schedule used
    from iteration ``k`` on; ``decay`` multiplies the rate numerators by
    ``decay^(p-1)``.
    """

    P: int
    M: int
    beta_k: Optional[float] = None
    warm_start: bool = True
    scaling: str = "raw"
    overrides: dict = field(default_factory=dict)
    decay: float = 1.0
    init_noise: float = 0.0

    def __post_init__(self):
        if self.P < 1:
            raise ValueError("P must be at least 1")
        if self.M < 0:
            raise ValueError("M must be non-negative")
        if self.beta_k is not None and self.beta_k < 1:
            raise ValueError("beta_K must be at least 1")
        if self.scaling not in ("normalized", "raw"):
            raise ValueError("scaling must be 'normalized' or 'raw'")

    def schedule_for(self, base: Schedule, p: int) -> Schedule:
        sched = base
        for k in sorted(self.overrides):
            if k <= p:
                sched = self.overrides[k]
        if self.decay != 1.0:
            sched = sched.scaled(self.decay ** (p - 1))
        return sched


def estimate_beta_k(layout: SpaceLayout, model: ModelSpec, samples: int, seed: int) -> float:
    """Monte Carlo version of ``beta_K^2 >= (1 + E|theta|^4) v max(1 + E|w|^4)``
    with ``w = psi_n(X_n) dW_n^l / sqrt(h)``, times a safety factor 1.1."""
    if samples < 1000:
        raise ValueError("estimate_beta_k needs at least 1000 samples")
    grid = layout.grid
    fourth_theta = 0.0
    fourth_omega = np.zeros((grid.steps, layout.dim))
    for paths, (theta, psi0, psin) in _chunks(model, layout, samples, seed, False):
        xi4 = (paths.increments / np.sqrt(grid.h)) ** 4
        fourth_theta += np.sum(np.sum(theta**2, axis=1) ** 2)
        fourth_omega[0] += np.sum(np.sum(psi0**2, axis=1)[:, None] ** 2 * xi4[:, 0], axis=0)
        if grid.steps > 1:
            norm4 = np.sum(psin**2, axis=2) ** 2
            fourth_omega[1:] += np.sum(norm4[:, :, None] * xi4[:, 1:], axis=0)
    bound = max(1.0 + fourth_theta / samples, 1.0 + float(np.max(fourth_omega)) / samples)
    return 1.1 * float(np.sqrt(bound))


def _picard_step(coeffs, g, theta, psi0, psin, dw, ry, rz0, rzn, fy, fz):
    """Block-separable update on one path, in place; returns the y-block residual."""
    res_y = g - theta @ coeffs.y
    coeffs.y += (ry * fy * res_y) * theta
    res0 = g - dw[0] * (psi0 @ coeffs.z0)
    coeffs.z0 += (rz0 * fz) * np.outer(psi0, res0 * dw[0])
    if psin.shape[0]:
        proj = np.einsum("nk,nkl->nl", psin, coeffs.zn)
        res = (g - dw[1:] * proj) * dw[1:]
        coeffs.zn += (fz * rzn)[:, None, None] * psin[:, :, None] * res[:, None, :]
    return res_y


def phi_m(
    tilde: Coefficients,
    model: ModelSpec,
    layout: SpaceLayout,
    config: PicardConfig,
    schedule: Schedule,
    seed: int,
    init: Coefficients,
    beta_k: float = 1.0,
    euler_strict: bool = False,
    paths: Optional[PathBatch] = None,
    trace_out: Optional[list] = None,
):
    """``M`` Robbins-Monro steps on the problem with the driver frozen at ``tilde``.

    With ``paths`` given, step ``m`` uses entry ``(m - 1) mod B`` of that
    presampled batch instead of fresh draws.
    """
    grid = layout.grid
    M = config.M
    coeffs = init.copy()
    if config.scaling == "normalized":
        fy, fz = 2.0 / beta_k, 2.0 / (beta_k * np.sqrt(grid.h))
    else:
        fy = fz = 2.0
    trace = np.empty(M)
    sq = np.empty(M)
    last_ok = 0
    m = 0

    def sources():
        if paths is None:
            yield from _chunks(model, layout, M, seed, euler_strict)
            return
        feats = layout.features(paths)
        done = 0
        while done < M:
            yield paths, feats
            done += paths.batch

    for batch, feats in sources():
        theta, psi0, psin = feats
        g = frozen_target(layout, tilde, model, batch, feats)
        dw = batch.increments
        u0 = model.exact(0.0, batch.states[:, 0]) if model.has_exact else None
        for b in range(batch.batch):
            if m >= M:
                break
            m += 1
            if u0 is not None:
                sq[m - 1] = (theta[b] @ coeffs.y - u0[b]) ** 2
            ry, rz0, rzn = _step_rates(schedule, m, grid.steps, grid.h)
            _picard_step(coeffs, g[b], theta[b], psi0[b], psin[b], dw[b], ry, rz0, rzn, fy, fz)
            trace[m - 1] = coeffs.y[0] if layout.dirac else theta[b] @ coeffs.y
            if m % _CHECK_EVERY == 0:
                last_ok = _check(coeffs, m, last_ok)
    _check(coeffs, m, last_ok)
    if trace_out is not None:
        trace_out.append((trace, sq if model.has_exact else None))
    return coeffs


def solve_picard(
    model: ModelSpec,
    layout: SpaceLayout,
    config: PicardConfig,
    schedule: Schedule,
    seed: int,
    init: Coefficients,
    euler_strict: bool = False,
) -> SolveReport:
    """Outer fixed-point loop; iteration ``p`` uses the stream ``derive_seed(seed, p)``."""
    start = time.perf_counter()
    beta_k = config.beta_k
    if beta_k is None:
        beta_k = estimate_beta_k(layout, model, 20_000, derive_seed(seed, 0xBE7A))
    tilde = init.copy()
    records = []
    trace = np.empty(0)
    mse = None
    for p in range(1, config.P + 1):
        if config.warm_start:
            start_p = tilde
        else:
            start_p = init.copy()
            if config.init_noise > 0:
                noise = entry_generator(derive_seed(seed, p, 0x1417), 0).standard_normal(init.size)
                start_p = init.like(init.flat() + config.init_noise * noise)
        out = []
        tilde = phi_m(
            tilde, model, layout, config, config.schedule_for(schedule, p), derive_seed(seed, p),
            start_p, beta_k, euler_strict, trace_out=out,
        )
        trace, sq = out[0]
        mse = _trailing(sq, config.M) if sq is not None else None
        records.append(IterationRecord(
            p=p, y0=_fresh_y0(layout, tilde, model, seed), z0=_z0_estimate(layout, tilde),
            mse=mse, mse_fresh=fresh_mse(layout, tilde, model, seed=seed),
        ))
    last = records[-1]
    return SolveReport(
        algorithm="picard", coeffs=tilde, y0=last.y0, z0=last.z0, trace=trace,
        iterations=records, mse=mse, mse_fresh=last.mse_fresh,
        wall_time=time.perf_counter() - start, seed=int(seed), beta_k=beta_k,
    )
