"""Time grid, approximation boxes and the maps onto the unit cube."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    horizon: float
    steps: int

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.steps < 1:
            raise ValueError("steps must be a positive integer")

    @property
    def h(self) -> float:
        return self.horizon / self.steps

    def t(self, n: int) -> float:
        # n*T/N rather than n*h so that t(N) == T exactly
        return n * self.horizon / self.steps

    @property
    def nodes(self) -> np.ndarray:
        return np.array([self.t(n) for n in range(self.steps + 1)])


@dataclass(frozen=True, eq=False)
class DomainBox:
    """Per-step boxes ``[lower[n], upper[n]]`` for ``n = 1..N-1``.

    ``lower`` and ``upper`` have shape ``(N - 1, d)``; row ``n - 1`` holds
    step ``n``.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 2:
            raise ValueError("lower and upper must both have shape (N-1, d)")
        if not np.all(lo < hi):
            raise ValueError("every box needs lower < upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[1]

    def bounds(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        if not 1 <= n <= self.lower.shape[0]:
            raise IndexError(f"no box at step {n}")
        return self.lower[n - 1], self.upper[n - 1]

    @classmethod
    def fixed(cls, lower, upper, grid: TimeGrid) -> "DomainBox":
        lo = np.broadcast_to(np.asarray(lower, dtype=float), (grid.steps - 1, np.size(lower)))
        hi = np.broadcast_to(np.asarray(upper, dtype=float), lo.shape)
        return cls(lo.copy(), hi.copy())


def _start(x0, dim):
    x0 = np.asarray(x0, dtype=float)
    if dim is not None:
        x0 = np.broadcast_to(x0, (dim,))
    return np.atleast_1d(x0)


def domain_bm(x0, mu: float, sigma: float, r: float, grid: TimeGrid, dim: int | None = None) -> DomainBox:
    """Boxes ``x0 + [mu t - r sigma sqrt(t), mu t + r sigma sqrt(t)]^d``."""
    if r <= 0 or sigma <= 0:
        raise ValueError("r and sigma must be positive")
    x0 = _start(x0, dim)
    t = grid.nodes[1:-1, None]
    half = r * sigma * np.sqrt(t)
    return DomainBox(x0 + mu * t - half, x0 + mu * t + half)


def domain_gbm(x0, mu: float, sigma: float, r: float, grid: TimeGrid, dim: int | None = None) -> DomainBox:
    """Boxes ``[x0 exp(R - r sigma sqrt(t)), x0 exp(R + r sigma sqrt(t))]``
    with ``R = (mu - sigma^2 / 2) t``."""
    if r <= 0 or sigma <= 0:
        raise ValueError("r and sigma must be positive")
    x0 = _start(x0, dim)
    if np.any(x0 <= 0):
        raise ValueError("geometric boxes need a positive starting point")
    t = grid.nodes[1:-1, None]
    drift = (mu - 0.5 * sigma**2) * t
    half = r * sigma * np.sqrt(t)
    return DomainBox(x0 * np.exp(drift - half), x0 * np.exp(drift + half))


def chart(box: DomainBox, n: int, x) -> np.ndarray:
    """Affine map of the step-``n`` box onto the unit cube (works on batches)."""
    lo, hi = box.bounds(n)
    return (np.asarray(x, dtype=float) - lo) / (hi - lo)


def chart_inverse(box: DomainBox, n: int, y) -> np.ndarray:
    lo, hi = box.bounds(n)
    return lo + np.asarray(y, dtype=float) * (hi - lo)


def periodize(x) -> np.ndarray:
    """Representative of ``x`` modulo the integer lattice, in ``[0, 1)^d``."""
    x = np.asarray(x, dtype=float)
    out = x - np.floor(x)
    # floor of tiny negatives can round up to exactly 1.0
    return np.where(out >= 1.0, 0.0, out)
