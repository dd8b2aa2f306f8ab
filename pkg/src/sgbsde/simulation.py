"""Seeded Brownian increments and forward Euler-Maruyama paths.

Each batch entry owns its own Philox stream: the key is the run seed and the
top counter word is the entry index. A path therefore depends only on
``(seed, index)`` and never on how a batch is chunked or scheduled.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .geometry import TimeGrid
from .models import InitialLaw, ModelSpec, ProcessKind

_MASK64 = (1 << 64) - 1


def entry_generator(seed: int, index: int) -> np.random.Generator:
    seed = int(seed) & _MASK64
    return np.random.Generator(
        np.random.Philox(key=[seed, 0], counter=[0, 0, 0, int(index) & _MASK64])
    )


def gaussian_stream(seed: int, count: int, index: int = 0) -> np.ndarray:
    """Deterministic standard normal draws for ``seed``."""
    return entry_generator(seed, index).standard_normal(int(count))


def derive_seed(seed: int, *tags: int) -> int:
    """Child seed, e.g. one per Picard iteration (``derive_seed(s, p)``)."""
    out = int(seed) & _MASK64
    for tag in tags:
        out ^= int(tag) & _MASK64
        out = (out * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019) & _MASK64
    return out


@dataclass(frozen=True, eq=False)
class PathBatch:
    increments: np.ndarray  # (B, N, d), each row ~ N(0, h I)
    states: np.ndarray  # (B, N + 1, d)
    seed: int
    grid: TimeGrid
    start: int = 0

    @property
    def batch(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[2]

    def entry(self, b: int) -> "PathBatch":
        return PathBatch(
            self.increments[b : b + 1], self.states[b : b + 1], self.seed, self.grid, self.start + b
        )


def draw_increments(model: ModelSpec, grid: TimeGrid, batch: int, seed: int, start: int = 0):
    """Initial points ``(B, d)`` and increments ``(B, N, d)``."""
    d, N = model.dim, grid.steps
    sqrt_h = np.sqrt(grid.h)
    x0 = np.empty((batch, d))
    dw = np.empty((batch, N, d))
    for b in range(batch):
        gen = entry_generator(seed, start + b)
        if model.initial_law is InitialLaw.UNIFORM01:
            x0[b] = gen.random(d)
        else:
            x0[b] = model.x0
        dw[b] = gen.standard_normal((N, d)) * sqrt_h
    return x0, dw


def euler_states(model: ModelSpec, grid: TimeGrid, x0: np.ndarray, dw: np.ndarray, euler_strict: bool = False):
    """Forward states from increments.

    Geometric Brownian models are stepped with the exact log-normal update
    unless ``euler_strict`` is set.
    """
    batch, N, d = dw.shape
    h = grid.h
    x = np.empty((batch, N + 1, d))
    x[:, 0] = x0
    exact_gbm = model.process_kind is ProcessKind.GBM and not euler_strict
    if exact_gbm:
        mu, sig = model.process_mu, model.process_sigma
        growth = np.exp((mu - 0.5 * sig**2) * h + sig * dw)
        for n in range(N):
            x[:, n + 1] = x[:, n] * growth[:, n]
        return x
    for n in range(N):
        xn = x[:, n]
        x[:, n + 1] = xn + model.drift(xn) * h + model.sigma_diag(xn) * dw[:, n]
    return x


def simulate(
    model: ModelSpec,
    grid: TimeGrid,
    batch: int,
    seed: int,
    start: int = 0,
    euler_strict: bool = False,
) -> PathBatch:
    """Simulate entries ``start .. start + batch - 1`` of the stream ``seed``."""
    if batch < 1:
        raise ValueError("batch must be at least 1")
    x0, dw = draw_increments(model, grid, batch, seed, start)
    states = euler_states(model, grid, x0, dw, euler_strict)
    return PathBatch(dw, states, int(seed), grid, start)


# ---------------------------------------------------------------------------
# debugging dump: magic, version, d, N, batch, then increments and states as
# little-endian float64

_MAGIC = b"BSDE"
_VERSION = 1
_HEADER = struct.Struct("<4sIIII")


def dump_paths(paths: PathBatch, path) -> None:
    b, n, d = paths.increments.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, d, n, b))
        fh.write(np.ascontiguousarray(paths.increments, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(paths.states, dtype="<f8").tobytes())


def load_paths(path, grid: TimeGrid, seed: int = 0) -> PathBatch:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, d, n, b = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError("not a path dump (bad magic)")
    if version != _VERSION:
        raise ValueError(f"unsupported path dump version {version}")
    if n != grid.steps:
        raise ValueError(f"dump has {n} steps, grid has {grid.steps}")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    split = b * n * d
    inc = body[:split].reshape(b, n, d).copy()
    states = body[split:].reshape(b, n + 1, d).copy()
    return PathBatch(inc, states, seed, grid)
