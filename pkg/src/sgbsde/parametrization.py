"""Linear parametrisation of the backward component.

The optimisation variable holds ``y`` (weights of the initial value) and one
``(K_n, d)`` block of ``z`` weights per time step. ``Y`` is driven forward
with the Euler recursion ``Y_{n+1} = Y_n - h f(t_n, X_n, Y_n, Z_n) + Z_n . dW_n``
and the terminal mismatch against ``g(X_T)`` is the loss.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import DomainBox, TimeGrid, chart, domain_bm, domain_gbm, periodize
from .models import InitialLaw, ModelSpec, ProcessKind
from .simulation import PathBatch
from .sparse_grid import SparseGridSpace


@dataclass(eq=False)
class Coefficients:
    """``y`` of shape ``(K_y,)``, ``z0`` of shape ``(K_0, d)`` and ``zn`` of
    shape ``(N - 1, K, d)``.

    The same container is used for feature vectors, optionally with a leading
    batch axis on every array.
    """

    y: np.ndarray
    z0: np.ndarray
    zn: np.ndarray

    @classmethod
    def zeros(cls, layout: "SpaceLayout") -> "Coefficients":
        d, N = layout.dim, layout.grid.steps
        return cls(np.zeros(layout.k_y), np.zeros((layout.k_0, d)), np.zeros((N - 1, layout.k, d)))

    @classmethod
    def constant(cls, layout: "SpaceLayout", y=0.0, z0=0.0, zn=0.0) -> "Coefficients":
        c = cls.zeros(layout)
        c.y[:] = y
        c.z0[:] = z0
        c.zn[:] = zn
        return c

    def copy(self) -> "Coefficients":
        return Coefficients(self.y.copy(), self.z0.copy(), self.zn.copy())

    def arrays(self):
        return self.y, self.z0, self.zn

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def like(self, flat: np.ndarray) -> "Coefficients":
        out, pos = [], 0
        for a in self.arrays():
            out.append(np.asarray(flat[pos : pos + a.size], dtype=float).reshape(a.shape))
            pos += a.size
        return Coefficients(*out)

    @property
    def size(self) -> int:
        return sum(a.size for a in self.arrays())

    def dot(self, other: "Coefficients") -> np.ndarray:
        """``u . Omega``; ``other`` may carry a leading batch axis."""
        return (
            np.einsum("...k,k->...", other.y, self.y)
            + np.einsum("...kl,kl->...", other.z0, self.z0)
            + np.einsum("...nkl,nkl->...", other.zn, self.zn)
        )

    def scaled_sum(self, alpha: float, other: "Coefficients", beta: float) -> "Coefficients":
        return Coefficients(
            alpha * self.y + beta * other.y,
            alpha * self.z0 + beta * other.z0,
            alpha * self.zn + beta * other.zn,
        )

    def max_abs(self) -> float:
        return float(max((np.max(np.abs(a)) if a.size else 0.0) for a in self.arrays()))

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def block(self, n: int) -> np.ndarray:
        return self.z0 if n == 0 else self.zn[n - 1]


@dataclass(frozen=True, eq=False)
class SpaceLayout:
    """Approximation spaces for ``Y_0`` and for ``Z`` at every step.

    ``mode`` is ``"chart"`` (boxes mapped onto the unit cube) or
    ``"periodic"`` (fractional part). Under a Dirac start the initial spaces
    hold only the constant function 1.
    """

    grid: TimeGrid
    space: SparseGridSpace
    mode: str
    dirac: bool
    box: DomainBox | None = None

    def __post_init__(self):
        if self.mode not in ("chart", "periodic"):
            raise ValueError(f"unknown layout mode {self.mode!r}")
        if self.mode == "chart" and self.grid.steps > 1 and self.box is None:
            raise ValueError("chart layouts need a DomainBox")
        if self.mode == "chart" and not self.dirac:
            raise ValueError("chart layouts are only defined for a Dirac start")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def k(self) -> int:
        return self.space.size

    @property
    def k_y(self) -> int:
        return 1 if self.dirac else self.k

    @property
    def k_0(self) -> int:
        return 1 if self.dirac else self.k

    def k_z(self, n: int) -> int:
        return self.k_0 if n == 0 else self.k

    @property
    def k_bar(self) -> int:
        return self.k_0 + (self.grid.steps - 1) * self.k

    def to_unit(self, n: int, x) -> np.ndarray:
        if self.mode == "periodic":
            return periodize(x)
        return chart(self.box, n, x)

    def psi(self, n: int, x) -> np.ndarray:
        """Basis values at step ``n`` for points ``(B, d)`` -> ``(B, K_n)``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if n == 0 and self.dirac:
            return np.ones((x.shape[0], 1))
        return self.space.eval_batch(self.to_unit(n, x))

    def theta(self, x0) -> np.ndarray:
        return self.psi(0, x0)

    def features(self, paths: PathBatch):
        """``(theta, psi0, psin)`` with shapes ``(B, K_y)``, ``(B, K_0)``,
        ``(B, N - 1, K)``."""
        x = paths.states
        B, N = x.shape[0], self.grid.steps
        theta = self.theta(x[:, 0])
        psin = np.empty((B, N - 1, self.k))
        for n in range(1, N):
            psin[:, n - 1] = self.psi(n, x[:, n])
        return theta, theta if self.k_y == self.k_0 else self.psi(0, x[:, 0]), psin


def make_layout(model: ModelSpec, grid: TimeGrid, space: SparseGridSpace, r: float = 2.0) -> SpaceLayout:
    """Layout matching the model's initial law and forward process."""
    if space.dim != model.dim:
        raise ValueError("space and model dimensions differ")
    if model.initial_law is InitialLaw.UNIFORM01:
        return SpaceLayout(grid, space, "periodic", dirac=False)
    if model.process_kind is ProcessKind.GBM:
        box = domain_gbm(model.x0, model.process_mu, model.process_sigma, r, grid, model.dim)
    else:
        box = domain_bm(model.x0, model.process_mu, model.process_sigma, r, grid, model.dim)
    return SpaceLayout(grid, space, "chart", dirac=True, box=box)


# ---------------------------------------------------------------------------
# controlled processes


def z_at(layout: SpaceLayout, coeffs: Coefficients, n: int, x) -> np.ndarray:
    """``Z`` at step ``n`` for points ``(B, d)`` -> ``(B, d)``."""
    return layout.psi(n, x) @ coeffs.block(n)


def _z_path(coeffs, psi0, psin):
    B, Nm1 = psin.shape[:2]
    zall = np.empty((B, Nm1 + 1, coeffs.z0.shape[1]))
    zall[:, 0] = psi0 @ coeffs.z0
    if Nm1:
        zall[:, 1:] = np.einsum("bnk,nkl->bnl", psin, coeffs.zn)
    return zall


def forward_y(layout: SpaceLayout, coeffs: Coefficients, model: ModelSpec, paths: PathBatch, feats=None):
    """Run the controlled process; returns ``Y`` of shape ``(B, N + 1)`` and
    ``Z`` of shape ``(B, N, d)``."""
    grid = layout.grid
    theta, psi0, psin = feats if feats is not None else layout.features(paths)
    x, dw = paths.states, paths.increments
    zall = _z_path(coeffs, psi0, psin)
    B, N = x.shape[0], grid.steps
    y = np.empty((B, N + 1))
    y[:, 0] = theta @ coeffs.y
    h = grid.h
    for n in range(N):
        zn = zall[:, n]
        y[:, n + 1] = y[:, n] - h * model.driver(grid.t(n), x[:, n], y[:, n], zn) + np.sum(zn * dw[:, n], axis=-1)
    return y, zall


def loss_G(layout: SpaceLayout, coeffs: Coefficients, model: ModelSpec, paths: PathBatch, feats=None) -> np.ndarray:
    """Squared terminal mismatch per path, shape ``(B,)``."""
    y, _ = forward_y(layout, coeffs, model, paths, feats)
    return (model.terminal(paths.states[:, -1]) - y[:, -1]) ** 2


def grad_G(layout: SpaceLayout, coeffs: Coefficients, model: ModelSpec, paths: PathBatch, feats=None) -> Coefficients:
    """Analytic gradient of ``loss_G`` averaged over the batch.

    The derivative of ``Y_T`` with respect to the step-``n`` weights carries
    the product of ``1 - h df/dy`` over the later steps; these suffix
    products are formed once per path.
    """
    grid = layout.grid
    h, N = grid.h, grid.steps
    feats = feats if feats is not None else layout.features(paths)
    theta, psi0, psin = feats
    x, dw = paths.states, paths.increments
    y, zall = forward_y(layout, coeffs, model, paths, feats)
    B = x.shape[0]
    factors = np.empty((B, N))
    dz = np.empty_like(zall)
    for n in range(N):
        t = grid.t(n)
        factors[:, n] = 1.0 - h * model.driver_dy(t, x[:, n], y[:, n], zall[:, n])
        dz[:, n] = model.driver_dz(t, x[:, n], y[:, n], zall[:, n])
    suffix = np.ones((B, N + 1))
    for n in range(N - 1, -1, -1):
        suffix[:, n] = suffix[:, n + 1] * factors[:, n]
    c = -2.0 * (model.terminal(x[:, -1]) - y[:, -1]) / B
    # d Y_T / d z^{n,k} = psi_n^k (dW_n - h df/dz_n) * suffix_{n+1}
    w = (dw - h * dz) * (c[:, None] * suffix[:, 1:])[:, :, None]
    gy = (c * suffix[:, 0]) @ theta
    gz0 = psi0.T @ w[:, 0]
    gzn = np.einsum("bnk,bnl->nkl", psin, w[:, 1:])
    return Coefficients(gy, gz0, gzn)


def picard_features(layout: SpaceLayout, paths: PathBatch, feats=None) -> Coefficients:
    """Feature vector ``Omega = (theta, psi . dW)`` with a leading batch axis."""
    theta, psi0, psin = feats if feats is not None else layout.features(paths)
    dw = paths.increments
    omega0 = psi0[:, :, None] * dw[:, 0, None, :]
    omegan = psin[:, :, :, None] * dw[:, 1:, None, :]
    return Coefficients(theta, omega0, omegan)


def frozen_target(layout: SpaceLayout, tilde: Coefficients, model: ModelSpec, paths: PathBatch, feats=None) -> np.ndarray:
    """``g(X_T) + h sum_n f(t_n, X_n, Y~_n, Z~_n)`` along the frozen iterate."""
    grid = layout.grid
    y, zall = forward_y(layout, tilde, model, paths, feats)
    x = paths.states
    total = model.terminal(x[:, -1])
    for n in range(grid.steps):
        total = total + grid.h * model.driver(grid.t(n), x[:, n], y[:, n], zall[:, n])
    return total


def picard_residual(layout: SpaceLayout, tilde: Coefficients, coeffs: Coefficients, model: ModelSpec, paths: PathBatch, feats=None):
    """``(G~ - u . Omega, Omega)`` per path.

    ``G~ - u . Omega`` equals ``g(X_T) - U_T`` where ``U`` starts at
    ``Y^u_0`` and moves with the frozen driver and the ``u``-controlled
    ``Z``.
    """
    feats = feats if feats is not None else layout.features(paths)
    target = frozen_target(layout, tilde, model, paths, feats)
    omega = picard_features(layout, paths, feats)
    return target - coeffs.dot(omega), omega


# ---------------------------------------------------------------------------
# flat CSV: one row per scalar weight; the y block is written with n = -1


def write_coefficients(coeffs: Coefficients, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "n", "l", "value"])
        for k, v in enumerate(coeffs.y):
            w.writerow([k, -1, 0, repr(float(v))])
        blocks = [coeffs.z0] + list(coeffs.zn)
        for n, blk in enumerate(blocks):
            for k in range(blk.shape[0]):
                for l in range(blk.shape[1]):
                    w.writerow([k, n, l, repr(float(blk[k, l]))])


def read_coefficients(path, layout: SpaceLayout) -> Coefficients:
    out = Coefficients.zeros(layout)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            k, n, l, v = int(row["k"]), int(row["n"]), int(row["l"]), float(row["value"])
            if n == -1:
                out.y[k] = v
            else:
                out.block(n)[k, l] = v
    return out
