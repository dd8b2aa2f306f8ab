"""Reference values: Cole-Hopf Monte Carlo and closed-form solutions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import ModelSpec
from .simulation import entry_generator

Z95 = 1.959963984540054


class UnsupportedError(ValueError):
    pass


@dataclass(frozen=True)
class ReferenceEstimate:
    y0: float
    z0: np.ndarray
    ci_low: float
    ci_high: float
    samples: int
    seed: int
    stderr: float = 0.0  # standard error of y0
    z_stderr: np.ndarray | None = None

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


def cole_hopf(model: ModelSpec, t: float, x, samples: int, seed: int, chunk: int = 100_000) -> ReferenceEstimate:
    """``u(t, x) = (1/a) log E[exp(a g(x + W_{T-t}))]`` for the quadratic model.

    ``z = E[grad g exp(a g)] / E[exp(a g)]`` (identity volatility). The 95%
    interval is the delta-method one for the log of the mean; with ``a = 0``
    the plain mean of ``g`` and its normal interval are returned.
    """
    if model.name != "quadratic":
        raise UnsupportedError("the Cole-Hopf reference applies only to the quadratic model")
    if samples < 1000:
        raise ValueError("cole_hopf needs at least 1000 samples")
    a = float(model.params["a"])
    grad_g = model.params["terminal_grad"]
    x = np.broadcast_to(np.asarray(x, dtype=float), (model.dim,))
    tau = model.horizon - t
    gen = entry_generator(seed, 0)
    # weights are exp(a g), or g itself when a = 0
    s1 = s2 = 0.0
    zsum = np.zeros(model.dim)
    # second moments for the ratio standard error of z
    q_gg = np.zeros(model.dim)
    q_g = np.zeros(model.dim)
    q_1 = 0.0
    done = 0
    while done < samples:
        b = min(chunk, samples - done)
        pts = x + np.sqrt(tau) * gen.standard_normal((b, model.dim))
        gv = model.terminal(pts)
        w = np.exp(a * gv) if a != 0 else gv
        s1 += float(np.sum(w))
        s2 += float(np.sum(w * w))
        e = np.exp(a * gv) if a != 0 else np.ones(b)
        dg = grad_g(pts)
        zsum += e @ dg
        q_gg += (e * e) @ (dg * dg)
        q_g += (e * e) @ dg
        q_1 += float(e @ e)
        done += b
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
    se = np.sqrt(var / samples)
    if a == 0:
        y0, half, se_y = mean, Z95 * se, se
        z0 = zsum / samples
        z_se = np.sqrt(np.maximum(q_gg / samples - z0**2, 0.0) / samples)
    else:
        y0 = np.log(mean) / a
        se_y = se / (abs(a) * mean)
        half = Z95 * se_y
        z0 = zsum / s1
        w_mean = s1 / samples
        resid2 = (q_gg - 2 * z0 * q_g + z0**2 * q_1) / samples
        z_se = np.sqrt(np.maximum(resid2, 0.0) / samples) / w_mean
    return ReferenceEstimate(float(y0), z0, float(y0 - half), float(y0 + half), int(samples), int(seed), float(se_y), z_se)


def exact_y0(model: ModelSpec, t: float, x) -> float:
    if not model.has_exact:
        raise UnsupportedError(f"model {model.name!r} has no closed-form solution")
    return float(model.exact(t, np.asarray(x, dtype=float)))


def exact_z0(model: ModelSpec, t: float, x) -> np.ndarray:
    if model.exact_z is None:
        raise UnsupportedError(f"model {model.name!r} has no closed-form gradient")
    return np.asarray(model.exact_z(t, np.asarray(x, dtype=float)))
