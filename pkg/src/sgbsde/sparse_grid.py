"""Sparse-grid approximation spaces on the unit cube.

Three univariate families are available:

* ``HAT``: piecewise-linear hats ``phi(2^l x - i)`` including the two
  level-0 boundary hats.
* ``PREWAVELET``: the five-tap pre-wavelet combination of hats, with special
  members next to the boundary and level-0/level-1 constants and ramps.
* ``MODHAT``: hat functions whose boundary-adjacent members are extended to
  the domain edge, so that no level-0 functions are needed.

Multivariate functions are tensor products. A level vector ``l`` belongs to
the sparse grid of level ``L`` when ``zeta(l) <= L`` where
``zeta(0) = 0`` and ``zeta(l) = |l|_1 - d + #{j : l_j = 0} + 1`` otherwise.
Every basis function is supported in ``[0, 1]^d``; evaluation outside the
cube returns 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np


class Family(enum.Enum):
    HAT = "hat"
    PREWAVELET = "prewavelet"
    MODHAT = "modhat"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "hat": cls.HAT,
            "prewavelet": cls.PREWAVELET,
            "prewavelets": cls.PREWAVELET,
            "modhat": cls.MODHAT,
            "modifiedhat": cls.MODHAT,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(
                f"unknown basis family {name!r}; expected one of hat, prewavelet, modhat"
            ) from None

    @property
    def has_boundary(self) -> bool:
        return self is not Family.MODHAT


class BasisIndexError(IndexError):
    """Raised for a (level, position) pair that does not exist in a family."""


def _hat(t):
    return np.maximum(0.0, 1.0 - np.abs(t))


def positions(family: Family, level: int) -> list[int]:
    """Admissible positions ``i`` at a single univariate level."""
    if level < 0:
        return []
    if level == 0:
        return [0, 1] if family.has_boundary else []
    return list(range(1, 2**level, 2))


def check_index(family: Family, level: int, pos: int) -> None:
    if pos not in positions(family, level):
        raise BasisIndexError(
            f"({level}, {pos}) is not a valid {family.value} index"
        )


def eval_univariate(family, level: int, pos: int, x):
    """Value of the univariate basis function ``(level, pos)`` at ``x``.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    family = Family.parse(family)
    check_index(family, level, pos)
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= 1.0)
    if family is Family.HAT:
        val = _hat(2.0**level * x - pos)
    elif family is Family.MODHAT:
        val = _modhat(level, pos, x)
    else:
        val = _prewavelet(level, pos, x)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _modhat(level, pos, x):
    if level == 1:
        return np.ones_like(x)
    width = 2.0 ** (1 - level)
    if pos == 1:
        return np.where(x <= width, 1.0 - 2.0 ** (level - 1) * x, 0.0)
    if pos == 2**level - 1:
        return np.where(x >= 1.0 - width, 2.0 ** (level - 1) * x + (1.0 - pos) / 2.0, 0.0)
    return _hat(2.0**level * x - pos)


# hat weights of the left boundary and interior pre-wavelets, offsets from i
_PW_LEFT = ((-1, -6.0 / 5.0), (0, 11.0 / 10.0), (1, -3.0 / 5.0), (2, 1.0 / 10.0))
_PW_INNER = ((-2, 0.1), (-1, -0.6), (0, 1.0), (1, -0.6), (2, 0.1))


def _prewavelet(level, pos, x):
    if level == 0:
        return np.ones_like(x) if pos == 0 else _hat(x - 1.0)
    if level == 1:
        return 2.0 * _hat(2.0 * x - 1.0) - 1.0
    last = 2**level - 1
    if pos == last:
        x = 1.0 - x
        pos = 1
    scale = 2.0 ** (0.5 * level)
    taps = _PW_LEFT if pos == 1 else _PW_INNER
    t = 2.0**level * x - pos
    return scale * sum(w * _hat(t - off) for off, w in taps)


def support(family, level: int, pos: int) -> tuple[float, float]:
    """Closed interval outside of which the function vanishes."""
    family = Family.parse(family)
    check_index(family, level, pos)
    if level == 0 or (level == 1 and family is not Family.HAT):
        return 0.0, 1.0
    h = 2.0**-level
    if family is Family.HAT:
        lo, hi = (pos - 1) * h, (pos + 1) * h
    elif family is Family.MODHAT:
        if pos == 1:
            lo, hi = 0.0, 2 * h
        elif pos == 2**level - 1:
            lo, hi = 1.0 - 2 * h, 1.0
        else:
            lo, hi = (pos - 1) * h, (pos + 1) * h
    else:
        if pos == 1:
            lo, hi = 0.0, 4 * h
        elif pos == 2**level - 1:
            lo, hi = 1.0 - 4 * h, 1.0
        else:
            lo, hi = (pos - 3) * h, (pos + 3) * h
    return max(lo, 0.0), min(hi, 1.0)


# ---------------------------------------------------------------------------
# index sets


def zeta(levels: Sequence[int]) -> int:
    """Sparse-grid level selector of a level vector."""
    levels = tuple(int(v) for v in levels)
    if all(v == 0 for v in levels):
        return 0
    d = len(levels)
    return sum(levels) - d + sum(1 for v in levels if v == 0) + 1


def _level_vectors(dim: int, level: int, family: Family) -> Iterator[tuple[int, ...]]:
    """Admissible level vectors in lexicographic order.

    Admissibility reduces to ``sum(max(l_j - 1, 0)) <= level - 1`` together
    with ``l_j >= 1`` for the boundary-free family.
    """
    lowest = 0 if family.has_boundary else 1
    budget = level - 1

    def rec(prefix, remaining, left):
        if remaining == 0:
            yield tuple(prefix)
            return
        for v in range(lowest, left + 2):
            prefix.append(v)
            yield from rec(prefix, remaining - 1, left - max(v - 1, 0))
            prefix.pop()

    yield from rec([], dim, budget)


def count(dim: int, level: int, family="prewavelet") -> int:
    """Number of basis functions, without enumerating them.

    Writing a level vector with ``m`` non-zero entries as ``1 + e_j`` and
    ``E = sum(e_j)``, admissibility is ``E <= level - 1``; a vector carries
    ``2^(d-m) * 2^E`` functions and there are ``C(E+m-1, m-1)`` ways to
    split ``E``.
    """
    family = Family.parse(family)
    if dim < 1 or level < 1:
        raise ValueError("dim and level must be positive")

    def nonzero_part(m):
        return sum(math.comb(e + m - 1, m - 1) * 2**e for e in range(level))

    if not family.has_boundary:
        return nonzero_part(dim)
    total = 2**dim
    for m in range(1, dim + 1):
        total += math.comb(dim, m) * 2 ** (dim - m) * nonzero_part(m)
    return total


@dataclass(frozen=True)
class MultiIndex:
    level: tuple[int, ...]
    position: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SparseGridSpace:
    """Enumerated sparse-grid basis on ``[0, 1]^dim``.

    Basis ids ``k`` are zero-based internally; the public methods accept the
    same zero-based ids. Enumeration is lexicographic on (level, position).
    """

    dim: int
    level: int
    family: Family = Family.PREWAVELET

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if self.dim < 1 or self.level < 1:
            raise ValueError("dim and level must be positive")

    # -- enumeration ---------------------------------------------------
    @cached_property
    def level_vectors(self) -> list[tuple[int, ...]]:
        return list(_level_vectors(self.dim, self.level, self.family))

    @cached_property
    def univariate(self) -> list[tuple[int, int]]:
        """All univariate (level, position) pairs that can occur."""
        out = []
        for l in range(self.level + 1):
            out.extend((l, i) for i in positions(self.family, l))
        return out

    @cached_property
    def _tables(self):
        fam = self.family
        uni_id = {li: u for u, li in enumerate(self.univariate)}
        # factors equal to 1 on the whole cube are dropped from the product
        trivial = (0, 0) if fam is Family.PREWAVELET else (1, 1) if fam is Family.MODHAT else None
        coords, funs, levels_of, pos_of = [], [], [], []
        for lv in self.level_vectors:
            per_coord = [positions(fam, l) for l in lv]
            for pos in _product(per_coord):
                c, f = [], []
                for j, (l, i) in enumerate(zip(lv, pos)):
                    if (l, i) != trivial:
                        c.append(j)
                        f.append(uni_id[(l, i)])
                coords.append(c)
                funs.append(f)
                levels_of.append(lv)
                pos_of.append(pos)
        width = max(1, max(len(c) for c in coords))
        pad = len(self.univariate)  # extra column holding ones
        fac_coord = np.zeros((len(coords), width), dtype=np.intp)
        fac_fun = np.full((len(coords), width), pad, dtype=np.intp)
        for k, (c, f) in enumerate(zip(coords, funs)):
            fac_coord[k, : len(c)] = c
            fac_fun[k, : len(f)] = f
        return fac_coord, fac_fun, levels_of, pos_of

    @cached_property
    def _flat_factors(self) -> np.ndarray:
        fac_coord, fac_fun, _, _ = self._tables
        return fac_coord * (len(self.univariate) + 1) + fac_fun

    @property
    def size(self) -> int:
        return self._tables[0].shape[0]

    def __len__(self) -> int:
        return self.size

    def index(self, k: int) -> MultiIndex:
        if not 0 <= k < self.size:
            raise IndexError(f"basis id {k} out of range [0, {self.size})")
        _, _, lv, pos = self._tables
        return MultiIndex(lv[k], pos[k])

    @property
    def index_set(self) -> list[MultiIndex]:
        _, _, lv, pos = self._tables
        return [MultiIndex(a, b) for a, b in zip(lv, pos)]

    # -- evaluation ----------------------------------------------------
    def univariate_table(self, points: np.ndarray) -> np.ndarray:
        """Values of every univariate function at every coordinate.

        Returns an array of shape ``(P, d, U + 1)``; the last column is 1.
        """
        pts = np.asarray(points, dtype=float)
        out = np.empty(pts.shape + (len(self.univariate) + 1,))
        for u, (l, i) in enumerate(self.univariate):
            out[..., u] = eval_univariate(self.family, l, i, pts)
        out[..., -1] = 1.0
        return out

    def eval_batch(self, points: np.ndarray) -> np.ndarray:
        """Dense basis values for a batch of points, shape ``(P, K)``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        table = self.univariate_table(pts).reshape(len(pts), -1)
        vals = table[:, self._flat_factors].prod(axis=-1)
        inside = np.all((pts >= 0.0) & (pts <= 1.0), axis=1)
        vals[~inside] = 0.0
        return vals

    def eval_multivariate(self, k: int, x) -> float:
        idx = self.index(k)
        x = np.asarray(x, dtype=float)
        val = 1.0
        for l, i, xj in zip(idx.level, idx.position, x):
            val *= eval_univariate(self.family, l, i, xj)
            if val == 0.0:
                return 0.0
        return float(val)

    @cached_property
    def _level_offsets(self) -> dict[tuple[int, ...], int]:
        offsets, k = {}, 0
        for lv in self.level_vectors:
            offsets[lv] = k
            k += math.prod(len(positions(self.family, l)) for l in lv)
        return offsets

    def eval_sparse(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Non-zero basis values at one point as ``(ids, values)``.

        For each admissible level vector only the positions whose support
        contains the point are visited.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a point of dimension {self.dim}")
        if np.any((x < 0.0) | (x > 1.0)):
            return np.zeros(0, dtype=np.intp), np.zeros(0)
        fam = self.family
        cache: dict[tuple[int, int], list[tuple[int, int, float]]] = {}

        def local(j, l):
            key = (j, l)
            if key not in cache:
                pos = positions(fam, l)
                if l >= 2:
                    c = x[j] * 2**l
                    lo, hi = math.floor(c) - 3, math.ceil(c) + 3
                    cand = [(r, i) for r, i in enumerate(pos) if lo <= i <= hi]
                else:
                    cand = list(enumerate(pos))
                hits = []
                for r, i in cand:
                    v = eval_univariate(fam, l, i, x[j])
                    if v != 0.0:
                        hits.append((r, len(pos), v))
                cache[key] = hits
            return cache[key]

        ids, vals = [], []
        for lv, off in self._level_offsets.items():
            factors = [local(j, l) for j, l in enumerate(lv)]
            if any(not f for f in factors):
                continue
            for combo in _product(factors):
                k, v = 0, 1.0
                for r, n, fv in combo:
                    k = k * n + r
                    v *= fv
                ids.append(off + k)
                vals.append(v)
        return np.asarray(ids, dtype=np.intp), np.asarray(vals)

    def eval_all(self, x) -> np.ndarray:
        """Dense K-vector of basis values at one point (localized scan)."""
        ids, vals = self.eval_sparse(x)
        out = np.zeros(self.size)
        out[ids] = vals
        return out


def _product(lists):
    if not lists:
        yield ()
        return
    head, *rest = lists
    for item in head:
        for tail in _product(rest):
            yield (item,) + tail


def count_table(family, dims: Sequence[int], levels: Sequence[int]) -> list[list[int]]:
    return [[count(d, l, family) for l in levels] for d in dims]
