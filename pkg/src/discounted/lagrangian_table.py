from functools import lru_cache
from typing import Tuple

import numpy as np

from hamiltonian import L_INF, HamiltonianSpec, LagrangianView


class LagrangianTable:
    """
    L on nodes x velocities.

    Rows between nodes are linearly interpolated; an entry is inadmissible as soon as one of
    the two rows it is read from is. Periodic tables wrap in x mod 1.
    """

    def __init__(self, spec: HamiltonianSpec, xs: np.ndarray, qs: np.ndarray, periodic: bool = False):
        self._spec = spec
        self._xs = np.asarray(xs, dtype=float)
        self._qs = np.asarray(qs, dtype=float)
        self._periodic = periodic
        self._values = np.asarray(LagrangianView(spec).table(self._xs, self._qs), dtype=float)
        self._values.setflags(write=False)

    @property
    def spec(self) -> HamiltonianSpec:
        return self._spec

    @property
    def xs(self) -> np.ndarray:
        return self._xs

    @property
    def qs(self) -> np.ndarray:
        return self._qs

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def periodic(self) -> bool:
        return self._periodic

    @property
    def admissible(self) -> np.ndarray:
        return self._values < L_INF / 2

    def _rows(self, ys: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        xs = self._xs
        if self._periodic:
            n = len(xs)
            pos = np.mod(ys - xs[0], 1.0) * n
            k = np.floor(pos).astype(int) % n
            return k, (k + 1) % n, pos - np.floor(pos)
        dx = xs[1] - xs[0]
        pos = np.clip((ys - xs[0]) / dx, 0.0, len(xs) - 1.0)
        k = np.minimum(np.floor(pos).astype(int), len(xs) - 2)
        return k, k + 1, pos - k

    def at(self, ys) -> np.ndarray:
        """
        L(y, q) for every y in ys and every table velocity, shape (len(ys), len(qs))
        """

        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        left, right, t = self._rows(ys)
        lo, hi = self._values[left], self._values[right]
        blended = (1.0 - t)[:, None] * lo + t[:, None] * hi
        return np.where((lo >= L_INF / 2) | (hi >= L_INF / 2), L_INF, blended)


@lru_cache(maxsize=16)
def cached_table(spec: HamiltonianSpec, x_lo: float, x_hi: float, n: int, q_max: float, velocity_points: int,
                 periodic: bool = False) -> LagrangianTable:
    """
    One table per (spec, nodes, velocities), shared by every solve of a lambda sweep
    """

    xs = np.linspace(x_lo, x_hi, n)
    qs = np.linspace(-q_max, q_max, velocity_points)
    return LagrangianTable(spec, xs, qs, periodic)
