from dataclasses import dataclass
from typing import Tuple

import numpy as np

from errors import DomainError
from hamiltonian import HamiltonianSpec, Which
from sublevel import bracket_interval_integrals, bracket_panel_integrals
from utils import aligned_edges

PANELS_PER_UNIT = 4096
_EDGE_SLACK = 1e-9


@dataclass(frozen=True)
class Semidistance:
    """
    S_a(y, x): int_y^x p+(z, a) dz when y <= x, int_x^y -p-(z, a) dz otherwise
    """

    spec: HamiltonianSpec
    which: Which
    level: float

    def __call__(self, y: float, x: float) -> float:
        return semidistance_eval(self, y, x)

    def primitive(self, lo: float, hi: float, panels_per_unit: int = PANELS_PER_UNIT) -> "BracketPrimitive":
        return BracketPrimitive(self, lo, hi, panels_per_unit)


def semidistance_eval(S: Semidistance, y: float, x: float, panels_per_unit: int = PANELS_PER_UNIT) -> float:
    if y == x:
        return 0.0
    lo, hi = min(y, x), max(y, x)
    n = max(2, int(np.ceil((hi - lo) * panels_per_unit)))
    edges = np.linspace(lo, hi, n + 1)
    if y <= x:
        _, plus = bracket_panel_integrals(S.spec, edges, S.level, S.which, side="plus")
        return float(np.sum(plus))
    minus, _ = bracket_panel_integrals(S.spec, edges, S.level, S.which, side="minus")
    return float(-np.sum(minus))


class BracketPrimitive:
    """
    P+-(x) = int_lo^x p+-(z, a) dz tabulated on a lattice of [lo, hi].

    Differences of the two primitives give S_a(y, x) for any y, x in [lo, hi], so 1D
    additivity holds up to rounding.
    """

    def __init__(self, S: Semidistance, lo: float, hi: float, panels_per_unit: int = PANELS_PER_UNIT):
        self._S = S
        self._edges = aligned_edges(lo, hi, panels_per_unit)
        minus, plus = bracket_panel_integrals(S.spec, self._edges, S.level, S.which)
        self._P_minus = np.concatenate(([0.0], np.cumsum(minus)))
        self._P_plus = np.concatenate(([0.0], np.cumsum(plus)))

    @property
    def lo(self) -> float:
        return float(self._edges[0])

    @property
    def hi(self) -> float:
        return float(self._edges[-1])

    @property
    def semidistance(self) -> Semidistance:
        return self._S

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """
        (P-(x), P+(x)); points off the lattice get a partial Simpson panel
        """

        x = np.asarray(x, dtype=float)
        lo, hi = self._edges[0], self._edges[-1]
        slack = _EDGE_SLACK * (1.0 + max(abs(lo), abs(hi)))
        if np.any(x < lo - slack) or np.any(x > hi + slack):
            raise DomainError(f"primitive tabulated on [{lo}, {hi}] asked for points in "
                              f"[{float(np.min(x))}, {float(np.max(x))}]", lo=float(lo), hi=float(hi))
        flat = np.clip(x.ravel(), lo, hi)
        k = np.clip(np.searchsorted(self._edges, flat, side="right") - 1, 0, len(self._edges) - 1)
        left = self._edges[k]
        p_minus = self._P_minus[k].copy()
        p_plus = self._P_plus[k].copy()
        partial = np.flatnonzero(flat - left > 1e-14)
        if len(partial):
            minus, plus = bracket_interval_integrals(self._S.spec, left[partial], flat[partial],
                                                     self._S.level, self._S.which)
            p_minus[partial] += minus
            p_plus[partial] += plus
        return p_minus.reshape(x.shape), p_plus.reshape(x.shape)

    def __call__(self, y, x) -> np.ndarray:
        """
        S_a(y, x), broadcasting y against x
        """

        y, x = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(x, dtype=float))
        m_y, p_y = self.evaluate(y)
        m_x, p_x = self.evaluate(x)
        return np.where(y <= x, p_x - p_y, m_x - m_y)

    def from_point(self, y: float, xs) -> np.ndarray:
        """
        S_a(y, x) for one base point y and many x
        """

        xs = np.asarray(xs, dtype=float)
        m_y, p_y = self.evaluate(np.array([y]))
        m_x, p_x = self.evaluate(xs)
        return np.where(y <= xs, p_x - p_y[0], m_x - m_y[0])
