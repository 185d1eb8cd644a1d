import logging
import warnings
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from discounted import DiscountedSolution, Scheme
from errors import DomainError, TruncationWarning
from hamiltonian import L_INF

_logger = logging.getLogger("occupation")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Backward walk y_{k+1} = y_k - h q_k from y_0 = x0, sampled at t_k = -k h
    """

    x0: float
    lam: float
    h: float
    level: float
    ys: np.ndarray
    qs: np.ndarray
    costs: np.ndarray
    horizon: float
    truncated: bool = False

    @property
    def times(self) -> np.ndarray:
        return -self.h * np.arange(len(self.ys))

    @property
    def discount(self) -> np.ndarray:
        return np.exp(-self.lam * self.h * np.arange(len(self.ys)))

    @property
    def max_speed(self) -> float:
        return float(np.max(np.abs(self.qs))) if len(self.qs) else 0.0

    def is_monotone(self, jitter: float) -> bool:
        """
        Steps longer than `jitter` all point the same way
        """

        steps = np.diff(self.ys)
        signs = np.sign(steps[np.abs(steps) > jitter])
        return bool(len(signs) == 0 or np.all(signs == signs[0]))

    def to_csv_rows(self) -> List[Tuple[float, float, float]]:
        return [(float(t), float(y), float(q)) for t, y, q in zip(self.times, self.ys, self.qs)]


class _Feedback:
    """
    Argmin velocity of the discounted one-step operator at arbitrary points, refined by the
    two half-step velocities around the table minimizer
    """

    def __init__(self, sol: DiscountedSolution, h: float):
        self._sol = sol
        self._h = h
        self._beta = 1.0 - sol.lam * h
        self._qs = sol.table.qs
        self._dq = float(self._qs[1] - self._qs[0])
        self._confined = sol.far_field is None

    def costs(self, ys: np.ndarray) -> np.ndarray:
        sol = self._sol
        inside = (ys >= sol.grid.x_lo) & (ys <= sol.grid.x_hi)
        costs = sol.table.at(np.clip(ys, sol.grid.x_lo, sol.grid.x_hi))
        if not self._confined and not np.all(inside):
            outer = sol.far_field.table.at(ys[~inside])
            costs[~inside] = outer
        return costs

    def _values(self, ys: np.ndarray, qs: np.ndarray, costs: np.ndarray) -> np.ndarray:
        feet = ys[:, None] - self._h * qs
        values = self._beta * self._sol(feet) + self._h * (costs + self._sol.level)
        bad = costs >= L_INF / 2
        if self._confined:
            bad |= (feet < self._sol.grid.x_lo) | (feet > self._sol.grid.x_hi)
        return np.where(bad, np.inf, values)

    def __call__(self, ys: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        costs = self.costs(ys)
        values = self._values(ys, np.broadcast_to(self._qs, costs.shape), costs)
        rows = np.arange(len(ys))
        j = np.argmin(values, axis=1)
        best_q = self._qs[j]
        best_cost = costs[rows, j]
        best_value = values[rows, j]

        last = len(self._qs) - 1
        for side in (-1, 1):
            k = np.clip(j + side, 0, last)
            # L is convex in q, so the midpoint of the two columns bounds it from above
            mid_cost = np.where((costs[rows, j] >= L_INF / 2) | (costs[rows, k] >= L_INF / 2), L_INF,
                                0.5 * (costs[rows, j] + costs[rows, k]))
            mid_q = best_q + 0.5 * side * self._dq
            value = self._values(ys, mid_q[:, None], mid_cost[:, None])[:, 0]
            better = (k != j) & (value < best_value)
            best_q = np.where(better, mid_q, best_q)
            best_cost = np.where(better, mid_cost, best_cost)
            best_value = np.where(better, value, best_value)
        return best_q, best_cost


def extract_optimal_curves(sol: DiscountedSolution, x0s: Sequence[float], tol_mass: float = 1e-6,
                           max_steps: int = 20000) -> List[Trajectory]:
    """
    Optimal backward curves from several starting points, walked in lockstep.

    The step is max(sol.h, T_cut / max_steps) with T_cut = ln(1 / tol_mass) / lam, so the walk
    stops once the discount weight drops below tol_mass.
    """

    if sol.scheme != Scheme.SEMI_LAGRANGIAN or sol.table is None:
        raise DomainError("curves are read from the semi-Lagrangian feedback only")
    grid = sol.grid
    x0s = np.atleast_1d(np.asarray(x0s, dtype=float))
    if np.any(x0s <= grid.x_lo) or np.any(x0s >= grid.x_hi):
        raise DomainError(f"starting points must lie inside ({grid.x_lo}, {grid.x_hi})")

    horizon = np.log(1.0 / tol_mass) / sol.lam
    h = max(sol.h, horizon / max_steps)
    steps = int(np.ceil(horizon / h))
    feedback = _Feedback(sol, h)

    count = len(x0s)
    Y = np.empty((count, steps))
    Q = np.empty((count, steps))
    C = np.empty((count, steps))
    stop = np.full(count, steps)
    y = x0s.copy()
    active = np.ones(count, dtype=bool)
    for k in range(steps):
        Y[:, k] = y
        Q[:, k], C[:, k] = feedback(y)
        y = y - h * Q[:, k]
        if sol.far_field is None:
            hit = active & ((y <= grid.x_lo + grid.dx) | (y >= grid.x_hi - grid.dx))
            stop[hit] = k + 1
            active &= ~hit
            if not np.any(active):
                break
            y = np.clip(y, grid.x_lo, grid.x_hi)

    curves = []
    for i, x0 in enumerate(x0s):
        n = stop[i]
        truncated = n < steps
        if truncated:
            lost = float(np.exp(-sol.lam * h * n))
            message = f"curve from x0={x0:g} reached the boundary after {n} steps, mass {lost:.3g} lost"
            _logger.warning(message)
            warnings.warn(message, TruncationWarning)
        curves.append(Trajectory(float(x0), sol.lam, h, sol.level, Y[i, :n].copy(), Q[i, :n].copy(),
                                 C[i, :n].copy(), horizon, truncated))
    _logger.info("extracted %d curves at lam=%g, step %.3g, %d steps", count, sol.lam, h, steps)
    return curves


def extract_optimal_curve(sol: DiscountedSolution, x0: float, tol_mass: float = 1e-6,
                          max_steps: int = 20000) -> Trajectory:
    return extract_optimal_curves(sol, [x0], tol_mass, max_steps)[0]


def representation_value(traj: Trajectory) -> float:
    """
    sum_k h e^{-lam k h} (L(y_k, q_k) + c), the discrete cost of the curve
    """

    return float(np.sum(traj.h * traj.discount * (traj.costs + traj.level)))
