import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from errors import ConfigError, ConvergenceError
from grid import Grid1D
from hamiltonian import L_INF, HamiltonianSpec, LagrangianView, Which, fenchel_lagrangian
from sublevel import sublevel_endpoints
from .lagrangian_table import LagrangianTable, cached_table


class Scheme(Enum):
    SEMI_LAGRANGIAN = "semi_lagrangian"
    GODUNOV = "godunov"


class Closure(Enum):
    STATE_CONSTRAINT = "state_constraint"
    PERIODIC_FAR_FIELD = "periodic_far_field"


@dataclass(frozen=True)
class SolverConfig:
    """
    Step, velocity table and stopping rules of the discounted solvers.

    The default closure reads the unperturbed periodic solution outside the grid rather than
    confining curves to it. Under STATE_CONSTRAINT the truncation shows up inside the window in
    case II, where optimal curves run off to infinity; it stays available as a setting.
    """

    h: Optional[float] = None
    velocity_points: int = 201
    tol_fix: float = 1e-9
    max_iterations: Optional[int] = None
    closure: Closure = Closure.PERIODIC_FAR_FIELD
    refine_velocity: bool = True
    godunov_cfl: float = 0.9
    godunov_tol: float = 1e-7
    godunov_max_iterations: int = 2_000_000

    def __post_init__(self):
        if self.velocity_points < 3 or self.velocity_points % 2 == 0:
            raise ConfigError(f"velocity_points must be odd and >= 3, got {self.velocity_points}")
        if self.tol_fix <= 0 or self.godunov_tol <= 0:
            raise ConfigError("solver tolerances must be positive")
        if not 0.0 < self.godunov_cfl <= 1.0:
            raise ConfigError(f"godunov_cfl must lie in (0, 1], got {self.godunov_cfl}")
        if self.h is not None and self.h <= 0:
            raise ConfigError(f"time step must be positive, got {self.h}")


@dataclass(frozen=True, eq=False)
class DiscountedSolution:
    grid: Grid1D
    lam: float
    level: float
    values: np.ndarray
    residual_sup: float
    iterations: int
    scheme: Scheme
    spec: HamiltonianSpec
    h: Optional[float] = None
    policy: Optional[np.ndarray] = None
    closure: Closure = Closure.PERIODIC_FAR_FIELD
    far_field: Optional["PeriodicFarField"] = None
    table: Optional[LagrangianTable] = None
    periodic: bool = False

    def __call__(self, x):
        """
        Linear interpolation; outside the grid the far field answers when there is one
        """

        x = np.asarray(x, dtype=float)
        nodes = self.grid.nodes
        if self.periodic:
            result = np.interp(self.grid.x_lo + np.mod(x - self.grid.x_lo, 1.0), nodes, self.values)
        else:
            result = np.interp(x, nodes, self.values)
            if self.far_field is not None:
                outside = (x < self.grid.x_lo) | (x > self.grid.x_hi)
                if np.any(outside):
                    result = np.where(outside, self.far_field(x), result)
        return result if np.ndim(result) else float(result)

    def _growth(self) -> float:
        return float(np.max(np.abs(self.spec.G(self.grid.nodes, 0.0)))) + abs(self.level)

    def sup_bound(self) -> float:
        return self._growth() / self.lam + self.grid.dx

    def lipschitz_bound(self) -> float:
        p_minus, p_plus = sublevel_endpoints(self.spec, self.grid.nodes, self._growth(), Which.G)
        return float(max(np.max(np.abs(p_minus)), np.max(np.abs(p_plus)))) + 1.0

    def check_bounds(self) -> Dict[str, bool]:
        slopes = np.abs(np.diff(self.values)) / self.grid.dx
        return {"sup_norm": bool(np.max(np.abs(self.values)) <= self.sup_bound()),
                "lipschitz": bool(np.max(slopes) <= self.lipschitz_bound())}

    def to_dat_rows(self, lo: Optional[float] = None, hi: Optional[float] = None):
        sl = self.grid.window_slice(self.grid.x_lo if lo is None else lo, self.grid.x_hi if hi is None else hi)
        return [(float(x), float(u)) for x, u in zip(self.grid.nodes[sl], self.values[sl])]


class SemiLagrangianSolver:
    """
    u_i = min_q (1 - lam h) u(x_i - h q) + h (L(x_i, q) + c) with linear interpolation.

    h q never exceeds one cell, so the foot of node i lies between i and one neighbour and each
    fixed policy gives a tridiagonal (cyclic on the torus) linear system. The fixed point is
    found by policy iteration.
    """

    def __init__(self, spec: HamiltonianSpec, lam: float, level: float, grid: Grid1D,
                 config: SolverConfig = SolverConfig(), periodic: bool = False,
                 far_field: Optional["PeriodicFarField"] = None):
        self._logger = logging.getLogger("semilagrangian")
        if lam <= 0:
            raise ConfigError(f"discount must be positive, got {lam}")
        self._spec = spec
        self._lam = float(lam)
        self._level = float(level)
        self._grid = grid
        self._config = config
        self._periodic = periodic
        self._dx = grid.dx

        q_max = spec.q_velocity_bound
        self._h = config.h if config.h is not None else self._dx / q_max
        if self._h * q_max > self._dx * (1.0 + 1e-12):
            raise ConfigError(f"h={self._h} moves feet past the neighbouring node (dx={self._dx})")
        if self._lam * self._h >= 1.0:
            raise ConfigError(f"lam h = {self._lam * self._h} >= 1, the scheme does not contract")
        self._beta = 1.0 - self._lam * self._h

        xs = grid.nodes[:-1] if periodic else grid.nodes
        m = len(xs)
        index = np.arange(m)
        self._xs = xs
        self._rows = index
        if periodic:
            self._left, self._right = (index - 1) % m, (index + 1) % m
        else:
            self._left, self._right = index - 1, np.where(index + 1 < m, index + 1, -1)

        self._table = cached_table(spec, float(xs[0]), float(xs[-1]), m, q_max, config.velocity_points, periodic)
        self._qs = np.broadcast_to(self._table.qs, (m, len(self._table.qs)))
        self._costs = self._table.values

        if far_field is None and config.closure == Closure.PERIODIC_FAR_FIELD and not periodic:
            far_field = PeriodicFarField(spec, lam, level, self._dx, config)
        self._far_field = None if periodic else far_field
        if self._far_field is not None:
            self._ghosts = (float(self._far_field(xs[0] - self._dx)), float(self._far_field(xs[-1] + self._dx)))
        else:
            self._ghosts = (0.0, 0.0)

    @property
    def h(self) -> float:
        return self._h

    @property
    def table(self) -> LagrangianTable:
        return self._table

    @property
    def far_field(self) -> Optional["PeriodicFarField"]:
        return self._far_field

    def _neighbours(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        u_left = u[np.maximum(self._left, 0)]
        u_right = u[np.maximum(self._right, 0)]
        if not self._periodic:
            u_left = u_left.copy()
            u_right = u_right.copy()
            u_left[0], u_right[-1] = self._ghosts
        return u_left, u_right

    def _outward(self, shift: np.ndarray) -> np.ndarray:
        mask = np.zeros(shift.shape, dtype=bool)
        if self._periodic or self._far_field is not None:
            return mask
        mask[0] = shift[0] > 0
        mask[-1] = shift[-1] < 0
        return mask

    def candidates(self, u: np.ndarray, qs: np.ndarray, costs: np.ndarray) -> np.ndarray:
        shift = self._h * qs / self._dx
        u_left, u_right = self._neighbours(u)
        weight = np.abs(shift)
        foot = (1.0 - weight) * u[:, None] + weight * np.where(shift >= 0, u_left[:, None], u_right[:, None])
        values = self._beta * foot + self._h * (costs + self._level)
        bad = (costs >= L_INF / 2) | self._outward(shift)
        return np.where(bad, np.inf, values)

    def apply_operator(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        One Bellman step over the table velocities: (T u, argmin velocity)
        """

        cand = self.candidates(np.asarray(u, dtype=float), self._qs, self._costs)
        best = np.argmin(cand, axis=1)
        return cand[self._rows, best], self._qs[self._rows, best]

    def _evaluate(self, q: np.ndarray, cost: np.ndarray) -> np.ndarray:
        m = len(self._xs)
        shift = self._h * q / self._dx
        weight = np.abs(shift)
        neighbour = np.where(shift >= 0, self._left, self._right)
        rhs = self._h * (cost + self._level)
        outside = neighbour < 0
        if not self._periodic:
            ghost = np.where(shift >= 0, self._ghosts[0], self._ghosts[1])
            rhs = rhs + np.where(outside, self._beta * weight * ghost, 0.0)
        coupled = ~outside & (weight > 0)
        rows = np.concatenate((self._rows, self._rows[coupled]))
        cols = np.concatenate((self._rows, neighbour[coupled]))
        data = np.concatenate((1.0 - self._beta * (1.0 - weight), -self._beta * weight[coupled]))
        A = sparse.csr_matrix((data, (rows, cols)), shape=(m, m))
        return spsolve(A, rhs)

    def _howard(self, qs: np.ndarray, costs: np.ndarray, policy: np.ndarray, done: int,
                cap: int) -> Tuple[np.ndarray, np.ndarray, float, int]:
        threshold = 0.5 * self._config.tol_fix * self._lam
        residual = np.inf
        for it in range(done, cap):
            u = self._evaluate(qs[self._rows, policy], costs[self._rows, policy])
            cand = self.candidates(u, qs, costs)
            best = np.argmin(cand, axis=1)
            best_value = cand[self._rows, best]
            residual = float(np.max(np.abs(u - best_value)))
            improve = best_value < cand[self._rows, policy] - threshold
            self._logger.debug("policy iteration %d: residual %.3g, %d switches", it, residual,
                               int(np.count_nonzero(improve)))
            if residual <= self._config.tol_fix * self._lam or not np.any(improve):
                return u, policy, residual, it + 1
            policy = np.where(improve, best, policy)
        raise ConvergenceError(f"policy iteration did not settle in {cap} steps", residual=residual,
                               iterations=cap)

    def solve(self) -> DiscountedSolution:
        config = self._config
        cap = config.max_iterations or int(1e7 / (self._lam * self._h))
        qs, costs = self._qs, self._costs
        policy = np.full(len(self._xs), int(np.argmin(np.abs(self._table.qs))))
        u, policy, residual, iterations = self._howard(qs, costs, policy, 0, cap)

        if config.refine_velocity:
            q_max = self._spec.q_velocity_bound
            dq = float(self._table.qs[1] - self._table.qs[0])
            q_star = qs[self._rows, policy]
            extra = np.clip(q_star[:, None] + np.array([-0.5 * dq, 0.5 * dq]), -q_max, q_max)
            extra_costs = np.asarray(fenchel_lagrangian(LagrangianView(self._spec), self._xs[:, None], extra))
            qs = np.hstack((qs, extra))
            costs = np.hstack((costs, extra_costs))
            u, policy, residual, iterations = self._howard(qs, costs, policy, iterations, cap)

        chosen = qs[self._rows, policy]
        values = u
        if self._periodic:
            values = np.append(u, u[0])
            chosen = np.append(chosen, chosen[0])
        self._logger.info("semi-Lagrangian solve lam=%g c=%g on [%g, %g]: %d iterations, residual %.3g",
                          self._lam, self._level, self._grid.x_lo, self._grid.x_hi, iterations, residual)
        return DiscountedSolution(
            grid=self._grid, lam=self._lam, level=self._level, values=values, residual_sup=residual,
            iterations=iterations, scheme=Scheme.SEMI_LAGRANGIAN, spec=self._spec, h=self._h, policy=chosen,
            closure=config.closure, far_field=self._far_field, table=self._table, periodic=self._periodic,
        )


class PeriodicFarField:
    """
    Discounted solution of the unperturbed periodic problem on the torus at the same
    (lam, c), same step and velocities. Read outside the truncated domain.
    """

    def __init__(self, spec: HamiltonianSpec, lam: float, level: float, dx: float,
                 config: SolverConfig = SolverConfig()):
        n = max(3, int(round(1.0 / dx)))
        torus = Grid1D(0.0, 1.0, n + 1)
        self._solution = SemiLagrangianSolver(spec.base(), lam, level, torus, replace(config, h=None),
                                              periodic=True).solve()

    @property
    def solution(self) -> DiscountedSolution:
        return self._solution

    @property
    def table(self) -> LagrangianTable:
        return self._solution.table

    def __call__(self, x):
        return self._solution(x)


def solve_semilagrangian(spec: HamiltonianSpec, lam: float, level: float, grid: Grid1D,
                         config: SolverConfig = SolverConfig(),
                         far_field: Optional[PeriodicFarField] = None) -> DiscountedSolution:
    return SemiLagrangianSolver(spec, lam, level, grid, config, far_field=far_field).solve()
