import logging
from typing import Optional

import numpy as np

from errors import ConfigError, ConvergenceError
from grid import Grid1D
from hamiltonian import HamiltonianSpec, Which, argmin_p
from sublevel import sublevel_endpoints
from .semilagrangian import Closure, DiscountedSolution, PeriodicFarField, Scheme, SolverConfig


class GodunovSolver:
    """
    Pseudo-time relaxation of lam u_i + G^(x_i; D-u_i, D+u_i) = c.

    For convex G the Godunov flux is max(G(x, max(a, p*)), G(x, min(b, p*))) with p* the
    minimizer in p. Missing neighbours read the far field, or drop out under the state constraint.
    """

    _SLOPE_SAMPLES = 65

    def __init__(self, spec: HamiltonianSpec, lam: float, level: float, grid: Grid1D,
                 config: SolverConfig = SolverConfig(), far_field: Optional[PeriodicFarField] = None):
        self._logger = logging.getLogger("godunov")
        if lam <= 0:
            raise ConfigError(f"discount must be positive, got {lam}")
        self._spec = spec
        self._lam = float(lam)
        self._level = float(level)
        self._grid = grid
        self._config = config
        self._xs = grid.nodes
        self._dx = grid.dx
        self._section = spec.section(self._xs, Which.G)
        self._p_star, _ = argmin_p(spec, self._xs, Which.G)

        if far_field is None and config.closure == Closure.PERIODIC_FAR_FIELD:
            far_field = PeriodicFarField(spec, lam, level, self._dx, config)
        self._far_field = far_field
        if far_field is not None:
            self._ghosts = (float(far_field(self._xs[0] - self._dx)), float(far_field(self._xs[-1] + self._dx)))
        self._dt = config.godunov_cfl / (self._lam + 2.0 * self.slope_bound() / self._dx)

    def slope_bound(self) -> float:
        """
        max |dG/dp| over the momenta a solution can reach
        """

        growth = float(np.max(np.abs(self._spec.G(self._xs, 0.0)))) + abs(self._level)
        p_minus, p_plus = sublevel_endpoints(self._spec, self._xs, growth, Which.G)
        radius = min(float(max(np.max(np.abs(p_minus)), np.max(np.abs(p_plus)))) + 1.0,
                     self._spec.p_search_bound)
        ps = np.linspace(-radius, radius, self._SLOPE_SAMPLES)
        values = self._spec.section(self._xs[:, None], Which.G)(ps[None, :])
        return max(float(np.max(np.abs(np.diff(values, axis=1)))) / (ps[1] - ps[0]), 1e-12)

    def numerical_hamiltonian(self, u: np.ndarray) -> np.ndarray:
        dx = self._dx
        back = np.empty_like(u)
        fwd = np.empty_like(u)
        back[1:] = (u[1:] - u[:-1]) / dx
        fwd[:-1] = back[1:]
        if self._far_field is not None:
            back[0] = (u[0] - self._ghosts[0]) / dx
            fwd[-1] = (self._ghosts[1] - u[-1]) / dx
        else:
            back[0] = -np.inf
            fwd[-1] = np.inf
        p_star = self._p_star
        return np.maximum(self._section(np.maximum(back, p_star)), self._section(np.minimum(fwd, p_star)))

    def solve(self) -> DiscountedSolution:
        config = self._config
        u = np.zeros(len(self._xs))
        residual = np.inf
        for it in range(config.godunov_max_iterations):
            defect = self._lam * u + self.numerical_hamiltonian(u) - self._level
            residual = float(np.max(np.abs(defect)))
            if residual <= config.godunov_tol:
                break
            u = u - self._dt * defect
            if it % 10000 == 0:
                self._logger.debug("godunov step %d: residual %.3g", it, residual)
        else:
            raise ConvergenceError(f"Godunov relaxation stalled after {config.godunov_max_iterations} steps",
                                   residual=residual, iterations=config.godunov_max_iterations)
        self._logger.info("Godunov solve lam=%g c=%g on [%g, %g]: %d steps, residual %.3g",
                          self._lam, self._level, self._grid.x_lo, self._grid.x_hi, it, residual)
        return DiscountedSolution(
            grid=self._grid, lam=self._lam, level=self._level, values=u, residual_sup=residual, iterations=it,
            scheme=Scheme.GODUNOV, spec=self._spec, closure=config.closure, far_field=self._far_field,
        )


def solve_godunov(spec: HamiltonianSpec, lam: float, level: float, grid: Grid1D,
                  config: SolverConfig = SolverConfig(),
                  far_field: Optional[PeriodicFarField] = None) -> DiscountedSolution:
    return GodunovSolver(spec, lam, level, grid, config, far_field).solve()
