import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigError
from grid import Grid1D
from hamiltonian import HamiltonianSpec
from sublevel import CaseReport, CaseTag
from weakkam import CriticalProfile, bounded_critical_solution, strict_subsolution_vG, u0_G_envelope, u0_H
from .semilagrangian import DiscountedSolution, PeriodicFarField, SolverConfig, solve_semilagrangian

DEFAULT_LAMBDAS = (0.8, 0.4, 0.2, 0.1, 0.05, 0.025, 0.0125)

CSV_HEADER = ("lambda", "sup_error", "iterations", "residual", "scheme")

_logger = logging.getLogger("sweep")


@dataclass(frozen=True)
class ConvergenceRow:
    lam: float
    sup_error: float
    iterations: int
    residual: float
    scheme: str

    def to_csv_row(self) -> Tuple[str, ...]:
        return (repr(self.lam), f"{self.sup_error:.12e}", str(self.iterations), f"{self.residual:.6e}",
                self.scheme)


@dataclass(frozen=True, eq=False)
class ConvergenceTable:
    rows: Tuple[ConvergenceRow, ...]
    dx: float
    window: Tuple[float, float]
    solutions: Tuple[DiscountedSolution, ...] = field(default=(), repr=False)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([r.lam for r in self.rows])

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.sup_error for r in self.rows])

    def is_nonincreasing(self, allowance: Optional[float] = None) -> bool:
        """
        Each error at most the previous one (larger lambda) plus a dx-sized allowance
        """

        allowance = self.dx if allowance is None else allowance
        errors = self.errors
        return bool(np.all(errors[1:] <= errors[:-1] + allowance))

    def empirical_order(self) -> float:
        """
        Least-squares slope of log e against log lambda; reported, never asserted
        """

        errors = self.errors
        keep = errors > 0
        if np.count_nonzero(keep) < 2:
            return float("nan")
        slope, _ = np.polyfit(np.log(self.lambdas[keep]), np.log(errors[keep]), 1)
        return float(slope)

    def to_csv_rows(self) -> List[Tuple[str, ...]]:
        return [CSV_HEADER] + [row.to_csv_row() for row in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dx": self.dx,
            "window": list(self.window),
            "rows": [{"lambda": r.lam, "sup_error": r.sup_error, "iterations": r.iterations,
                      "residual": r.residual, "scheme": r.scheme} for r in self.rows],
            "nonincreasing": self.is_nonincreasing(),
            "empirical_order": self.empirical_order(),
        }


def critical_reference(spec: HamiltonianSpec, report: CaseReport, grid: Grid1D) -> CriticalProfile:
    """
    u0_G on the whole grid
    """

    return u0_G_envelope(spec, report, u0_H(spec, report), (grid.x_lo, grid.x_hi), grid)


def _check_lambdas(lambdas: Sequence[float]):
    if not lambdas:
        raise ConfigError("empty lambda list")
    values = np.asarray(lambdas, dtype=float)
    if np.any(values <= 0) or np.any(np.diff(values) >= 0):
        raise ConfigError(f"lambdas must be positive and strictly decreasing, got {list(lambdas)}")


def solve_many(spec: HamiltonianSpec, lambdas: Sequence[float], level: float, grid: Grid1D,
               config: SolverConfig = SolverConfig(), workers: int = 1) -> List[DiscountedSolution]:
    """
    One solve per lambda; results come back in the order of `lambdas` whatever the worker count
    """

    def solve(lam):
        return solve_semilagrangian(spec, lam, level, grid, config)

    if workers <= 1:
        return [solve(lam) for lam in lambdas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(solve, lambdas))


def lambda_sweep(spec: HamiltonianSpec, report: CaseReport, lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                 grid: Optional[Grid1D] = None, window: Tuple[float, float] = (-2.0, 3.0),
                 config: SolverConfig = SolverConfig(), reference: Optional[CriticalProfile] = None,
                 workers: int = 1) -> ConvergenceTable:
    """
    sup over the window of |u^lam_G - u0_G| for each lambda, at level c_G
    """

    _check_lambdas(lambdas)
    if grid is None:
        grid = default_grid(spec, window)
    if not grid.contains(*window):
        raise ConfigError(f"window {window} is not inside the grid [{grid.x_lo}, {grid.x_hi}]")
    if reference is None:
        reference = critical_reference(spec, report, grid)

    sl = grid.window_slice(*window)
    xs = grid.nodes[sl]
    target = reference(xs)
    solutions = solve_many(spec, lambdas, report.c_G, grid, config, workers)
    rows = []
    for sol in solutions:
        error = float(np.max(np.abs(sol.values[sl] - target)))
        rows.append(ConvergenceRow(sol.lam, error, sol.iterations, sol.residual_sup, sol.scheme.value))
        _logger.info("lam=%g: sup error %.6g on [%g, %g]", sol.lam, error, *window)
    return ConvergenceTable(tuple(rows), grid.dx, tuple(window), tuple(solutions))


def default_grid(spec: HamiltonianSpec, window: Tuple[float, float], dx: float = 1.0 / 512,
                 margin: float = 4.0) -> Grid1D:
    """
    Integer-aligned grid holding the window and supp V with `margin` periods on each side
    """

    lo, hi = window
    if not spec.potential.is_zero:
        lo, hi = min(lo, spec.support[0]), max(hi, spec.support[1])
    return Grid1D.with_step(float(np.floor(lo - margin)), float(np.ceil(hi + margin)), dx)


@dataclass(frozen=True, eq=False)
class ComparisonBounds:
    """
    Nodewise sub and supersolution of the discounted equation at level c_G
    """

    lower: np.ndarray
    upper: np.ndarray
    kind: str

    def slack(self, sol: DiscountedSolution) -> float:
        """
        min over nodes of (u - lower, upper - u); negative means the sandwich is violated
        """

        return float(min(np.min(sol.values - self.lower), np.min(self.upper - sol.values)))


def comparison_bounds(spec: HamiltonianSpec, report: CaseReport, lam: float, grid: Grid1D) -> ComparisonBounds:
    """
    Bounded v <= 0 subsolution and w >= 0 supersolution of the critical equation.

    Both stay sub/supersolutions of lam u + G = c_G, so v <= u^lam <= w. Case I has no
    bounded supersolution at c_G; the constant (M + |c|)/lam takes its place.
    """

    if report.case_tag == CaseTag.I:
        vG, _, _ = strict_subsolution_vG(spec, report, grid)
        growth = float(np.max(np.abs(spec.G(grid.nodes, 0.0)))) + abs(report.c_G)
        return ComparisonBounds(vG.values, np.full(grid.n, growth / lam), "strict_subsolution")
    u_G = bounded_critical_solution(spec, report, grid).values
    return ComparisonBounds(u_G - np.max(u_G), u_G - np.min(u_G), "bounded_solution")


def domain_doubling_check(spec: HamiltonianSpec, lam: float, level: float, grid: Grid1D,
                          window: Tuple[float, float], config: SolverConfig = SolverConfig()) -> float:
    """
    sup over the window of |u^lam on grid - u^lam on the doubled grid|
    """

    if not grid.contains(*window):
        raise ConfigError(f"window {window} is not inside the grid")
    far_field = PeriodicFarField(spec, lam, level, grid.dx, config)
    small = solve_semilagrangian(spec, lam, level, grid, config, far_field=far_field)
    big = solve_semilagrangian(spec, lam, level, grid.doubled(), config, far_field=far_field)
    sl = grid.window_slice(*window)
    xs = grid.nodes[sl]
    discrepancy = float(np.max(np.abs(small.values[sl] - big(xs))))
    _logger.info("domain doubling at lam=%g: discrepancy %.3g on [%g, %g]", lam, discrepancy, *window)
    return discrepancy
