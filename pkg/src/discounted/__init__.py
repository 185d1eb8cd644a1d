from grid import Grid1D
from .godunov import GodunovSolver, solve_godunov
from .lagrangian_table import LagrangianTable, cached_table
from .semilagrangian import (Closure, DiscountedSolution, PeriodicFarField, Scheme, SemiLagrangianSolver,
                             SolverConfig, solve_semilagrangian)
from .sweep import (CSV_HEADER, DEFAULT_LAMBDAS, ComparisonBounds, ConvergenceRow, ConvergenceTable,
                    comparison_bounds, critical_reference, default_grid, domain_doubling_check, lambda_sweep,
                    solve_many)

__all__ = [
    "Grid1D",
    "GodunovSolver",
    "solve_godunov",
    "LagrangianTable",
    "cached_table",
    "Closure",
    "DiscountedSolution",
    "PeriodicFarField",
    "Scheme",
    "SemiLagrangianSolver",
    "SolverConfig",
    "solve_semilagrangian",
    "CSV_HEADER",
    "DEFAULT_LAMBDAS",
    "ComparisonBounds",
    "ConvergenceRow",
    "ConvergenceTable",
    "comparison_bounds",
    "critical_reference",
    "default_grid",
    "domain_doubling_check",
    "lambda_sweep",
    "solve_many",
]
