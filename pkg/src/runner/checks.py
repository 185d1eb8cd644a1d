import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from discounted import (ConvergenceTable, DiscountedSolution, Grid1D, SemiLagrangianSolver, SolverConfig,
                        comparison_bounds, default_grid, lambda_sweep)
from errors import ConfigError, DomainError
from hamiltonian import AppendixExample, HamiltonianSpec, PeriodicFunction, ShiftedEikonal, Which
from mather import (AppendixReport, Domain, LPResolution, LPResult, appendix_counterexample, closed_measure_lp,
                    duality_certificate, equilibrium_mather_G)
from occupation import Trajectory, extract_optimal_curves, pairing_test, split_at_radius, tightness_check
from sublevel import CaseReport, CaseTag, classify, effective_hamiltonian, expand_equilibria
from weakkam import (CriticalProfile, discrete_maximal_subsolution, strict_subsolution_vG, u0_G_envelope,
                     u0_H)
from .config import RunConfig


@dataclass(frozen=True)
class CheckVerdict:
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def skipped(self) -> bool:
        return bool(self.details.get("skipped", False))

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "details": self.details}


@dataclass(frozen=True)
class CheckWrapper:
    name: str
    function: Callable


def check(name: str):
    def wrap(function):
        return CheckWrapper(name, function)
    return wrap


def _skip(reason: str) -> Tuple[bool, Dict[str, Any]]:
    return True, {"skipped": True, "reason": reason}


class RunContext:
    """
    Artifacts of one scenario, computed on first use and shared by the checks and the writers
    """

    _ORACLE_POINTS = 100_000
    _CURVE_LAMBDA = 0.1
    _TIGHTNESS_LAMBDAS = (0.4, 0.2, 0.1)
    _TIGHTNESS_STARTS = (0.5, 2.0)
    _PAIRING_LAMBDA = 0.05
    _PAIRING_STARTS = (-0.7, 0.25, 1.3)
    _AUDIT_DX = 1.0 / 128
    _AUDIT_WINDOW = (-1.0, 2.0)
    _LP_TOL = 1e-3

    def __init__(self, config: RunConfig, spec: HamiltonianSpec, name: str,
                 expected_tag: Optional[CaseTag] = None):
        self._logger = logging.getLogger("runner")
        self.config = config
        self.spec = spec
        self.name = name
        self.expected_tag = expected_tag
        self.trajectories: List[Trajectory] = []

    @cached_property
    def report(self) -> CaseReport:
        return classify(self.spec)

    @cached_property
    def grid(self) -> Grid1D:
        if self.config.grid.explicit:
            grid = self.config.grid.build()
            if not grid.contains(*self.config.window):
                raise ConfigError(f"window {list(self.config.window)} is not inside the grid "
                                  f"[{grid.x_lo}, {grid.x_hi}]")
            if not self.spec.potential.is_zero:
                try:
                    grid.require_margin(self.spec.support)
                except DomainError as e:
                    raise ConfigError(str(e)) from e
            return grid
        return default_grid(self.spec, self.config.window, self.config.grid.dx)

    @cached_property
    def solver_config(self) -> SolverConfig:
        return self.config.solver.to_solver_config()

    @cached_property
    def torus_lp(self) -> LPResult:
        return closed_measure_lp(self.spec, Domain.H_ON_TORUS)

    @cached_property
    def window_lp(self) -> LPResult:
        return closed_measure_lp(self.spec, Domain.G_ON_WINDOW)

    @cached_property
    def u0H(self) -> CriticalProfile:
        lp = self.torus_lp if self.report.case_tag in (CaseTag.II_A, CaseTag.II_B) else None
        return u0_H(self.spec, self.report, lp=lp)

    @cached_property
    def u0G(self) -> CriticalProfile:
        grid = self.grid
        return u0_G_envelope(self.spec, self.report, self.u0H, (grid.x_lo, grid.x_hi), grid)

    @cached_property
    def sweep(self) -> ConvergenceTable:
        return lambda_sweep(self.spec, self.report, self.config.sweep_lambdas, self.grid, self.config.window,
                            self.solver_config, self.u0G, self.config.workers)

    @cached_property
    def appendix(self) -> AppendixReport:
        return appendix_counterexample(self.config.eps1)

    def solution_near(self, lam: float) -> DiscountedSolution:
        solutions = self.sweep.solutions
        return min(solutions, key=lambda sol: (abs(np.log(sol.lam / lam)), -sol.lam))

    def computed(self, name: str) -> bool:
        return name in self.__dict__


class Checks:
    """
    Named acceptance checks, collected from the decorated methods below. Each method returns
    (passed, details).
    """

    def __init__(self, context: RunContext):
        self._logger = logging.getLogger("checks")
        self._context = context
        self._checks = self._get_check_dict()

    @classmethod
    def _get_check_dict(cls) -> Dict[str, Callable]:
        checks = {}
        for _, val in cls.__dict__.items():
            if not isinstance(val, CheckWrapper):
                continue
            checks[val.name] = val.function
        return checks

    @classmethod
    def names(cls) -> List[str]:
        return list(cls._get_check_dict())

    def run(self, name: str) -> CheckVerdict:
        if name not in self._checks:
            raise ConfigError(f"unknown check {name!r}, expected one of {', '.join(self._checks)}")
        passed, details = self._checks[name](self, self._context)
        verdict = CheckVerdict(name, bool(passed), details)
        level = logging.INFO if verdict.passed else logging.WARNING
        self._logger.log(level, "check %s: %s", name,
                         "skipped" if verdict.skipped else ("passed" if verdict.passed else "FAILED"))
        return verdict

    @staticmethod
    def _free_oracle(spec: HamiltonianSpec, which: Which, points: int) -> Optional[float]:
        """
        max_x of -(U + V) for families with min_p H = -U, sampled on a uniform grid
        """

        family = spec.family
        if isinstance(family, AppendixExample):
            return 0.0
        U = getattr(family, "U", None)
        if not isinstance(U, PeriodicFunction):
            return None
        xs = np.linspace(0.0, 1.0, points, endpoint=False)
        best = float(np.max(-U(xs)))
        if which == Which.G and not spec.potential.is_zero:
            y_lo, y_hi = spec.support
            ys = np.linspace(y_lo, y_hi, points)
            best = max(best, float(np.max(-U(ys) - spec.V(ys))))
        return best

    @check("critical_constants")
    def _critical_constants(self, ctx: RunContext):
        report = ctx.report
        details: Dict[str, Any] = dict(report.constants())
        passed = abs(report.c_G - max(report.c_H, report.c_f_G)) <= 1e-12 and report.c_H >= report.c_f_H - 1e-8
        for key, which in (("c_f_H", Which.H), ("c_f_G", Which.G)):
            oracle = self._free_oracle(ctx.spec, which, RunContext._ORACLE_POINTS)
            if oracle is None:
                continue
            details[f"{key}_oracle"] = oracle
            passed &= abs(details[key] - oracle) <= 1e-6
        return passed, details

    @check("effective_hamiltonian")
    def _effective_hamiltonian(self, ctx: RunContext):
        family = ctx.spec.family
        if not isinstance(family, ShiftedEikonal):
            return _skip("closed form known for |theta + p| - U only")
        c_f = self._free_oracle(ctx.spec.base(), Which.H, RunContext._ORACLE_POINTS)
        thetas = np.linspace(-3.0, 3.0, 20)
        computed = np.array([effective_hamiltonian(ctx.spec, float(t)) for t in thetas])
        expected = np.maximum(c_f, np.abs(family.theta + thetas) - family.U.mean)
        error = float(np.max(np.abs(computed - expected)))
        return error <= 1e-6, {"max_error": error, "samples": len(thetas)}

    @check("classification")
    def _classification(self, ctx: RunContext):
        tag = ctx.report.case_tag
        if ctx.expected_tag is None:
            return True, {"case_tag": tag.name, "expected": None}
        return tag == ctx.expected_tag, {"case_tag": tag.name, "expected": ctx.expected_tag.name}

    @check("closed_form_discounted")
    def _closed_form_discounted(self, ctx: RunContext):
        family = ctx.spec.family
        if (not isinstance(family, ShiftedEikonal) or abs(family.theta) < 1.5
                or family.U != PeriodicFunction.cosine()):
            return _skip("closed form known for |theta + p| - cos 2 pi x with |theta| >= 1.5")
        base = ctx.spec.base()
        dx = ctx.config.grid.dx
        torus = Grid1D.with_step(0.0, 1.0, dx)
        xs = torus.nodes
        sign = np.sign(family.theta)
        errors = {}
        for lam in (0.4, 0.1):
            sol = SemiLagrangianSolver(base, lam, ctx.report.c_H, torus, ctx.solver_config, periodic=True).solve()
            exact = ((lam * np.cos(2 * np.pi * xs) + sign * 2 * np.pi * np.sin(2 * np.pi * xs))
                     / (lam ** 2 + 4 * np.pi ** 2))
            errors[str(lam)] = float(np.max(np.abs(sol.values - exact)))
        return max(errors.values()) <= 10 * dx, {"sup_errors": errors, "tolerance": 10 * dx}

    @check("convergence")
    def _convergence(self, ctx: RunContext):
        table = ctx.sweep
        details: Dict[str, Any] = {"errors": [float(e) for e in table.errors],
                                   "empirical_order": table.empirical_order(),
                                   "nonincreasing": table.is_nonincreasing()}
        passed = details["nonincreasing"]
        final_error = float(table.errors[-1])
        details["final_error"] = final_error
        details["window"] = list(table.window)
        if table.solutions[-1].lam <= 0.0125 * (1 + 1e-9):
            passed &= final_error <= 0.02
            details["threshold"] = 0.02
        return passed, details

    @check("comparison")
    def _comparison(self, ctx: RunContext):
        slack_floor = -5.0 * ctx.grid.dx
        slacks = {}
        for sol in ctx.sweep.solutions:
            bounds = comparison_bounds(ctx.spec, ctx.report, sol.lam, ctx.grid)
            slacks[repr(sol.lam)] = bounds.slack(sol)
        return min(slacks.values()) >= slack_floor, {"slacks": slacks, "floor": slack_floor}

    @check("curves")
    def _curves(self, ctx: RunContext):
        sol = ctx.solution_near(RunContext._CURVE_LAMBDA)
        lo, hi = ctx.config.window
        rng = np.random.default_rng(ctx.config.seed)
        x0s = np.sort(rng.uniform(lo, hi, ctx.config.curves))
        curves = extract_optimal_curves(sol, x0s)
        ctx.trajectories = curves
        q_max = ctx.spec.q_velocity_bound
        dq = 2.0 * q_max / (ctx.solver_config.velocity_points - 1)
        jitter = max(ctx.grid.dx / 4.0, curves[0].h * dq)
        monotone = [c.is_monotone(jitter) for c in curves]
        speeds = [c.max_speed for c in curves]
        passed = all(monotone) and max(speeds) <= q_max + 1e-12
        return passed, {"lambda": sol.lam, "count": len(curves), "monotone": int(sum(monotone)),
                        "max_speed": max(speeds), "q_max": q_max, "jitter": jitter,
                        "truncated": int(sum(c.truncated for c in curves))}

    @check("tightness")
    def _tightness(self, ctx: RunContext):
        if ctx.report.case_tag != CaseTag.I:
            return _skip("tightness bound needs the strict subsolution of case I")
        vG, K, delta = strict_subsolution_vG(ctx.spec, ctx.report, ctx.grid)
        results = []
        for lam in RunContext._TIGHTNESS_LAMBDAS:
            sol = ctx.solution_near(lam)
            if abs(sol.lam - lam) > 1e-12:
                continue
            for x0 in RunContext._TIGHTNESS_STARTS:
                result = tightness_check(sol, x0, vG, K, delta)
                results.append({"lambda": lam, "x0": x0, "mass_outside": result.lhs, "bound": result.rhs,
                                "passed": result.passed})
        if not results:
            return _skip("none of the tightness lambdas is in the sweep")
        return all(r["passed"] for r in results), {"K": list(K), "delta": delta, "results": results}

    @check("pairing")
    def _pairing(self, ctx: RunContext):
        lo, hi = ctx.config.window
        starts = [x0 for x0 in RunContext._PAIRING_STARTS if lo < x0 < hi]
        if not starts:
            return _skip("no pairing start inside the window")
        spec, report = ctx.spec, ctx.report
        sol = ctx.solution_near(RunContext._PAIRING_LAMBDA)
        support = (0.0, 0.0) if spec.potential.is_zero else spec.support
        # case II curves leave supp V on the side where u0_G = u0_H
        v_outer = ctx.u0H if report.case_tag in (CaseTag.II_A, CaseTag.II_B) else None
        results = []
        for x0, curve in zip(starts, extract_optimal_curves(sol, starts)):
            r = max(abs(x0), abs(support[0]), abs(support[1])) + 0.25
            result = pairing_test(sol, x0, ctx.u0G, split_at_radius(curve, r, support), v_outer)
            results.append({"x0": x0, "r": r, "gap": result.gap, "slack": result.slack, "passed": result.passed})
        return all(r["passed"] for r in results), {"lambda": sol.lam, "outer": v_outer is not None,
                                                   "results": results}

    @check("mather_lp")
    def _mather_lp(self, ctx: RunContext):
        spec, report = ctx.spec, ctx.report
        resolution = LPResolution()
        q_max = spec.q_velocity_bound
        tolerance = RunContext._LP_TOL + resolution.dq(q_max) + resolution.dx
        torus = ctx.torus_lp
        certificate = duality_certificate(spec, report, torus.measure)
        details: Dict[str, Any] = {"tolerance": tolerance, "torus": torus.to_dict(),
                                   "torus_error": abs(torus.optimal_value + report.c_H),
                                   "certificate": certificate.to_dict()}
        passed = details["torus_error"] <= tolerance and certificate.holds()
        if not spec.potential.is_zero:
            window = ctx.window_lp
            details["window"] = window.to_dict()
            details["window_error"] = abs(window.optimal_value + report.c_f_G)
            passed &= details["window_error"] <= tolerance
        if report.mather_constraint_active:
            deltas = equilibrium_mather_G(spec, report)
            details["equilibrium_deltas"] = [float(m.xs[0]) for m in deltas]
        return passed, details

    @check("envelope_audit")
    def _envelope_audit(self, ctx: RunContext):
        report, spec = ctx.report, ctx.spec
        if report.case_tag not in (CaseTag.I, CaseTag.III):
            return _skip("obstacles are the equilibria of G in cases I and III only")
        lo, hi = RunContext._AUDIT_WINDOW
        dx = RunContext._AUDIT_DX
        grid = Grid1D.with_step(lo, hi, dx)
        envelope = u0_G_envelope(spec, report, ctx.u0H, (lo, hi), grid)

        # one extra period each side holds every obstacle within reach of the window
        wide = Grid1D.with_step(lo - 1.0, hi + 1.0, dx)
        support = None if spec.potential.is_zero else spec.support
        periodic = expand_equilibria([e for e in report.equilibria_G if e.periodic], wide.x_lo, wide.x_hi, support)
        fixed = expand_equilibria([e for e in report.equilibria_G if not e.periodic], wide.x_lo, wide.x_hi)
        obstacles = [(float(y), 0.0) for y in np.concatenate((periodic, fixed))]
        brute = discrete_maximal_subsolution(spec, report.c_G, wide, obstacles)
        gap = float(np.max(np.abs(envelope.values - brute(grid.nodes))))
        return gap <= 5 * dx, {"max_gap": gap, "tolerance": 5 * dx, "obstacles": len(obstacles)}

    @check("appendix")
    def _appendix(self, ctx: RunContext):
        if not isinstance(ctx.spec.family, AppendixExample):
            return _skip("appendix family only")
        report = ctx.appendix
        passed = abs(report.c_f) <= 1e-6 and abs(report.I_plus) <= 1e-6 and report.min_integral > 0
        details = report.to_dict()
        details["bound_positive"] = report.loop_bound > 0
        return passed, details
