import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ClassificationError, ConditionUUnverifiable, InternalError
from grid import Grid1D
from hamiltonian import HamiltonianSpec, Which
from mather import Domain, LPResult, closed_measure_lp
from sublevel import TOL_LEVEL, TOL_MEAN, CaseReport, Equilibrium, expand_equilibria, sublevel_endpoints
from .semidistance import Semidistance

_DEFAULT_DX = 1.0 / 512

_logger = logging.getLogger("weakkam")


class ProfileKind(Enum):
    U0_H = "u0_H"
    U0_G = "u0_G"
    PERIODIC_SOLUTION = "periodic_solution"
    STRICT_SUBSOLUTION_VG = "strict_subsolution_vG"
    BOUNDED_SOLUTION = "bounded_solution"
    DISCRETE_MAXIMAL = "discrete_maximal"


class ConditionU(Enum):
    VERIFIED_INTERIOR = "verified_interior"
    VERIFIED_TONELLI = "verified_tonelli"
    UNVERIFIABLE = "unverifiable"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True, eq=False)
class CriticalProfile:
    grid: Grid1D
    values: np.ndarray
    level: float
    kind: ProfileKind
    trusted: bool = True
    meta: Dict[str, Any] = field(default_factory=dict)
    periodic: bool = False

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.periodic:
            x = self.grid.x_lo + np.mod(x - self.grid.x_lo, self.grid.x_hi - self.grid.x_lo)
        result = np.interp(x, self.grid.nodes, self.values)
        return result if np.ndim(result) else float(result)

    def derivative_intervals(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Backward and forward differences at the interior nodes
        """

        diff = np.diff(self.values) / self.grid.dx
        return diff[:-1], diff[1:]

    def subsolution_defect(self, spec: HamiltonianSpec, which: Which = Which.G) -> float:
        """
        max over interior nodes of G(x_i, d) - level, d ranging over the one-sided differences.

        G is convex in p, so the two endpoints of the difference interval are enough.
        """

        xs = self.grid.nodes[1:-1]
        d_minus, d_plus = self.derivative_intervals()
        section = spec.section(xs, which)
        return float(np.max(np.maximum(section(d_minus), section(d_plus))) - self.level)

    def restricted(self, lo: float, hi: float) -> "CriticalProfile":
        sl = self.grid.window_slice(lo, hi)
        return CriticalProfile(self.grid.sub_grid(lo, hi), self.values[sl].copy(), self.level, self.kind,
                               self.trusted, dict(self.meta))

    def to_csv_rows(self) -> List[Tuple[float, float, str, float]]:
        return [(float(x), float(v), self.kind.value, float(self.level))
                for x, v in zip(self.grid.nodes, self.values)]


def subsolution_tolerance(spec: HamiltonianSpec, grid: Grid1D, level: float, which: Which = Which.G) -> float:
    """
    5 dx Lip_x(G), Lip_x measured on the momenta of the level-`level` sublevels over the grid
    """

    xs = grid.nodes
    p_minus, p_plus = sublevel_endpoints(spec, xs, level, which)
    radius = float(max(np.max(np.abs(p_minus)), np.max(np.abs(p_plus))))
    ps = np.linspace(-radius, radius, 33)
    values = spec.section(xs[:, None], which)(ps[None, :])
    lip = float(np.max(np.abs(np.diff(values, axis=0)))) / grid.dx
    return 5.0 * grid.dx * lip


def _default_grid(grid: Optional[Grid1D]) -> Grid1D:
    return grid if grid is not None else Grid1D.with_step(0.0, 1.0, _DEFAULT_DX)


def _is_unit_period(grid: Grid1D) -> bool:
    return abs(grid.x_hi - grid.x_lo - 1.0) < 1e-12


def is_case_two(report: CaseReport) -> bool:
    return report.c_H > report.c_f_H + TOL_LEVEL


def _case_two_branch(report: CaseReport) -> str:
    if abs(report.P_H_plus) <= TOL_MEAN:
        return "plus"
    if abs(report.P_H_minus) <= TOL_MEAN:
        return "minus"
    raise ClassificationError("no zero-mean bracket branch at level c_H", report.constants())


def _primitive_from_zero(spec: HamiltonianSpec, which: Which, level: float, branch: str,
                         xs: np.ndarray) -> np.ndarray:
    """
    int_0^x p+(z, level) dz (or p-) at the points xs
    """

    xs = np.asarray(xs, dtype=float)
    prim = Semidistance(spec, which, level).primitive(min(float(np.min(xs)), 0.0) - 1.0,
                                                       max(float(np.max(xs)), 0.0) + 1.0)
    m_x, p_x = prim.evaluate(xs)
    m_0, p_0 = prim.evaluate(np.array([0.0]))
    return p_x - p_0[0] if branch == "plus" else m_x - m_0[0]


def equilibrium_envelope(spec: HamiltonianSpec, which: Which, level: float,
                         equilibria: Sequence[Equilibrium], xs: np.ndarray,
                         support: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """
    min over equilibria y of S(y, x); periodic copies only count within [x - 1, x + 1]
    """

    xs = np.asarray(xs, dtype=float)
    lo, hi = float(np.min(xs)), float(np.max(xs))
    periodic = expand_equilibria([e for e in equilibria if e.periodic], lo - 1.0, hi + 1.0, support)
    fixed = expand_equilibria([e for e in equilibria if not e.periodic], -np.inf, np.inf)
    candidates = np.concatenate((periodic, fixed))
    if len(candidates) == 0:
        raise InternalError("no equilibrium to build the envelope from", level=level)

    prim = Semidistance(spec, which, level).primitive(min(lo, float(np.min(candidates))) - 1e-9,
                                                       max(hi, float(np.max(candidates))) + 1e-9)
    m_x, p_x = prim.evaluate(xs)
    m_y, p_y = prim.evaluate(candidates)
    best = np.full(xs.shape, np.inf)
    for j, y in enumerate(candidates):
        s = np.where(y <= xs, p_x - p_y[j], m_x - m_y[j])
        if j < len(periodic):
            s = np.where(np.abs(y - xs) <= 1.0 + 1e-12, s, np.inf)
        best = np.minimum(best, s)
    if not np.all(np.isfinite(best)):
        raise InternalError("envelope left points without an equilibrium in reach", level=level)
    return best


def periodic_critical_solution(spec: HamiltonianSpec, report: CaseReport,
                               grid: Optional[Grid1D] = None) -> CriticalProfile:
    base = spec.base()
    grid = _default_grid(grid)
    xs = grid.nodes
    if is_case_two(report):
        branch = _case_two_branch(report)
        values = _primitive_from_zero(base, Which.H, report.c_H, branch, xs)
        meta = {"branch": branch}
    else:
        values = equilibrium_envelope(base, Which.H, report.c_H, report.equilibria_H, xs)
        meta = {"branch": "equilibria"}
    return CriticalProfile(grid, values, report.c_H, ProfileKind.PERIODIC_SOLUTION, meta=meta,
                           periodic=_is_unit_period(grid))


def condition_u_status(spec: HamiltonianSpec, report: CaseReport) -> ConditionU:
    if is_case_two(report):
        return ConditionU.NOT_APPLICABLE
    if report.P_H_minus < -TOL_MEAN and report.P_H_plus > TOL_MEAN:
        return ConditionU.VERIFIED_INTERIOR
    endpoint_zero = abs(report.P_H_minus) <= TOL_MEAN or abs(report.P_H_plus) <= TOL_MEAN
    if endpoint_zero and spec.family.is_tonelli:
        return ConditionU.VERIFIED_TONELLI
    return ConditionU.UNVERIFIABLE


def u0_H(spec: HamiltonianSpec, report: CaseReport, grid: Optional[Grid1D] = None,
         lp: Optional[LPResult] = None) -> CriticalProfile:
    """
    Vanishing-discount limit of the unperturbed periodic problem.

    Case II: the zero-mean bracket primitive, shifted so that its integral against the
    LP Mather measure vanishes. Otherwise the min of S_H from the equilibria.
    """

    base = spec.base()
    grid = _default_grid(grid)
    xs = grid.nodes
    status = condition_u_status(spec, report)
    if status == ConditionU.NOT_APPLICABLE:
        branch = _case_two_branch(report)
        if lp is None:
            lp = closed_measure_lp(base, Domain.H_ON_TORUS)
        atoms, mass = lp.measure.projected()
        constant = float(np.dot(mass, _primitive_from_zero(base, Which.H, report.c_H, branch, atoms)) / np.sum(mass))
        values = _primitive_from_zero(base, Which.H, report.c_H, branch, xs) - constant
        return CriticalProfile(grid, values, report.c_H, ProfileKind.U0_H,
                               meta={"condition_u": status.value, "normalization": constant,
                                     "lp_value": lp.optimal_value},
                               periodic=_is_unit_period(grid))

    values = equilibrium_envelope(base, Which.H, report.c_H, report.equilibria_H, xs)
    trusted = status != ConditionU.UNVERIFIABLE
    if not trusted:
        message = (f"{spec.family.name}: I-={report.P_H_minus:.3g}, I+={report.P_H_plus:.3g} and H is not "
                   f"Tonelli, u0_H from the equilibrium formula is unverified")
        _logger.warning(message)
        warnings.warn(message, ConditionUUnverifiable)
    return CriticalProfile(grid, values, report.c_H, ProfileKind.U0_H, trusted=trusted,
                           meta={"condition_u": status.value},
                           periodic=_is_unit_period(grid))
