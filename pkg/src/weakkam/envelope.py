import logging
from typing import Iterable, Optional, Tuple

import numpy as np

from errors import CaseError, DomainError, EnvelopeError, InternalError
from grid import Grid1D
from hamiltonian import HamiltonianSpec, Which
from sublevel import CaseReport, CaseTag, bracket_panel_integrals
from .profiles import (CriticalProfile, ProfileKind, _primitive_from_zero, equilibrium_envelope,
                       periodic_critical_solution)
from .semidistance import Semidistance

_DEFAULT_DX = 1.0 / 512
_DRIFT_TOL = 1e-4
_MIN_COERCIVITY = 2.0 ** -20
_MAX_K = 2.0 ** 30

_logger = logging.getLogger("weakkam")


def _support(spec: HamiltonianSpec) -> Optional[Tuple[float, float]]:
    return None if spec.potential.is_zero else spec.support


def u0_G_envelope(spec: HamiltonianSpec, report: CaseReport, u0H: CriticalProfile,
                  window: Tuple[float, float], grid: Optional[Grid1D] = None) -> CriticalProfile:
    """
    Obstacle envelope min over (y, g) of g + S_G(y, x) at level c_G.

    Case I and III obstacles are the equilibria of G with g = 0. Case II_A keeps u0_H left of
    the support and continues it from (y-_V, u0_H(y-_V)); II_B is the mirror image.
    """

    lo, hi = window
    y_lo, y_hi = spec.support
    if not spec.potential.is_zero and (lo > y_lo - 1.0 or hi < y_hi + 1.0):
        raise DomainError(f"window {window} needs one period of margin around supp V = {spec.support}")
    if grid is None:
        grid = Grid1D.with_step(lo, hi, _DEFAULT_DX)
    tag = report.case_tag
    values = _envelope_values(spec, report, u0H, grid.nodes)

    profile = CriticalProfile(grid, values, report.c_G, ProfileKind.U0_G, trusted=u0H.trusted,
                              meta={"case": tag.name})
    if tag == CaseTag.I:
        profile.meta["coercivity_constant"] = _fit_coercivity(grid.nodes, values)
    else:
        profile.meta.update(_boundedness(spec, report, u0H, grid))
    _logger.info("u0_G envelope on [%g, %g], case %s", lo, hi, tag.name)
    return profile


def _envelope_values(spec: HamiltonianSpec, report: CaseReport, u0H: CriticalProfile,
                     xs: np.ndarray) -> np.ndarray:
    level = report.c_G
    tag = report.case_tag
    lo, hi = float(xs[0]), float(xs[-1])
    if tag in (CaseTag.I, CaseTag.III):
        return equilibrium_envelope(spec, Which.G, level, report.equilibria_G, xs, _support(spec))
    if tag not in (CaseTag.II_A, CaseTag.II_B):
        raise InternalError(f"unknown case tag {tag}")

    y_lo, y_hi = spec.support
    anchor = y_lo if tag == CaseTag.II_A else y_hi
    prim = Semidistance(spec, Which.G, level).primitive(min(lo, anchor) - 1.0, max(hi, anchor) + 1.0)
    continued = u0H(anchor) + prim.from_point(anchor, xs)
    if tag == CaseTag.II_A:
        values = np.where(xs <= anchor, u0H(xs), continued)
    else:
        values = np.where(xs >= anchor, u0H(xs), continued)
    if report.mather_constraint_active:
        values = np.minimum(values, equilibrium_envelope(spec, Which.G, level, report.equilibria_G, xs,
                                                         _support(spec)))
    return values


def _fit_coercivity(xs: np.ndarray, values: np.ndarray) -> float:
    """
    Largest C = 2^-k with values >= C |x| - 1/C on the grid
    """

    C = 1.0
    while C >= _MIN_COERCIVITY:
        if np.all(values >= C * np.abs(xs) - 1.0 / C - 1e-9):
            return C
        C /= 2.0
    raise EnvelopeError("case I envelope shows no coercive growth on the window")


def _boundedness(spec: HamiltonianSpec, report: CaseReport, u0H: CriticalProfile, grid: Grid1D) -> dict:
    """
    Drift over one period at both ends of a grid reaching two periods past supp V.

    Narrower grids are widened by whole steps for this check only.
    """

    dx = grid.dx
    if spec.potential.is_zero:
        lo, hi = grid.x_lo, max(grid.x_hi, grid.x_lo + 1.0)
    else:
        lo, hi = min(grid.x_lo, spec.support[0] - 2.0), max(grid.x_hi, spec.support[1] + 2.0)
    lo = grid.x_lo - dx * np.ceil((grid.x_lo - lo) / dx - 1e-9)
    hi = grid.x_hi + dx * np.ceil((hi - grid.x_hi) / dx - 1e-9)
    wide = Grid1D.with_step(float(lo), float(hi), dx)
    profile = CriticalProfile(wide, _envelope_values(spec, report, u0H, wide.nodes), report.c_G, ProfileKind.U0_G)
    left = abs(profile(wide.x_lo + 1.0) - profile(wide.x_lo))
    right = abs(profile(wide.x_hi) - profile(wide.x_hi - 1.0))
    drift = max(left, right)
    if drift > _DRIFT_TOL:
        raise EnvelopeError(f"envelope drifts by {drift:.3g} per period at the window ends", drift=drift)
    return {"boundedness_window": [wide.x_lo, wide.x_hi], "period_drift": drift}


def strict_subsolution_vG(spec: HamiltonianSpec, report: CaseReport,
                          grid: Grid1D) -> Tuple[CriticalProfile, Tuple[float, float], float]:
    """
    v_G = min(S_G(0, .), u_H + k) - shift, strict by delta = c_G - c_H outside K
    """

    if report.case_tag != CaseTag.I:
        raise CaseError(f"strict subsolution exists in case I only, got {report.case_tag.name}")
    xs = grid.nodes
    prim = Semidistance(spec, Which.G, report.c_G).primitive(min(grid.x_lo, 0.0), max(grid.x_hi, 0.0))
    w = prim.from_point(0.0, xs)
    u_H = periodic_critical_solution(spec, report, grid).values

    y_lo, y_hi = spec.support
    near = (xs >= y_lo - 0.5) & (xs <= y_hi + 0.5)
    k = 1.0
    while np.any(u_H[near] + k < w[near]):
        k *= 2.0
        if k > _MAX_K:
            raise InternalError("no finite k keeps S_G(0, .) active near the support")
    branch = w <= u_H + k
    K = (float(np.min(xs[branch])), float(np.max(xs[branch])))
    if K[0] <= grid.x_lo or K[1] >= grid.x_hi:
        raise EnvelopeError(f"switch set {K} reaches the grid end, enlarge the grid", K=K)
    raw = np.minimum(w, u_H + k)
    shift = max(float(np.max(raw)), 0.0)
    delta = report.c_G - report.c_H
    profile = CriticalProfile(grid, raw - shift, report.c_G, ProfileKind.STRICT_SUBSOLUTION_VG,
                              meta={"k": k, "shift": shift, "K": K, "delta": delta})
    return profile, K, delta


def discrete_maximal_subsolution(spec: HamiltonianSpec, level: float, grid: Grid1D,
                                 obstacles: Iterable[Tuple[float, float]]) -> CriticalProfile:
    """
    Largest grid function with u_{i+1} - u_i <= int p+ and u_i - u_{i+1} <= int -p- over each
    cell and u <= g at the node nearest to each obstacle (y, g). Relaxation sweeps until stable.
    """

    xs = grid.nodes
    minus, plus = bracket_panel_integrals(spec, xs, level, Which.G)
    forward = np.concatenate(([0.0], np.cumsum(plus)))
    backward = np.concatenate(([0.0], np.cumsum(-minus)))
    u = np.full(grid.n, np.inf)
    for y, g in obstacles:
        if grid.x_lo - 1e-12 <= y <= grid.x_hi + 1e-12:
            i = grid.index_of(y)
            u[i] = min(u[i], g)
    if not np.any(np.isfinite(u)):
        raise InternalError("no obstacle inside the grid")

    for sweep in range(grid.n + 2):
        previous = u.copy()
        u = forward + np.minimum.accumulate(u - forward)
        u = -backward + np.minimum.accumulate((u + backward)[::-1])[::-1]
        if np.array_equal(previous, u):
            break
    else:
        raise InternalError("relaxation did not settle")
    return CriticalProfile(grid, u, level, ProfileKind.DISCRETE_MAXIMAL, meta={"sweeps": sweep + 1})


def bounded_critical_solution(spec: HamiltonianSpec, report: CaseReport, grid: Grid1D) -> CriticalProfile:
    """
    Bounded solution u_G at level c_G in cases II and III
    """

    xs = grid.nodes
    tag = report.case_tag
    if tag == CaseTag.I:
        raise CaseError("case I has no bounded critical solution")
    if tag == CaseTag.III:
        values = equilibrium_envelope(spec, Which.G, report.c_G, report.equilibria_G, xs, _support(spec))
    else:
        branch = "plus" if tag == CaseTag.II_A else "minus"
        values = _primitive_from_zero(spec, Which.G, report.c_G, branch, xs)
    return CriticalProfile(grid, values, report.c_G, ProfileKind.BOUNDED_SOLUTION)
