from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from discounted import DiscountedSolution
from errors import DomainError
from weakkam import CriticalProfile
from .measures import MeasureSplit, occupation_measure
from .trajectory import Trajectory, extract_optimal_curve


@dataclass(frozen=True)
class TightnessResult:
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class PairingResult:
    gap: float
    slack: float
    passed: bool


def tightness_check(sol: DiscountedSolution, x0: float, vG: CriticalProfile, K: Tuple[float, float],
                    delta: float, tol_mass: float = 1e-6, traj: Optional[Trajectory] = None) -> TightnessResult:
    """
    mu(outside K) <= (lam (u(x0) - v(x0)) + eta) / (delta - eta) + tol_mass.

    eta is the grid defect of v as a subsolution; eta = 0 gives the plain (lam / delta)(u - v).
    """

    if delta <= 0:
        raise DomainError(f"strictness delta must be positive, got {delta}")
    if traj is None:
        traj = extract_optimal_curve(sol, x0, tol_mass)
    eta = max(vG.subsolution_defect(sol.spec), 0.0)
    if eta >= delta:
        raise DomainError(f"subsolution defect {eta:.3g} swallows the strictness {delta:.3g}")
    lhs = occupation_measure(traj).mass_outside(*K)
    rhs = (sol.lam * (sol(x0) - vG(x0)) + eta) / (delta - eta) + tol_mass
    return TightnessResult(lhs, float(rhs), bool(lhs <= rhs))


def pairing_test(sol: DiscountedSolution, x0: float, v: CriticalProfile, split: MeasureSplit,
                 v_outer: Optional[CriticalProfile] = None, tol_mass: float = 1e-6) -> PairingResult:
    """
    u(x0) >= v(x0) - (theta int v dmu1 + (1 - theta) int w dmu2) with w = v_outer or v.

    The slack covers the grid step, the discarded tail mass and one walk step.
    """

    w = v if v_outer is None else v_outer
    rhs = v(x0) - split.theta * split.mu1.integrate(lambda y, q: v(y))
    if split.theta < 1.0:
        rhs -= (1.0 - split.theta) * split.mu2.integrate(lambda y, q: w(y))
    gap = sol(x0) - rhs

    nodes = v.grid.nodes
    lip = float(np.max(np.abs(np.diff(v.values)) / v.grid.dx))
    slack = (20.0 * sol.grid.dx + tol_mass * float(np.max(np.abs(v(nodes))))
             + split.step * sol.spec.q_velocity_bound * lip)
    return PairingResult(float(gap), slack, bool(gap >= -slack))
