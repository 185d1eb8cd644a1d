import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from errors import InternalError
from hamiltonian import AppendixExample, HamiltonianSpec, Which
from sublevel import free_critical_value, mean_momenta
from .closed_lp import DiscreteClosedMeasure, trig_basis

_logger = logging.getLogger("mather")


@dataclass(frozen=True)
class AppendixResolution:
    x_step: float = 1e-4
    y_points: int = 41
    y_radius: float = 0.01


@dataclass(frozen=True, eq=False)
class AppendixReport:
    eps1: float
    c_f: float
    I_plus: float
    gamma_period_T: float
    integrals: Tuple[Tuple[float, float], ...]
    rho: float
    delta: float
    epsilon_2: float
    crossing_times: Dict[str, float]
    closure_residuals: Tuple[float, ...]

    @property
    def min_integral(self) -> float:
        return min(value for _, value in self.integrals)

    @property
    def loop_bound(self) -> float:
        """
        Lower bound -4/rho + delta/(4 eps1) on T times the integral
        """

        return -4.0 / self.rho + self.delta / (4.0 * self.eps1)

    @property
    def epsilon_threshold(self) -> float:
        """
        Largest eps1 at which the lower bound is still positive, for the measured rho and delta
        """

        return self.delta * self.rho / 16.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps1": self.eps1,
            "c_f": self.c_f,
            "I_plus": self.I_plus,
            "gamma_period_T": self.gamma_period_T,
            "min_integral": self.min_integral,
            "rho": self.rho,
            "delta": self.delta,
            "epsilon_2": self.epsilon_2,
            "loop_bound": self.loop_bound,
            "epsilon_threshold": self.epsilon_threshold,
            "crossing_times": dict(self.crossing_times),
            "closure_residuals": list(self.closure_residuals),
        }

    def to_csv_rows(self) -> List[Tuple[float, float]]:
        return [(float(y), float(v)) for y, v in self.integrals]


def _in_union(xs: np.ndarray, intervals) -> np.ndarray:
    mask = np.zeros(xs.shape, dtype=bool)
    for lo, hi in intervals:
        mask |= (xs >= lo - 1e-12) & (xs <= hi + 1e-12)
    return mask


def birkhoff_measure(family: AppendixExample, x_step: float = 1e-4) -> Tuple[DiscreteClosedMeasure, np.ndarray]:
    """
    Time average along gamma' = eps + p1 - p2 over one loop from 0 to 1.

    x is the integration variable, dt = dx / gamma'. Each cell gets RK4 (Simpson) weights on its
    two ends and its midpoint, so the atoms carry the time spent near them. Also returns the
    cumulative time at the cell edges.
    """

    n = int(round(1.0 / x_step))
    edges = np.linspace(0.0, 1.0, n + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    step = 1.0 / n

    def speed(x):
        return family.eps(x) + family.p1(x) - family.p2(x)

    s_edges, s_mids = speed(edges), speed(mids)
    if np.any(s_edges <= 0) or np.any(s_mids <= 0):
        bad = edges[np.argmin(s_edges)] if np.min(s_edges) <= 0 else mids[np.argmin(s_mids)]
        raise InternalError(f"loop speed vanishes at x={bad:.6g}", x=float(bad))

    left = step / 6.0 / s_edges[:-1]
    middle = 4.0 * step / 6.0 / s_mids
    right = step / 6.0 / s_edges[1:]
    times = np.concatenate(([0.0], np.cumsum(left + middle + right)))
    period = times[-1]

    xs = np.concatenate((edges[:-1], mids, edges[1:]))
    weights = np.concatenate((left, middle, right)) / period
    qs = speed(xs)
    return DiscreteClosedMeasure(xs, qs, weights, periodic=True), times


def appendix_counterexample(eps1: float = 1e-3,
                            resolution: AppendixResolution = AppendixResolution()) -> AppendixReport:
    family = AppendixExample(eps1)
    spec = HamiltonianSpec(family)
    c_f, _ = free_critical_value(spec, Which.H)
    _, I_plus = mean_momenta(spec, c_f, side="plus")

    measure, times = birkhoff_measure(family, resolution.x_step)
    period = float(times[-1])
    edges = np.linspace(0.0, 1.0, len(times))

    def u_y(y, x):
        return family.p1_primitive(x) - family.p1_primitive(y)

    ys = np.linspace(-resolution.y_radius, resolution.y_radius, resolution.y_points)
    integrals = tuple((float(y), measure.integrate(lambda x, q, y=y: u_y(y, x))) for y in ys)

    speed = family.eps(edges) + family.p1(edges) - family.p2(edges)
    rho = float(np.min(speed[_in_union(edges, [(0.0, 0.52), (0.99, 1.0)])]))
    plateau = edges[_in_union(edges, [(0.53, 0.97)])]
    delta = float(np.min(u_y(ys[:, None], plateau[None, :])))

    crossings = {name: float(np.interp(x, edges, times))
                 for name, x in (("A", 0.52), ("a", 0.53), ("b", 0.97), ("B", 0.99))}
    report = AppendixReport(
        eps1=float(eps1), c_f=float(c_f), I_plus=float(I_plus), gamma_period_T=period,
        integrals=integrals, rho=rho, delta=delta, epsilon_2=float(np.min(speed)),
        crossing_times=crossings,
        closure_residuals=tuple(float(r) for r in measure.closure_residuals(trig_basis(1))),
    )
    _logger.info("appendix eps1=%g: T=%.6g, min integral %.6g, bound %.4g (threshold eps1 %.3g)",
                 eps1, period, report.min_integral, report.loop_bound, report.epsilon_threshold)
    return report
