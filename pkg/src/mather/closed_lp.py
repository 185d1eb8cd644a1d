import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from errors import DomainError, InternalError
from hamiltonian import L_INF, HamiltonianSpec, LagrangianView, Which
from sublevel import TOL_MEAN, CaseReport, expand_equilibria, sublevel_endpoints

_logger = logging.getLogger("mather")

Basis = Sequence[Callable[[np.ndarray], np.ndarray]]


class Domain(Enum):
    H_ON_TORUS = 0
    G_ON_WINDOW = 1


@dataclass(frozen=True)
class LPResolution:
    x_cells: int = 256
    q_points: int = 65
    k_basis: int = 8
    hat_spacing: float = 1.0 / 16
    tol_lp: float = 1e-9

    @property
    def dx(self) -> float:
        return 1.0 / self.x_cells

    def dq(self, q_max: float) -> float:
        return 2.0 * q_max / (self.q_points - 1)


def trig_basis(k_basis: int) -> List[Callable[[np.ndarray], np.ndarray]]:
    """
    Derivatives of sin 2 pi k x and cos 2 pi k x, k = 1..k_basis
    """

    basis = []
    for k in range(1, k_basis + 1):
        w = 2.0 * np.pi * k
        basis.append(lambda x, w=w: w * np.cos(w * x))
        basis.append(lambda x, w=w: -w * np.sin(w * x))
    return basis


def hat_basis(lo: float, hi: float, spacing: float) -> List[Callable[[np.ndarray], np.ndarray]]:
    """
    Derivatives of the hat functions of a uniform mesh of [lo, hi], boundary hats included
    """

    m = max(1, int(round((hi - lo) / spacing)))
    nodes = np.linspace(lo, hi, m + 1)
    step = nodes[1] - nodes[0]

    def hat_derivative(j):
        def derivative(x):
            x = np.asarray(x, dtype=float)
            rising = (x > nodes[j] - step) & (x < nodes[j]) if j > 0 else np.zeros(x.shape, bool)
            falling = (x >= nodes[j]) & (x < nodes[j] + step) if j < m else np.zeros(x.shape, bool)
            return np.where(rising, 1.0 / step, 0.0) - np.where(falling, 1.0 / step, 0.0)
        return derivative

    return [hat_derivative(j) for j in range(m + 1)]


@dataclass(frozen=True, eq=False)
class DiscreteClosedMeasure:
    """
    Atoms (xs[i], qs[i]) with weights[i] >= 0 summing to one
    """

    xs: np.ndarray
    qs: np.ndarray
    weights: np.ndarray
    periodic: bool = False

    @classmethod
    def delta(cls, y: float, q: float = 0.0) -> "DiscreteClosedMeasure":
        return cls(np.array([y], dtype=float), np.array([q], dtype=float), np.array([1.0]))

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, func(self.xs, self.qs)))

    def closure_residuals(self, basis: Basis) -> np.ndarray:
        return np.array([np.dot(self.weights, phi_prime(self.xs) * self.qs) for phi_prime in basis])

    def projected(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        x-marginal as (atoms, mass), taken mod 1 on the torus
        """

        xs = np.mod(self.xs, 1.0) if self.periodic else self.xs
        atoms, inverse = np.unique(np.round(xs, 12), return_inverse=True)
        return atoms, np.bincount(inverse, weights=self.weights)

    def support(self, threshold: float = 1e-6) -> List[Tuple[float, float, float]]:
        keep = self.weights > threshold
        return [(float(x), float(q), float(w)) for x, q, w in zip(self.xs[keep], self.qs[keep], self.weights[keep])]

    def mixed(self, other: "DiscreteClosedMeasure", t: float) -> "DiscreteClosedMeasure":
        """
        (1 - t) self + t other
        """

        if not 0.0 <= t <= 1.0:
            raise DomainError(f"mixing weight {t} outside [0, 1]")
        return DiscreteClosedMeasure(np.concatenate((self.xs, other.xs)), np.concatenate((self.qs, other.qs)),
                                     np.concatenate(((1.0 - t) * self.weights, t * other.weights)),
                                     self.periodic and other.periodic)

    def to_dict(self, threshold: float = 1e-6) -> Dict[str, Any]:
        return {"periodic": self.periodic,
                "atoms": [{"x": x, "q": q, "w": w} for x, q, w in self.support(threshold)]}


@dataclass(frozen=True, eq=False)
class LPResult:
    optimal_value: float
    measure: DiscreteClosedMeasure
    dual_gap_proxy: float
    residuals: np.ndarray
    domain: Domain
    window: Optional[Tuple[float, float]] = None

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals))) if len(self.residuals) else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "domain": self.domain.name,
            "window": None if self.window is None else list(self.window),
            "value": self.optimal_value,
            "dual_gap_proxy": self.dual_gap_proxy,
            "max_closure_residual": self.max_residual,
            "support": self.measure.to_dict()["atoms"],
        }


def default_window(spec: HamiltonianSpec) -> Tuple[float, float]:
    if spec.potential.is_zero:
        return 0.0, 1.0
    y_lo, y_hi = spec.support
    return float(np.floor(y_lo) - 1.0), float(np.ceil(y_hi) + 1.0)


def _closure_matrix(basis: Basis, xs: np.ndarray, qs: np.ndarray) -> sparse.csr_matrix:
    rows = np.array([phi_prime(xs) * qs for phi_prime in basis])
    return sparse.csr_matrix(rows)


def closed_measure_lp(spec: HamiltonianSpec, which: Domain = Domain.H_ON_TORUS,
                      resolution: LPResolution = LPResolution(),
                      window: Optional[Tuple[float, float]] = None) -> LPResult:
    """
    min sum w L over closed probability measures on a phase grid.

    The torus problem uses the unperturbed H and a trigonometric test basis. The window problem
    uses G with hat test functions whose boundary values are free.
    """

    if which == Domain.H_ON_TORUS:
        source = spec.base()
        xs = np.arange(resolution.x_cells) / resolution.x_cells
        basis = trig_basis(resolution.k_basis)
        window = None
    else:
        source = spec
        lo, hi = window if window is not None else default_window(spec)
        y_lo, y_hi = spec.support
        if not spec.potential.is_zero and (lo > y_lo - 1.0 or hi < y_hi + 1.0):
            raise DomainError(f"LP window [{lo}, {hi}] needs one period of margin around supp V",
                              support=spec.support)
        cells = int(round((hi - lo) * resolution.x_cells))
        xs = lo + (np.arange(cells) + 0.5) * (hi - lo) / cells
        basis = hat_basis(lo, hi, resolution.hat_spacing)
        window = (lo, hi)

    q_max = source.q_velocity_bound
    qs = np.linspace(-q_max, q_max, resolution.q_points)
    table = LagrangianView(source).table(xs, qs)
    ix, iq = np.nonzero(table < L_INF / 2)
    if len(ix) == 0:
        raise InternalError("every phase-grid atom has infinite cost")
    cost = table[ix, iq]
    x_atoms, q_atoms = xs[ix], qs[iq]

    closure = _closure_matrix(basis, x_atoms, q_atoms)
    A_ub = sparse.vstack([closure, -closure]).tocsr()
    b_ub = np.full(A_ub.shape[0], resolution.tol_lp)
    A_eq = sparse.csr_matrix(np.ones((1, len(cost))))
    b_eq = np.array([1.0])
    result = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if result.status == 2:
        raise InternalError("closed-measure LP is infeasible", domain=which.name)
    if result.status == 3:
        raise InternalError("closed-measure LP is unbounded", domain=which.name)
    if result.status != 0:
        raise InternalError(f"closed-measure LP failed: {result.message}", domain=which.name)

    dual_value = float(np.dot(result.eqlin.marginals, b_eq) + np.dot(result.ineqlin.marginals, b_ub))
    weights = np.asarray(result.x)
    keep = weights > 1e-12
    measure = DiscreteClosedMeasure(x_atoms[keep], q_atoms[keep], weights[keep] / np.sum(weights[keep]),
                                    periodic=which == Domain.H_ON_TORUS)
    lp = LPResult(optimal_value=float(result.fun), measure=measure,
                  dual_gap_proxy=abs(float(result.fun) - dual_value),
                  residuals=measure.closure_residuals(basis), domain=which, window=window)
    _logger.info("%s LP on %s: value %.9g, %d atoms, dual gap %.3g", which.name, source.family.name,
                 lp.optimal_value, len(measure.xs), lp.dual_gap_proxy)
    return lp


def equilibrium_mather_G(spec: HamiltonianSpec, report: CaseReport,
                         window: Optional[Tuple[float, float]] = None,
                         tol: float = 1e-9) -> List[DiscreteClosedMeasure]:
    """
    delta_(y, 0) for every equilibrium y of G in the window, each checked to cost -c_f(G)
    """

    lo, hi = window if window is not None else default_window(spec)
    support = None if spec.potential.is_zero else spec.support
    points = expand_equilibria(report.equilibria_G, lo, hi, support, endpoints=False)
    view = LagrangianView(spec)
    measures = []
    for y in points:
        value = view(float(y), 0.0)
        if abs(value + report.c_f_G) > tol:
            raise InternalError(f"equilibrium delta at {y} costs {value:.12g}, expected {-report.c_f_G:.12g}",
                                y=float(y), value=value)
        measures.append(DiscreteClosedMeasure.delta(float(y)))
    if not measures:
        raise InternalError(f"no equilibrium of G inside [{lo}, {hi}]")
    return measures


@dataclass(frozen=True)
class DualityCertificate:
    """
    int L dmu >= int (p q - H(x, p)) dmu >= int p q dmu - c for a field p inside the c-sublevel.

    The field is the zero-mean combination of the bracket endpoints, a periodic derivative, so
    its pairing with a closed measure vanishes up to the closure tolerance.
    """

    objective: float
    fenchel_bound: float
    pairing: float
    level: float

    @property
    def lower_bound(self) -> float:
        return self.pairing - self.level

    def holds(self, tol: float = 1e-6) -> bool:
        return self.objective >= self.fenchel_bound - tol and self.fenchel_bound >= self.lower_bound - tol

    def to_dict(self) -> Dict[str, float]:
        return {"objective": self.objective, "fenchel_bound": self.fenchel_bound, "pairing": self.pairing,
                "level": self.level, "lower_bound": self.lower_bound}


def duality_certificate(spec: HamiltonianSpec, report: CaseReport,
                        measure: DiscreteClosedMeasure) -> DualityCertificate:
    base = spec.base()
    level = report.c_H
    xs = np.mod(measure.xs, 1.0)
    span = report.P_H_plus - report.P_H_minus
    t = report.P_H_plus / span if span > TOL_MEAN else 0.5
    p_minus, p_plus = sublevel_endpoints(base, xs, level, Which.H)
    field = t * p_minus + (1.0 - t) * p_plus

    costs = np.asarray(LagrangianView(base)(xs, measure.qs))
    if np.any(costs >= L_INF / 2):
        raise InternalError("measure charges an atom with infinite cost")
    w = measure.weights
    return DualityCertificate(
        objective=float(np.dot(w, costs)),
        fenchel_bound=float(np.dot(w, field * measure.qs - base.H(xs, field))),
        pairing=float(np.dot(w, field * measure.qs)),
        level=level,
    )
