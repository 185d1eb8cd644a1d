from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from errors import DomainError
from .trajectory import Trajectory


@dataclass(frozen=True, eq=False)
class OccupationMeasure:
    ys: np.ndarray
    qs: np.ndarray
    weights: np.ndarray
    origin: Tuple[float, float]

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, func(self.ys, self.qs)))

    def mass_outside(self, lo: float, hi: float) -> float:
        outside = (self.ys < lo) | (self.ys > hi)
        return float(np.sum(self.weights[outside]))

    def to_csv_rows(self, part: int) -> List[Tuple[float, float, float, int]]:
        return [(float(y), float(q), float(w), part) for y, q, w in zip(self.ys, self.qs, self.weights)]


@dataclass(frozen=True, eq=False)
class MeasureSplit:
    """
    theta mu1 + (1 - theta) mu2 with mu1 the part of the walk before it first leaves [-r, r].

    When the walk never leaves, theta = 1 and mu2 is the conventional atom (x0 + r, 0), which
    carries no weight in any pairing.
    """

    r: float
    T_exit: float
    theta: float
    mu1: OccupationMeasure
    mu2: OccupationMeasure
    step: float = 0.0

    @property
    def exited(self) -> bool:
        return bool(np.isfinite(self.T_exit))


def _raw_weights(traj: Trajectory) -> np.ndarray:
    # geometric with ratio e^{-lam h}; the first k weights add up to 1 - e^{-lam k h}
    return (1.0 - np.exp(-traj.lam * traj.h)) * traj.discount


def occupation_measure(traj: Trajectory) -> OccupationMeasure:
    weights = _raw_weights(traj)
    return OccupationMeasure(traj.ys, traj.qs, weights / np.sum(weights), (traj.x0, traj.lam))


def split_at_radius(traj: Trajectory, r: float, support: Tuple[float, float] = (0.0, 0.0)) -> MeasureSplit:
    if not (-r <= min(support[0], traj.x0) and max(support[1], traj.x0) <= r):
        raise DomainError(f"[-{r}, {r}] must contain supp V = {support} and x0 = {traj.x0}")
    origin = (traj.x0, traj.lam)
    weights = _raw_weights(traj)
    outside = np.flatnonzero(np.abs(traj.ys) > r)
    if len(outside) == 0:
        mu1 = OccupationMeasure(traj.ys, traj.qs, weights / np.sum(weights), origin)
        mu2 = OccupationMeasure(np.array([traj.x0 + r]), np.array([0.0]), np.array([1.0]), origin)
        return MeasureSplit(r, float("inf"), 1.0, mu1, mu2, traj.h)

    k = int(outside[0])
    T_exit = k * traj.h
    theta = 1.0 - np.exp(-traj.lam * T_exit)
    head, tail = slice(0, k), slice(k, None)
    mu1 = OccupationMeasure(traj.ys[head], traj.qs[head], weights[head] / np.sum(weights[head]), origin)
    mu2 = OccupationMeasure(traj.ys[tail], traj.qs[tail], weights[tail] / np.sum(weights[tail]), origin)
    return MeasureSplit(r, T_exit, float(theta), mu1, mu2, traj.h)


def first_moment(measure: OccupationMeasure, phi_prime: Callable[[np.ndarray], np.ndarray]) -> float:
    """
    int phi'(y) q dmu, zero for closed measures
    """

    return measure.integrate(lambda y, q: phi_prime(y) * q)
