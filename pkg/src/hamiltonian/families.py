from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from errors import DomainError
from .bases import BaseHamiltonian
from .periodic import PeriodicFunction


class ShiftedEikonal(BaseHamiltonian):
    """
    H(x, p) = |theta + p| - U(x)
    """

    _theta: float
    _U: PeriodicFunction

    def __init__(self, theta: float = 0.0, U: Optional[PeriodicFunction] = None):
        self._theta = float(theta)
        self._U = U if U is not None else PeriodicFunction.cosine()

    @property
    def theta(self) -> float:
        return self._theta

    @property
    def U(self) -> PeriodicFunction:
        return self._U

    @property
    def name(self) -> str:
        return f"ShiftedEikonal(theta={self._theta})"

    @property
    def default_p_bound(self) -> float:
        return self._P_MAX + abs(self._theta)

    def H(self, x, p) -> np.ndarray:
        return np.abs(self._theta + np.asarray(p, dtype=float)) - self._U(x)

    def section(self, x):
        ux = self._U(x)
        theta = self._theta
        return lambda p: np.abs(theta + p) - ux

    def argmin(self, x) -> np.ndarray:
        return np.full(np.shape(x), -self._theta)


class Quadratic(BaseHamiltonian):
    """
    H(x, p) = p^2 / 2 - U(x)
    """

    _U: PeriodicFunction

    def __init__(self, U: Optional[PeriodicFunction] = None):
        self._U = U if U is not None else PeriodicFunction.cosine()

    @property
    def U(self) -> PeriodicFunction:
        return self._U

    @property
    def name(self) -> str:
        return "Quadratic"

    def H(self, x, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return 0.5 * p * p - self._U(x)

    def section(self, x):
        ux = self._U(x)
        return lambda p: 0.5 * p * p - ux

    def argmin(self, x) -> np.ndarray:
        return np.zeros(np.shape(x))

    @property
    def is_tonelli(self) -> bool:
        return True


class AppendixExample(BaseHamiltonian):
    """
    H(x, p) = (p - p1(x)) (p - p2(x)) + eps(x) |p - p1(x)| with p1 = -cos(2 pi x).

    p2 = -1 on [0, 0.52] and [0.99, 1], p2 = p1 - eps1 on [0.53, 0.97]. The two gaps are
    joined by monotone cubics clamped below p1. eps is 0.01 at the integers and vanishes on
    [0.01, 0.99], affine in between.
    """

    _LEFT_JOIN = (0.52, 0.53)
    _RIGHT_JOIN = (0.97, 0.99)
    _EPS_EDGE = 0.01

    _eps1: float
    _margin: float

    def __init__(self, eps1: float = 1e-3):
        if not 0.0 < eps1 <= 0.01:
            raise DomainError(f"eps1 must lie in (0, 0.01], got {eps1}")
        self._eps1 = float(eps1)
        self._margin = min(eps1, 0.01) / 2.0

        left_x = np.array([0.50, 0.51, 0.52, 0.53, 0.54, 0.55])
        left_y = np.where(left_x <= 0.52, -1.0, self.p1(left_x) - self._eps1)
        self._left = PchipInterpolator(left_x, left_y)
        right_x = np.array([0.95, 0.96, 0.97, 0.99, 0.995, 1.0])
        right_y = np.where(right_x >= 0.99, -1.0, self.p1(right_x) - self._eps1)
        self._right = PchipInterpolator(right_x, right_y)

    @property
    def eps1(self) -> float:
        return self._eps1

    @property
    def margin(self) -> float:
        return self._margin

    @property
    def name(self) -> str:
        return f"AppendixExample(eps1={self._eps1})"

    @staticmethod
    def p1(x) -> np.ndarray:
        return -np.cos(2 * np.pi * np.asarray(x, dtype=float))

    @staticmethod
    def p1_primitive(x) -> np.ndarray:
        return -np.sin(2 * np.pi * np.asarray(x, dtype=float)) / (2 * np.pi)

    def p2(self, x) -> np.ndarray:
        xm = np.mod(np.asarray(x, dtype=float), 1.0)
        p1 = self.p1(xm)
        result = np.full(xm.shape, -1.0)
        middle = (xm >= self._LEFT_JOIN[1]) & (xm <= self._RIGHT_JOIN[0])
        result = np.where(middle, p1 - self._eps1, result)
        left = (xm > self._LEFT_JOIN[0]) & (xm < self._LEFT_JOIN[1])
        right = (xm > self._RIGHT_JOIN[0]) & (xm < self._RIGHT_JOIN[1])
        result = np.where(left, np.minimum(self._left(xm), p1 - self._margin), result)
        result = np.where(right, np.minimum(self._right(xm), p1 - self._margin), result)
        return result

    def eps(self, x) -> np.ndarray:
        xm = np.mod(np.asarray(x, dtype=float), 1.0)
        edge = self._EPS_EDGE
        return np.interp(xm, [0.0, edge, 1.0 - edge, 1.0], [edge, 0.0, 0.0, edge])

    def H(self, x, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        p1 = self.p1(x)
        return (p - p1) * (p - self.p2(x)) + self.eps(x) * np.abs(p - p1)

    def section(self, x):
        p1 = self.p1(x)
        p2 = self.p2(x)
        eps = self.eps(x)
        return lambda p: (p - p1) * (p - p2) + eps * np.abs(p - p1)

    def argmin(self, x) -> np.ndarray:
        # left of p1 the map is (p - p1)(p - p2 - eps), right of p1 it increases
        p1 = self.p1(x)
        p2 = self.p2(x)
        eps = self.eps(x)
        vertex = 0.5 * (p1 + p2 + eps)
        return np.where(p2 + eps >= p1, p1, vertex)


class Custom(BaseHamiltonian):
    """
    Vectorized user evaluator, declared 1-periodic in x and convex in p
    """

    def __init__(self, evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray], label: str = "Custom",
                 p_bound: float = 8.0, tonelli: bool = False):
        self._evaluator = evaluator
        self._label = label
        self._p_bound = float(p_bound)
        self._tonelli = tonelli

    @property
    def name(self) -> str:
        return self._label

    @property
    def default_p_bound(self) -> float:
        return self._p_bound

    @property
    def is_tonelli(self) -> bool:
        return self._tonelli

    def H(self, x, p) -> np.ndarray:
        x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
        return np.asarray(self._evaluator(x, p), dtype=float)
