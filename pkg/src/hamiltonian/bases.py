from abc import ABC, abstractmethod
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np


class SignHint(Enum):
    NONNEG = 0
    NONPOS = 1
    MIXED = 2


class BaseHamiltonian(ABC):
    """
    H(x, p), 1-periodic in x and convex in p
    """

    _P_MAX: float = 8.0

    @abstractmethod
    def H(self, x, p) -> np.ndarray:
        pass

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    def section(self, x) -> Callable[[np.ndarray], np.ndarray]:
        """
        p -> H(x, p) with the x-dependent coefficients evaluated once
        """

        x = np.asarray(x, dtype=float)
        return lambda p: self.H(x, p)

    def argmin(self, x) -> Optional[np.ndarray]:
        """
        Closed-form minimizer in p, None when the family has none
        """

        return None

    @property
    def is_tonelli(self) -> bool:
        return False

    @property
    def default_p_bound(self) -> float:
        return self._P_MAX


class PotentialSpec(ABC):
    """
    Compactly supported perturbation V
    """

    @abstractmethod
    def __call__(self, x) -> np.ndarray:
        pass

    @property
    @abstractmethod
    def support(self) -> Tuple[float, float]:
        pass

    @property
    @abstractmethod
    def sign_hint(self) -> SignHint:
        pass

    @property
    def is_zero(self) -> bool:
        return False

    def integral(self, panels: int = 4096) -> float:
        lo, hi = self.support
        if hi <= lo:
            return 0.0
        edges = np.linspace(lo, hi, panels + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        values = self(edges)
        return float((hi - lo) / panels / 6.0 * np.sum(values[:-1] + 4.0 * self(mids) + values[1:]))
