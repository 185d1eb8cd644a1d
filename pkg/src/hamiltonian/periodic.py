from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils import golden_section_minimize


@dataclass(frozen=True)
class PeriodicFunction:
    """
    Truncated Fourier series constant + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x), k >= 1
    """

    constant: float = 0.0
    cos_coeffs: Tuple[float, ...] = ()
    sin_coeffs: Tuple[float, ...] = ()

    @classmethod
    def cosine(cls, amplitude: float = 1.0) -> "PeriodicFunction":
        return cls(cos_coeffs=(amplitude,))

    @classmethod
    def shifted_cosine(cls, shift: float, amplitude: float = 1.0) -> "PeriodicFunction":
        # cos(2 pi (x - s)) = cos(2 pi s) cos(2 pi x) + sin(2 pi s) sin(2 pi x)
        return cls(cos_coeffs=(amplitude * np.cos(2 * np.pi * shift),),
                   sin_coeffs=(amplitude * np.sin(2 * np.pi * shift),))

    @classmethod
    def zero(cls) -> "PeriodicFunction":
        return cls()

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        result = np.full(x.shape, float(self.constant))
        for k, a in enumerate(self.cos_coeffs, start=1):
            result = result + a * np.cos(2 * np.pi * k * x)
        for k, b in enumerate(self.sin_coeffs, start=1):
            result = result + b * np.sin(2 * np.pi * k * x)
        return result

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        result = np.zeros(x.shape)
        for k, a in enumerate(self.cos_coeffs, start=1):
            result = result - 2 * np.pi * k * a * np.sin(2 * np.pi * k * x)
        for k, b in enumerate(self.sin_coeffs, start=1):
            result = result + 2 * np.pi * k * b * np.cos(2 * np.pi * k * x)
        return result

    @property
    def mean(self) -> float:
        return float(self.constant)

    @property
    def lipschitz_bound(self) -> float:
        return float(sum(2 * np.pi * k * abs(a) for k, a in enumerate(self.cos_coeffs, start=1))
                     + sum(2 * np.pi * k * abs(b) for k, b in enumerate(self.sin_coeffs, start=1)))

    def minimum(self, samples: int = 4096) -> Tuple[float, float]:
        """
        (argmin in [0, 1), min value), grid scan polished by golden section
        """

        xs = np.arange(samples) / samples
        values = self(xs)
        k = int(np.argmin(values))
        step = 1.0 / samples
        x_star, v_star = golden_section_minimize(self, xs[k] - step, xs[k] + step)
        if float(v_star) > values[k]:
            return float(xs[k]), float(values[k])
        return float(np.mod(x_star, 1.0)), float(v_star)
