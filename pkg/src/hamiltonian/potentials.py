from typing import Tuple

import numpy as np

from errors import DomainError
from .bases import PotentialSpec, SignHint


class ZeroPotential(PotentialSpec):
    def __call__(self, x) -> np.ndarray:
        return np.zeros(np.shape(x))

    @property
    def support(self) -> Tuple[float, float]:
        return 0.0, 0.0

    @property
    def sign_hint(self) -> SignHint:
        return SignHint.NONNEG

    @property
    def is_zero(self) -> bool:
        return True

    def integral(self, panels: int = 4096) -> float:
        return 0.0

    def __repr__(self):
        return "ZeroPotential()"


class BumpPotential(PotentialSpec):
    """
    Raised-cosine bump A (1 + cos(pi (x - c) / w)) / 2 on [c - w, c + w], zero elsewhere.

    It is C^1 and integrates to A w.
    """

    _center: float
    _half_width: float
    _amplitude: float

    def __init__(self, center: float, half_width: float, amplitude: float):
        if half_width <= 0:
            raise DomainError(f"bump half-width must be positive, got {half_width}")
        if not np.isfinite(amplitude) or amplitude == 0:
            raise DomainError(f"bump amplitude must be finite and nonzero, got {amplitude}")
        self._center = float(center)
        self._half_width = float(half_width)
        self._amplitude = float(amplitude)

    @property
    def center(self) -> float:
        return self._center

    @property
    def half_width(self) -> float:
        return self._half_width

    @property
    def amplitude(self) -> float:
        return self._amplitude

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s = (x - self._center) / self._half_width
        inside = np.abs(s) < 1.0
        return np.where(inside, 0.5 * self._amplitude * (1.0 + np.cos(np.pi * np.clip(s, -1.0, 1.0))), 0.0)

    @property
    def support(self) -> Tuple[float, float]:
        return self._center - self._half_width, self._center + self._half_width

    @property
    def sign_hint(self) -> SignHint:
        return SignHint.NONNEG if self._amplitude > 0 else SignHint.NONPOS

    def integral(self, panels: int = 4096) -> float:
        return self._amplitude * self._half_width

    def mirrored(self) -> "BumpPotential":
        return BumpPotential(-self._center, self._half_width, self._amplitude)

    def __repr__(self):
        return f"BumpPotential(center={self._center}, half_width={self._half_width}, amplitude={self._amplitude})"
