from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from errors import DomainError


@dataclass(frozen=True)
class Grid1D:
    x_lo: float
    x_hi: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"grid needs at least 3 nodes, got {self.n}")
        if not self.x_hi > self.x_lo:
            raise DomainError(f"empty grid [{self.x_lo}, {self.x_hi}]")

    @classmethod
    def with_step(cls, x_lo: float, x_hi: float, dx: float) -> "Grid1D":
        return cls(x_lo, x_hi, int(round((x_hi - x_lo) / dx)) + 1)

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n)

    def contains(self, lo: float, hi: float, margin: float = 0.0) -> bool:
        return self.x_lo <= lo - margin + 1e-12 and hi + margin <= self.x_hi + 1e-12

    def require_margin(self, support: Tuple[float, float], margin: float = 4.0):
        if not self.contains(support[0], support[1], margin):
            raise DomainError(f"grid [{self.x_lo}, {self.x_hi}] must contain {support} "
                              f"with margin {margin}", support=support, margin=margin)

    def index_of(self, x: float) -> int:
        return int(round((x - self.x_lo) / self.dx))

    def window_slice(self, lo: float, hi: float) -> slice:
        start = int(np.ceil((lo - self.x_lo) / self.dx - 1e-9))
        stop = int(np.floor((hi - self.x_lo) / self.dx + 1e-9))
        return slice(max(start, 0), min(stop, self.n - 1) + 1)

    def sub_grid(self, lo: float, hi: float) -> "Grid1D":
        """
        Nodes of this grid that lie in [lo, hi], as a grid of their own
        """

        sl = self.window_slice(lo, hi)
        nodes = self.nodes[sl]
        return Grid1D(float(nodes[0]), float(nodes[-1]), len(nodes))

    def doubled(self, center: Optional[float] = None) -> "Grid1D":
        """
        Same step, each side pushed out by half of the current length (rounded to whole steps)
        """

        extra = int(round(0.5 * (self.x_hi - self.x_lo) / self.dx))
        if center is not None:
            extra = max(extra, int(round(abs(center) / self.dx)))
        return Grid1D(self.x_lo - extra * self.dx, self.x_hi + extra * self.dx, self.n + 2 * extra)
