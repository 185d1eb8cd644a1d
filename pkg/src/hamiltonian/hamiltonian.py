from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np

from errors import CoercivityError, DomainError, EvaluationError
from utils import golden_section_minimize
from .bases import BaseHamiltonian, PotentialSpec
from .potentials import ZeroPotential


L_INF = 1e9


class Which(Enum):
    H = 0
    G = 1
    V = 2


@dataclass(frozen=True)
class HamiltonianSpec:
    """
    G(x, p) = H(x, p) - V(x) together with the momentum and velocity search radii
    """

    _Q_MAX = 4.0

    family: BaseHamiltonian
    potential: PotentialSpec = field(default_factory=ZeroPotential)
    p_search_bound: Optional[float] = None
    q_velocity_bound: Optional[float] = None

    def __post_init__(self):
        if self.p_search_bound is None:
            object.__setattr__(self, "p_search_bound", float(self.family.default_p_bound))
        if self.q_velocity_bound is None:
            object.__setattr__(self, "q_velocity_bound", self._Q_MAX)
        if self.p_search_bound <= 0 or self.q_velocity_bound <= 0:
            raise DomainError("search radii must be positive",
                              p_search_bound=self.p_search_bound, q_velocity_bound=self.q_velocity_bound)

    @property
    def support(self) -> Tuple[float, float]:
        return self.potential.support

    @property
    def is_periodic(self) -> bool:
        return self.potential.is_zero

    def base(self) -> "HamiltonianSpec":
        """
        The unperturbed periodic problem, same radii
        """

        if self.potential.is_zero:
            return self
        return replace(self, potential=ZeroPotential())

    def H(self, x, p) -> np.ndarray:
        return self.family.H(x, p)

    def V(self, x) -> np.ndarray:
        return self.potential(x)

    def G(self, x, p) -> np.ndarray:
        return self.family.H(x, p) - self.potential(x)

    def section(self, x, which: Which = Which.G) -> Callable[[np.ndarray], np.ndarray]:
        h_section = self.family.section(x)
        if which == Which.H or self.potential.is_zero:
            return h_section
        vx = self.potential(x)
        return lambda p: h_section(p) - vx

    def check_invariants(self, levels: Iterable[float] = (), samples: int = 1000,
                         seed: int = 0) -> Dict[str, bool]:
        rng = np.random.default_rng(seed)
        P = self.p_search_bound
        x = rng.uniform(-3.0, 3.0, samples)
        p = rng.uniform(-P, P, samples)
        k = rng.integers(-5, 6, samples)
        h = self.H(x, p)
        periodic = np.all(np.abs(self.H(x + k, p) - h) <= 1e-12 * (1.0 + np.abs(h)))

        p_lo = rng.uniform(-P, P, samples)
        p_hi = p_lo + rng.uniform(0.0, P, samples)
        mid = self.H(x, 0.5 * (p_lo + p_hi))
        convex = np.all(mid <= 0.5 * (self.H(x, p_lo) + self.H(x, p_hi)) + 1e-10)

        lo, hi = self.support
        outside = x[(x < lo) | (x > hi)]
        local = np.all(self.G(outside, p[:len(outside)]) == self.H(outside, p[:len(outside)]))
        v_out = self.V(outside)
        local = bool(local and np.all(np.abs(v_out) <= 1e-12))

        levels = list(levels)
        coercive = True
        if levels:
            xs = np.concatenate((np.linspace(0.0, 1.0, 4097), np.linspace(lo, hi, 1025)))
            edge = np.minimum(self.G(xs, P), self.G(xs, -P))
            coercive = bool(np.min(edge) > max(levels))
        finite = bool(np.all(np.isfinite(h)) and np.all(np.isfinite(self.V(x))))
        return {
            "periodicity": bool(periodic),
            "convexity": bool(convex),
            "locality": local,
            "coercivity": coercive,
            "finite": finite,
        }

    def require_coercive(self, levels: Iterable[float]):
        levels = list(levels)
        if not levels:
            return
        lo, hi = self.support
        P = self.p_search_bound
        xs = np.concatenate((np.linspace(0.0, 1.0, 4097), np.linspace(lo, hi, 1025)))
        edge = np.minimum(self.G(xs, P), self.G(xs, -P))
        if np.min(edge) <= max(levels):
            raise CoercivityError(float(xs[int(np.argmin(edge))]), P)


def evaluate(spec: HamiltonianSpec, x, p, which: Which = Which.G):
    """
    H, G = H - V or V at (x, p)
    """

    if which == Which.H:
        value = spec.H(x, p)
    elif which == Which.G:
        value = spec.G(x, p)
    else:
        value = spec.V(x)
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        raise EvaluationError(x, p)
    return value if value.ndim else float(value)


def argmin_p(spec: HamiltonianSpec, x, which: Which = Which.G) -> Tuple[np.ndarray, np.ndarray]:
    """
    Minimizer of p -> G(x, p) (or H) on [-P_max, P_max] and the minimum value.

    V does not depend on p, so H and G share the minimizer.
    """

    if which == Which.V:
        raise DomainError("argmin_p is defined for H and G only")
    x = np.asarray(x, dtype=float)
    P = spec.p_search_bound
    section = spec.section(x, which)
    closed = spec.family.argmin(x)
    if closed is not None:
        p_star = np.broadcast_to(np.asarray(closed, dtype=float), x.shape).copy()
        value = section(p_star)
    else:
        p_star, value = golden_section_minimize(section, np.full(x.shape, -P), np.full(x.shape, P))
    at_edge = np.abs(p_star) >= P - 1e-9
    if np.any(at_edge):
        raise CoercivityError(float(np.atleast_1d(x)[np.atleast_1d(at_edge)][0]), P)
    return p_star, np.asarray(value, dtype=float)


@dataclass(frozen=True)
class LagrangianView:
    """
    L = G* restricted to velocities in [-Q_max, Q_max]
    """

    source: HamiltonianSpec

    @property
    def q_domain(self) -> Tuple[float, float]:
        return -self.source.q_velocity_bound, self.source.q_velocity_bound

    def __call__(self, x, q):
        return fenchel_lagrangian(self, x, q)

    def table(self, xs: np.ndarray, qs: np.ndarray) -> np.ndarray:
        """
        L on the product xs x qs. L_H is computed once per residue x mod 1, then V is added.
        """

        xs = np.asarray(xs, dtype=float)
        qs = np.asarray(qs, dtype=float)
        residues, inverse = np.unique(np.round(np.mod(xs, 1.0), 12), return_inverse=True)
        base = LagrangianView(self.source.base())
        l_base = fenchel_lagrangian(base, residues[:, None], qs[None, :])
        l_base = np.asarray(l_base)[inverse]
        if self.source.potential.is_zero:
            return l_base
        vx = self.source.V(xs)[:, None]
        return np.where(l_base >= L_INF / 2, L_INF, l_base + vx)


def fenchel_lagrangian(view: LagrangianView, x, q):
    """
    sup over |p| <= P_max of p q - G(x, p), L_INF where the supremum is infinite.
    """

    spec = view.source
    x, q = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(q, dtype=float))
    if np.any(np.abs(q) > spec.q_velocity_bound + 1e-12):
        raise DomainError(f"velocity outside [-{spec.q_velocity_bound}, {spec.q_velocity_bound}]",
                          q_max=float(np.max(np.abs(q))))
    P = spec.p_search_bound
    section = spec.section(x, Which.G)

    def gain(p):
        return p * q - section(p)

    p_star, neg_value = golden_section_minimize(lambda p: -gain(p), np.full(x.shape, -P), np.full(x.shape, P))
    value = -neg_value
    # maximizer pinned to the search boundary with the gain still increasing: sup is +inf
    hit_hi = (p_star >= P - 1e-6) & (gain(P) - gain(P - 1e-3) > 1e-8)
    hit_lo = (p_star <= -P + 1e-6) & (gain(-P) - gain(-P + 1e-3) > 1e-8)
    value = np.where(hit_hi | hit_lo, L_INF, value)
    return value if value.ndim else float(value)
