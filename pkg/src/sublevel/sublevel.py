from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from errors import CoercivityError, EmptySublevel
from hamiltonian import HamiltonianSpec, Which, argmin_p
from utils import bisect_boundary, simpson_refined

_EMPTY_TOL = 1e-12
_X_TOL = 1e-11
_DEGENERATE_WIDTH = 1e-6
_REFINE = 64

SIDES = ("minus", "plus", "both")


@dataclass(frozen=True)
class SublevelBracket:
    x: float
    a: float
    p_minus: float
    p_plus: float

    @property
    def width(self) -> float:
        return self.p_plus - self.p_minus


def _endpoints(spec: HamiltonianSpec, xs, a, which: Which, side: str):
    xs = np.asarray(xs, dtype=float)
    a = np.broadcast_to(np.asarray(a, dtype=float), xs.shape)
    p_star, m = argmin_p(spec, xs, which)
    short = a < m - _EMPTY_TOL * (1.0 + np.abs(m))
    if np.any(short):
        k = np.flatnonzero(short)[0]
        raise EmptySublevel(float(xs.flat[k]), float(a.flat[k]), float(m.flat[k]))

    section = spec.section(xs, which)
    P = spec.p_search_bound

    def excess(p):
        return section(p) - a

    p_minus = p_plus = None
    if side in ("plus", "both"):
        if np.any(excess(P) <= 0):
            raise CoercivityError(float(xs.flat[np.flatnonzero(excess(P) <= 0)[0]]), P)
        p_plus = bisect_boundary(excess, p_star, np.full(xs.shape, P), tol=_X_TOL)
    if side in ("minus", "both"):
        if np.any(excess(-P) <= 0):
            raise CoercivityError(float(xs.flat[np.flatnonzero(excess(-P) <= 0)[0]]), P)
        p_minus = bisect_boundary(excess, p_star, np.full(xs.shape, -P), tol=_X_TOL)
    return p_star, p_minus, p_plus


def sublevel_endpoints(spec: HamiltonianSpec, xs, a, which: Which = Which.G,
                       side: str = "both") -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """
    Vectorized p-(x, a), p+(x, a). The side not asked for comes back as None.
    """

    _, p_minus, p_plus = _endpoints(spec, xs, a, which, side)
    return p_minus, p_plus


def sublevel_bracket(spec: HamiltonianSpec, x: float, a: float, which: Which = Which.G) -> SublevelBracket:
    p_minus, p_plus = sublevel_endpoints(spec, np.array([x]), a, which)
    return SublevelBracket(float(x), float(a), float(p_minus[0]), float(p_plus[0]))


def support_sigma(bracket: SublevelBracket, q: float) -> float:
    return q * bracket.p_plus if q >= 0 else q * bracket.p_minus


def _simpson_sides(spec: HamiltonianSpec, left: np.ndarray, right: np.ndarray, a: float, which: Which,
                   side: str, p_star: Tuple[np.ndarray, np.ndarray, np.ndarray],
                   values: Tuple[Tuple, Tuple]) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    results = []
    for k, triple in enumerate(values):
        if triple is None:
            results.append(None)
            continue
        f_left, f_mid, f_right = triple
        panels = (right - left) / 6.0 * (f_left + 4.0 * f_mid + f_right)
        mask = np.zeros(len(left), dtype=bool)
        for f, star in zip(triple, p_star):
            mask |= np.abs(f - star) < _DEGENERATE_WIDTH / 2
        if np.any(mask):
            idx = np.flatnonzero(mask)
            one_side = "minus" if k == 0 else "plus"
            panels[idx] = simpson_refined(lambda z: _endpoints(spec, z, a, which, one_side)[k + 1],
                                          left[idx], right[idx], _REFINE)
        results.append(panels)
    return results[0], results[1]


def bracket_panel_integrals(spec: HamiltonianSpec, edges: np.ndarray, a: float, which: Which = Which.G,
                            side: str = "both") -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """
    Per-panel Simpson integrals of p- and p+ over consecutive edges.

    Panels touching a near-degenerate bracket are split into sub-panels since p+- behaves
    like a square root there.
    """

    edges = np.asarray(edges, dtype=float)
    ne = len(edges)
    left = edges[:-1]
    right = edges[1:]
    points = np.concatenate((edges, 0.5 * (left + right)))
    p_star, p_minus, p_plus = _endpoints(spec, points, a, which, side)

    def split(v):
        return None if v is None else (v[:ne - 1], v[ne:], v[1:ne])

    return _simpson_sides(spec, left, right, a, which, side, split(p_star), (split(p_minus), split(p_plus)))


def bracket_interval_integrals(spec: HamiltonianSpec, left, right, a: float, which: Which = Which.G,
                               side: str = "both") -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """
    Simpson integrals of p- and p+ over independent intervals [left_i, right_i]
    """

    left = np.atleast_1d(np.asarray(left, dtype=float))
    right = np.atleast_1d(np.asarray(right, dtype=float))
    n = len(left)
    points = np.concatenate((left, 0.5 * (left + right), right))
    p_star, p_minus, p_plus = _endpoints(spec, points, a, which, side)

    def split(v):
        return None if v is None else (v[:n], v[n:2 * n], v[2 * n:])

    return _simpson_sides(spec, left, right, a, which, side, split(p_star), (split(p_minus), split(p_plus)))
