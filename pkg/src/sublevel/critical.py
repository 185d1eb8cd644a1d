import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from errors import ClassificationError, CoercivityError, UnboundedSearch
from hamiltonian import HamiltonianSpec, Which, argmin_p
from utils import golden_section_minimize
from .case_tag import CaseTag
from .sublevel import bracket_panel_integrals, sublevel_endpoints

TOL_LEVEL = 1e-8
TOL_MEAN = 1e-6
TOL_EQUIL = 1e-8

_POINTS_PER_UNIT = 4096
_LEVEL_CAP = 1e6
_CANDIDATE_BAND = 1e-4

_logger = logging.getLogger("sublevel")


@dataclass(frozen=True)
class Equilibrium:
    """
    Connected component [lo, hi] of equilibria, reported by its midpoint.

    Periodic components stand for every integer translate and are stored with point in [0, 1).
    """

    point: float
    lo: float
    hi: float
    periodic: bool

    def shifted(self, k: int) -> "Equilibrium":
        return Equilibrium(self.point + k, self.lo + k, self.hi + k, self.periodic)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _scan_points(spec: HamiltonianSpec, which: Which, points_per_unit: int) -> Tuple[np.ndarray, bool]:
    if which == Which.H or spec.potential.is_zero:
        return np.arange(points_per_unit) / points_per_unit, True
    y_lo, y_hi = spec.support
    lo = min(0, int(np.floor(y_lo)) - 1)
    hi = max(1, int(np.ceil(y_hi)) + 1)
    return np.arange(lo * points_per_unit, hi * points_per_unit + 1) / points_per_unit, False


def _runs(mask: np.ndarray, circular: bool) -> List[Tuple[int, int]]:
    """
    Index runs [i, j] of True values, joined across the ends when circular
    """

    if not np.any(mask):
        return []
    padded = np.concatenate(([False], mask, [False]))
    starts = np.flatnonzero(~padded[:-1] & padded[1:])
    stops = np.flatnonzero(padded[:-1] & ~padded[1:]) - 1
    runs = list(zip(starts.tolist(), stops.tolist()))
    n = len(mask)
    if circular and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1:
        first = runs.pop(0)
        last = runs.pop()
        runs.append((last[0] - n, first[1]))
    return runs


def free_critical_value(spec: HamiltonianSpec, which: Which = Which.G,
                        points_per_unit: int = _POINTS_PER_UNIT) -> Tuple[float, List[Equilibrium]]:
    """
    c_f = sup_x min_p G(x, p) and the equilibria where the sup is attained.

    Local maxima of the grid scan are polished (parabolic vertex, then golden section)
    before the components are extracted.
    """

    xs, circular = _scan_points(spec, which, points_per_unit)
    step = 1.0 / points_per_unit
    _, m = argmin_p(spec, xs, which)

    def min_value(x):
        return argmin_p(spec, x, which)[1]

    if circular:
        m_left, m_right = np.roll(m, 1), np.roll(m, -1)
    else:
        m_left = np.concatenate(([-np.inf], m[:-1]))
        m_right = np.concatenate((m[1:], [-np.inf]))
    peaks = np.flatnonzero((m >= m_left) & (m >= m_right) & (m >= np.max(m) - _CANDIDATE_BAND))

    # parabolic vertex, kept inside the cell pair around each peak
    curvature = m_left[peaks] - 2.0 * m[peaks] + m_right[peaks]
    with np.errstate(divide="ignore", invalid="ignore"):
        offset = np.where(curvature < 0, 0.5 * (m_left[peaks] - m_right[peaks]) / curvature, 0.0)
    offset = np.clip(np.nan_to_num(offset), -1.0, 1.0)
    vertex = xs[peaks] + offset * step
    vertex_value = min_value(vertex)
    polished, neg = golden_section_minimize(lambda x: -min_value(x), xs[peaks] - step, xs[peaks] + step)
    polished_value = -neg
    candidates = np.where(polished_value >= vertex_value, polished, vertex)
    candidate_values = np.maximum(polished_value, vertex_value)

    c_f = float(max(np.max(m), np.max(candidate_values)))
    threshold = c_f - TOL_EQUIL
    components: List[Tuple[float, float, float]] = []
    covered = np.zeros(len(xs), dtype=bool)
    for i, j in _runs(m >= threshold, circular):
        lo = xs[i] if i >= 0 else xs[i] - 1.0
        hi = xs[j]
        idx = np.arange(i, j + 1) % len(xs)
        covered[idx] = True
        if i == j:
            k = np.flatnonzero(peaks == i)
            point = float(candidates[k[0]]) if len(k) and candidate_values[k[0]] >= threshold else float(xs[i])
            components.append((point, min(point, lo), max(point, hi)))
        else:
            components.append((0.5 * (lo + hi), float(lo), float(hi)))
    for k in np.flatnonzero((candidate_values >= threshold) & ~covered[peaks]):
        point = float(candidates[k])
        components.append((point, point, point))

    equilibria = _label_components(spec, which, components)
    _logger.debug("free critical value %s: c_f=%.12g, %d components", which.name, c_f, len(equilibria))
    return c_f, equilibria


def _label_components(spec: HamiltonianSpec, which: Which,
                      components: Sequence[Tuple[float, float, float]]) -> List[Equilibrium]:
    periodic: Dict[float, Equilibrium] = {}
    fixed: List[Equilibrium] = []
    y_lo, y_hi = spec.support
    for point, lo, hi in components:
        inside = (not spec.potential.is_zero and which == Which.G and lo <= y_hi + 1e-12 and hi >= y_lo - 1e-12)
        if inside:
            fixed.append(Equilibrium(point, lo, hi, False))
            continue
        shift = float(np.floor(point))
        key = round(point - shift, 9) % 1.0
        if key not in periodic:
            periodic[key] = Equilibrium(point - shift, lo - shift, hi - shift, True)
    merged = list(periodic.values()) + fixed
    return sorted(merged, key=lambda e: (e.periodic is False, e.point))


def expand_equilibria(equilibria: Sequence[Equilibrium], lo: float, hi: float,
                      support: Optional[Tuple[float, float]] = None, endpoints: bool = True) -> np.ndarray:
    """
    Concrete equilibrium points inside [lo, hi]; periodic copies inside the support are dropped
    """

    points = []
    for e in equilibria:
        copies = [e]
        if e.periodic:
            copies = [e.shifted(k) for k in range(int(np.floor(lo - e.hi)) - 1, int(np.ceil(hi - e.lo)) + 2)]
        for c in copies:
            if e.periodic and support is not None and support[0] - 1e-12 <= c.point <= support[1] + 1e-12:
                continue
            for y in ((c.lo, c.point, c.hi) if endpoints else (c.point,)):
                if lo - 1e-12 <= y <= hi + 1e-12:
                    points.append(y)
    return np.unique(np.round(np.array(points, dtype=float), 12))


def mean_momenta(spec: HamiltonianSpec, a: float, panels: int = _POINTS_PER_UNIT,
                 side: str = "both") -> Tuple[Optional[float], Optional[float]]:
    """
    (int_0^1 p-_H(x, a) dx, int_0^1 p+_H(x, a) dx) for the base Hamiltonian
    """

    edges = np.linspace(0.0, 1.0, panels + 1)
    minus, plus = bracket_panel_integrals(spec.base(), edges, a, Which.H, side)
    return (None if minus is None else float(np.sum(minus)),
            None if plus is None else float(np.sum(plus)))


def effective_hamiltonian(spec: HamiltonianSpec, theta: float, c_f: Optional[float] = None) -> float:
    """
    Smallest a >= c_f(H) with I-(a) <= theta <= I+(a)
    """

    base = spec.base()
    if c_f is None:
        c_f = free_critical_value(base, Which.H)[0]
    I_minus, I_plus = mean_momenta(base, c_f)
    if I_minus <= theta <= I_plus:
        return c_f

    # both gaps are nondecreasing in a and negative at c_f
    if theta > I_plus:
        def gap(a):
            return mean_momenta(base, a, side="plus")[1] - theta
    else:
        def gap(a):
            return theta - mean_momenta(base, a, side="minus")[0]

    span = 1.0
    try:
        while gap(c_f + span) < 0:
            span *= 2.0
            if span > _LEVEL_CAP:
                raise UnboundedSearch(f"no level below c_f + {_LEVEL_CAP} contains theta={theta}",
                                      theta=theta, c_f=c_f)
    except CoercivityError as e:
        raise UnboundedSearch(f"search bound exhausted before reaching theta={theta}",
                              theta=theta, c_f=c_f, level=c_f + span) from e
    lo = c_f + span / 2 if span > 1.0 else c_f
    return float(brentq(gap, lo, c_f + span, xtol=TOL_LEVEL / 4))


@dataclass(frozen=True)
class CaseReport:
    c_f_H: float
    c_H: float
    c_f_G: float
    c_G: float
    case_tag: CaseTag
    equilibria_H: Tuple[Equilibrium, ...]
    equilibria_G: Tuple[Equilibrium, ...]
    P_H_plus: float
    P_H_minus: float
    rho: float
    mather_constraint_active: bool

    @property
    def delta(self) -> float:
        return self.c_G - self.c_H

    def constants(self) -> Dict[str, float]:
        return {"c_f_H": self.c_f_H, "c_H": self.c_H, "c_f_G": self.c_f_G, "c_G": self.c_G}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c_f_H": self.c_f_H,
            "c_H": self.c_H,
            "c_f_G": self.c_f_G,
            "c_G": self.c_G,
            "case_tag": self.case_tag.name,
            "equilibria_H": [e.to_dict() for e in self.equilibria_H],
            "equilibria_G": [e.to_dict() for e in self.equilibria_G],
            "P_H_plus": self.P_H_plus,
            "P_H_minus": self.P_H_minus,
            "rho": self.rho,
            "mather_constraint_active": self.mather_constraint_active,
        }


def classify(spec: HamiltonianSpec, points_per_unit: int = _POINTS_PER_UNIT) -> CaseReport:
    base = spec.base()
    c_f_H, equilibria_H = free_critical_value(base, Which.H, points_per_unit)
    c_H = effective_hamiltonian(base, 0.0, c_f=c_f_H)
    if spec.potential.is_zero:
        c_f_G, equilibria_G = c_f_H, equilibria_H
    else:
        c_f_G, equilibria_G = free_critical_value(spec, Which.G, points_per_unit)
    c_G = max(c_H, c_f_G)
    I_minus, I_plus = mean_momenta(base, c_H, panels=points_per_unit)
    xs = np.arange(points_per_unit) / points_per_unit
    p_minus, p_plus = sublevel_endpoints(base, xs, c_H, Which.H)
    rho = float(np.min(p_plus - p_minus))

    constants = {"c_f_H": c_f_H, "c_H": c_H, "c_f_G": c_f_G, "c_G": c_G}
    if c_f_G < c_f_H - TOL_LEVEL:
        raise ClassificationError("c_f(G) < c_f(H)", constants)
    if c_G > c_H + TOL_LEVEL:
        tag = CaseTag.I
    elif abs(c_H - c_f_H) <= TOL_LEVEL:
        tag = CaseTag.III
    else:
        a_side = abs(I_plus) <= TOL_MEAN
        b_side = abs(I_minus) <= TOL_MEAN
        if a_side == b_side:
            raise ClassificationError(
                f"case II with I-={I_minus:.3g}, I+={I_plus:.3g}: cannot pick A or B", constants)
        tag = CaseTag.II_A if a_side else CaseTag.II_B
        if rho <= 0:
            raise ClassificationError(f"case II with degenerate bracket, rho={rho}", constants)

    report = CaseReport(
        c_f_H=c_f_H, c_H=c_H, c_f_G=c_f_G, c_G=c_G, case_tag=tag,
        equilibria_H=tuple(equilibria_H), equilibria_G=tuple(equilibria_G),
        P_H_plus=I_plus, P_H_minus=I_minus, rho=rho,
        mather_constraint_active=abs(c_G - c_f_G) <= TOL_LEVEL,
    )
    _logger.info("classified %s: case %s, c_f_H=%.9g c_H=%.9g c_f_G=%.9g c_G=%.9g",
                 spec.family.name, tag.name, c_f_H, c_H, c_f_G, c_G)
    return report
