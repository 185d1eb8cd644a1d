from .envelope import bounded_critical_solution, discrete_maximal_subsolution, strict_subsolution_vG, u0_G_envelope
from .profiles import (ConditionU, CriticalProfile, ProfileKind, condition_u_status, equilibrium_envelope,
                       periodic_critical_solution, subsolution_tolerance, u0_H)
from .semidistance import BracketPrimitive, Semidistance, semidistance_eval

__all__ = [
    "bounded_critical_solution",
    "discrete_maximal_subsolution",
    "strict_subsolution_vG",
    "u0_G_envelope",
    "ConditionU",
    "CriticalProfile",
    "ProfileKind",
    "condition_u_status",
    "equilibrium_envelope",
    "periodic_critical_solution",
    "subsolution_tolerance",
    "u0_H",
    "BracketPrimitive",
    "Semidistance",
    "semidistance_eval",
]
