from .case_tag import CaseTag
from .critical import (TOL_EQUIL, TOL_LEVEL, TOL_MEAN, CaseReport, Equilibrium, classify, effective_hamiltonian,
                       expand_equilibria, free_critical_value, mean_momenta)
from .sublevel import (SublevelBracket, bracket_interval_integrals, bracket_panel_integrals, sublevel_bracket,
                       sublevel_endpoints, support_sigma)

__all__ = [
    "CaseTag",
    "TOL_EQUIL",
    "TOL_LEVEL",
    "TOL_MEAN",
    "CaseReport",
    "Equilibrium",
    "classify",
    "effective_hamiltonian",
    "expand_equilibria",
    "free_critical_value",
    "mean_momenta",
    "SublevelBracket",
    "bracket_interval_integrals",
    "bracket_panel_integrals",
    "sublevel_bracket",
    "sublevel_endpoints",
    "support_sigma",
]
