from .appendix import AppendixReport, AppendixResolution, appendix_counterexample, birkhoff_measure
from .closed_lp import (DiscreteClosedMeasure, DualityCertificate, Domain, LPResolution, LPResult,
                        closed_measure_lp, default_window, duality_certificate, equilibrium_mather_G,
                        hat_basis, trig_basis)

__all__ = [
    "AppendixReport",
    "AppendixResolution",
    "appendix_counterexample",
    "birkhoff_measure",
    "DiscreteClosedMeasure",
    "DualityCertificate",
    "Domain",
    "LPResolution",
    "LPResult",
    "closed_measure_lp",
    "default_window",
    "duality_certificate",
    "equilibrium_mather_G",
    "hat_basis",
    "trig_basis",
]
