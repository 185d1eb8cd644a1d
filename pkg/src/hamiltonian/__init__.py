from .bases import BaseHamiltonian, PotentialSpec, SignHint
from .families import AppendixExample, Custom, Quadratic, ShiftedEikonal
from .hamiltonian import L_INF, HamiltonianSpec, LagrangianView, Which, argmin_p, evaluate, fenchel_lagrangian
from .periodic import PeriodicFunction
from .potentials import BumpPotential, ZeroPotential

__all__ = [
    "BaseHamiltonian",
    "PotentialSpec",
    "SignHint",
    "AppendixExample",
    "Custom",
    "Quadratic",
    "ShiftedEikonal",
    "L_INF",
    "HamiltonianSpec",
    "LagrangianView",
    "Which",
    "argmin_p",
    "evaluate",
    "fenchel_lagrangian",
    "PeriodicFunction",
    "BumpPotential",
    "ZeroPotential",
]
