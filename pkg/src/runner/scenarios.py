import logging
from typing import Any, Dict, List, Mapping

from errors import ConfigError, WeakKamError
from hamiltonian import (AppendixExample, BumpPotential, HamiltonianSpec, PeriodicFunction, Quadratic,
                         ShiftedEikonal, ZeroPotential)
from sublevel import CaseTag
from .scenario_desc import Scenario, ScenarioDesc, ScenarioWrapper, scenario

_COMMON_CHECKS = ("critical_constants", "effective_hamiltonian", "classification", "convergence", "comparison",
                  "curves", "pairing", "mather_lp")


class Scenarios:
    """
    Built-in model problems, collected from the decorated builders below
    """

    def __init__(self):
        self._logger = logging.getLogger("scenarios")
        self._scenarios = self._get_scenario_dict()

    @classmethod
    def _get_scenario_dict(cls) -> Dict[str, Scenario]:
        scenarios = {}
        for _, val in cls.__dict__.items():
            if not isinstance(val, ScenarioWrapper):
                continue
            scenarios[val.scenario.name] = val.scenario
        return scenarios

    def names(self) -> List[str]:
        return list(self._scenarios)

    def get(self, name: str) -> Scenario:
        if name not in self._scenarios:
            raise ConfigError(f"unknown scenario {name!r}, expected one of {', '.join(self._scenarios)}")
        return self._scenarios[name]

    def build(self, name: str, eps1: float = 1e-3) -> HamiltonianSpec:
        spec = self.get(name).builder(self, eps1=eps1)
        self._logger.debug("built scenario %s: %s", name, spec.family.name)
        return spec

    def table(self) -> str:
        rows = [("name", "case", "description")]
        rows += [(s.name, s.case, s.description) for s in self._scenarios.values()]
        widths = [max(len(row[i]) for row in rows) for i in range(3)]
        return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows)

    @scenario(ScenarioDesc("E0", "case III, V = 0 (periodic only)", "|p| - cos 2 pi x without potential",
                           CaseTag.III, _COMMON_CHECKS + ("envelope_audit",)))
    def _e0(self, eps1: float = 1e-3) -> HamiltonianSpec:
        return HamiltonianSpec(ShiftedEikonal(0.0))

    @scenario(ScenarioDesc("E1", "case I", "|p| - cos 2 pi x with a well of depth 1/2 at 0.5",
                           CaseTag.I, _COMMON_CHECKS + ("tightness", "envelope_audit")))
    def _e1(self, eps1: float = 1e-3) -> HamiltonianSpec:
        return HamiltonianSpec(ShiftedEikonal(0.0), BumpPotential(0.5, 0.2, -0.5))

    @scenario(ScenarioDesc("E2", "case II-A", "|2 + p| - cos 2 pi x with a bump of height 1/3 at 0.25",
                           CaseTag.II_A, _COMMON_CHECKS + ("closed_form_discounted",)))
    def _e2(self, eps1: float = 1e-3) -> HamiltonianSpec:
        return HamiltonianSpec(ShiftedEikonal(2.0), BumpPotential(0.25, 0.15, 1.0 / 3.0))

    @scenario(ScenarioDesc("E2b", "case II-B", "mirror of E2: |p - 2| - cos 2 pi x, bump at -0.25",
                           CaseTag.II_B, _COMMON_CHECKS + ("closed_form_discounted",)))
    def _e2b(self, eps1: float = 1e-3) -> HamiltonianSpec:
        return HamiltonianSpec(ShiftedEikonal(-2.0), BumpPotential(-0.25, 0.15, 1.0 / 3.0))

    @scenario(ScenarioDesc("E3", "case III", "|p| - cos 2 pi x with a bump of height 1/3 at 0.25",
                           CaseTag.III, _COMMON_CHECKS + ("envelope_audit",)))
    def _e3(self, eps1: float = 1e-3) -> HamiltonianSpec:
        return HamiltonianSpec(ShiftedEikonal(0.0), BumpPotential(0.25, 0.15, 1.0 / 3.0))

    @scenario(ScenarioDesc("appendix", "case III, condition (U) fails",
                           "(p - p1)(p - p2) + eps |p - p1| with p1 = -cos 2 pi x",
                           CaseTag.III, ("critical_constants", "appendix")))
    def _appendix(self, eps1: float = 1e-3) -> HamiltonianSpec:
        return HamiltonianSpec(AppendixExample(eps1))


def list_scenarios() -> str:
    return Scenarios().table()


def _periodic_function(params: Mapping[str, Any]) -> PeriodicFunction:
    kind = params.get("kind", "cos")
    amplitude = float(params.get("amplitude", 1.0))
    if kind == "cos":
        return PeriodicFunction.cosine(amplitude)
    if kind == "shifted-cos":
        return PeriodicFunction.shifted_cosine(float(params.get("shift", 0.0)), amplitude)
    if kind == "fourier":
        return PeriodicFunction(float(params.get("constant", 0.0)),
                                tuple(float(a) for a in params.get("cos", ())),
                                tuple(float(b) for b in params.get("sin", ())))
    raise ConfigError(f"unknown U kind {kind!r}, expected cos, shifted-cos or fourier")


def build_inline(params: Mapping[str, Any]) -> HamiltonianSpec:
    """
    Spec from inline parameters: family, theta, U and an optional bump V
    """

    known = {"family", "theta", "U", "V", "eps1"}
    unknown = set(params) - known
    if unknown:
        raise ConfigError(f"unknown inline scenario keys {sorted(unknown)}")
    family = params.get("family", "eikonal")
    U = _periodic_function(params.get("U", {}))
    try:
        if family == "eikonal":
            hamiltonian = ShiftedEikonal(float(params.get("theta", 0.0)), U)
        elif family == "quadratic":
            hamiltonian = Quadratic(U)
        elif family == "appendix":
            hamiltonian = AppendixExample(float(params.get("eps1", 1e-3)))
        else:
            raise ConfigError(f"unknown family {family!r}, expected eikonal, quadratic or appendix")

        V = params.get("V")
        if V is None:
            return HamiltonianSpec(hamiltonian, ZeroPotential())
        sign = V.get("sign", "+")
        if sign not in ("+", "-"):
            raise ConfigError(f"bump sign must be '+' or '-', got {sign!r}")
        amplitude = abs(float(V.get("amplitude", 1.0))) * (1.0 if sign == "+" else -1.0)
        return HamiltonianSpec(hamiltonian, BumpPotential(float(V["center"]), float(V["half_width"]), amplitude))
    except KeyError as e:
        raise ConfigError(f"inline bump is missing {e.args[0]!r}") from e
    except ConfigError:
        raise
    except WeakKamError as e:
        raise ConfigError(f"invalid inline scenario: {e}") from e
