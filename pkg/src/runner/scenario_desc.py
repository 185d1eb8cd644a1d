from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from sublevel import CaseTag


@dataclass(frozen=True)
class ScenarioDesc:
    name: str
    case: str
    description: str
    expected_tag: Optional[CaseTag]
    checks: Tuple[str, ...]


@dataclass(frozen=True)
class Scenario:
    name: str
    case: str
    description: str
    expected_tag: Optional[CaseTag]
    checks: Tuple[str, ...]
    builder: Callable


@dataclass(frozen=True)
class ScenarioWrapper:
    scenario: Scenario


def scenario(desc: ScenarioDesc):
    def wrap(function):
        return ScenarioWrapper(Scenario(desc.name, desc.case, desc.description, desc.expected_tag, desc.checks,
                                        function))
    return wrap
