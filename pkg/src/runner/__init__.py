from .checks import Checks, CheckVerdict, RunContext
from .config import OUTPUT_ENV, GridConfig, RunConfig, SolverSettings, load_config, parse_value
from .runner import (EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RUNTIME_ERROR, SCHEMA_VERSION, ReportWriter,
                     RunReport, Runner, run)
from .scenario_desc import Scenario, ScenarioDesc
from .scenarios import Scenarios, build_inline, list_scenarios

__all__ = [
    "Checks",
    "CheckVerdict",
    "RunContext",
    "OUTPUT_ENV",
    "GridConfig",
    "RunConfig",
    "SolverSettings",
    "load_config",
    "parse_value",
    "EXIT_CHECK_FAILED",
    "EXIT_CONFIG_ERROR",
    "EXIT_OK",
    "EXIT_RUNTIME_ERROR",
    "SCHEMA_VERSION",
    "ReportWriter",
    "RunReport",
    "Runner",
    "run",
    "Scenario",
    "ScenarioDesc",
    "Scenarios",
    "build_inline",
    "list_scenarios",
]
