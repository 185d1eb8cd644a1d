import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigError, WeakKamError, jsonable
from occupation import occupation_measure
from .checks import Checks, CheckVerdict, RunContext
from .config import RunConfig
from .scenarios import Scenarios, build_inline

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3

_INLINE_CHECKS = ("critical_constants", "classification", "convergence", "comparison", "curves")


@dataclass(frozen=True)
class RunReport:
    scenario: str
    verdicts: Tuple[CheckVerdict, ...]
    error: Optional[Dict[str, Any]] = None
    outputs: Optional[str] = None
    files: Tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.error is None and all(v.passed for v in self.verdicts)

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return EXIT_RUNTIME_ERROR
        return EXIT_OK if self.passed else EXIT_CHECK_FAILED

    def summary(self) -> str:
        lines = [f"scenario {self.scenario}"]
        for v in self.verdicts:
            status = "skipped" if v.skipped else ("pass" if v.passed else "FAIL")
            lines.append(f"  {v.name:<24}{status}")
        if self.error is not None:
            lines.append(f"  error: {self.error['error']}: {self.error['message']}")
        return "\n".join(lines)


class ReportWriter:
    """
    Writes report.json and the plot-ready tables of one run into a directory
    """

    _FLOAT = "%.12e"

    def __init__(self, directory: Path):
        self._logger = logging.getLogger("runner")
        self._directory = directory
        self._files: List[str] = []

    @property
    def files(self) -> Tuple[str, ...]:
        return tuple(self._files)

    def _path(self, name: str) -> Path:
        self._logger.debug("writing %s", name)
        self._files.append(name)
        return self._directory / name

    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]):
        with open(self._path(name), "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])

    def write_dat(self, name: str, rows: Sequence[Tuple[float, float]], header: str):
        np.savetxt(self._path(name), np.asarray(rows, dtype=float).reshape(-1, 2), fmt=self._FLOAT,
                   header=header)

    def write_json(self, name: str, data: Dict[str, Any]):
        with open(self._path(name), "w", encoding="utf-8") as f:
            json.dump(jsonable(data), f, indent=2, allow_nan=False)
            f.write("\n")

    def write_artifacts(self, ctx: RunContext):
        """
        Every table whose artifact the checks computed; nothing is solved here
        """

        if ctx.computed("u0G") or ctx.computed("u0H"):
            rows = []
            for name in ("u0H", "u0G"):
                if ctx.computed(name):
                    rows += getattr(ctx, name).to_csv_rows()
            self.write_csv("profiles.csv", ("x", "value", "kind", "level"), rows)
        if ctx.computed("u0G"):
            lo, hi = ctx.config.window
            profile = ctx.u0G.restricted(lo, hi)
            self.write_dat("u0_G.dat", list(zip(profile.grid.nodes, profile.values)), "x u0_G")

        measures = self._measure_rows(ctx)
        if measures:
            self.write_csv("measures.csv", ("source", "x", "q", "weight", "part"), measures)

        if ctx.computed("sweep"):
            table = ctx.sweep
            self.write_csv("convergence.csv", table.to_csv_rows()[0], table.to_csv_rows()[1:])
            lo, hi = ctx.config.window
            for sol in table.solutions:
                self.write_dat(f"u_lambda_{sol.lam:g}.dat", sol.to_dat_rows(lo, hi),
                               f"x u_lambda lambda={sol.lam!r}")

    @staticmethod
    def _measure_rows(ctx: RunContext) -> List[Tuple[Any, ...]]:
        rows: List[Tuple[Any, ...]] = []
        for name, source in (("torus_lp", "lp_torus"), ("window_lp", "lp_window")):
            if ctx.computed(name):
                lp = getattr(ctx, name)
                rows += [(source, x, q, w, 0) for x, q, w in lp.measure.support()]
        if ctx.trajectories:
            traj = ctx.trajectories[0]
            source = f"occupation_x0={traj.x0!r}_lambda={traj.lam!r}"
            rows += [(source,) + row for row in occupation_measure(traj).to_csv_rows(1)]
        if ctx.computed("appendix"):
            rows += [("appendix_integral", y, 0.0, value, 0) for y, value in ctx.appendix.to_csv_rows()]
        return rows


class Runner:
    """
    classify, build u0, sweep lambda, read curves and solve the LPs as the requested checks need,
    then write the report
    """

    def __init__(self, config: RunConfig):
        self._logger = logging.getLogger("runner")
        self._config = config
        self._scenarios = Scenarios()

    def _context(self) -> Tuple[RunContext, Tuple[str, ...]]:
        config = self._config
        if isinstance(config.scenario, str):
            desc = self._scenarios.get(config.scenario)
            spec = self._scenarios.build(config.scenario, eps1=config.eps1)
            context = RunContext(config, spec, desc.name, desc.expected_tag)
            defaults = desc.checks
        else:
            spec = build_inline(config.scenario)
            context = RunContext(config, spec, "inline")
            defaults = _INLINE_CHECKS
        names = tuple(config.checks) if config.checks is not None else defaults
        unknown = [n for n in names if n not in Checks.names()]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}, expected some of {Checks.names()}")
        return context, names

    def run(self, write_outputs: bool = True) -> RunReport:
        ctx, names = self._context()
        directory = Path(self._config.outputs)
        if write_outputs:
            try:
                directory.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                raise ConfigError(f"cannot create output directory {directory}: {e}") from e

        checks = Checks(ctx)
        verdicts: List[CheckVerdict] = []
        error = None
        try:
            for name in names:
                verdicts.append(checks.run(name))
        except ConfigError:
            raise
        except WeakKamError as e:
            self._logger.error("scenario %s stopped: %s", ctx.name, e)
            error = e.to_dict()

        files: Tuple[str, ...] = ()
        if write_outputs:
            writer = ReportWriter(directory)
            writer.write_artifacts(ctx)
            report = RunReport(ctx.name, tuple(verdicts), error, str(directory), writer.files + ("report.json",))
            writer.write_json("report.json", self._report_json(ctx, report))
            files = writer.files
        report = RunReport(ctx.name, tuple(verdicts), error, str(directory) if write_outputs else None, files)
        self._logger.info("scenario %s finished with exit code %d", ctx.name, report.exit_code)
        return report

    def _report_json(self, ctx: RunContext, report: RunReport) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "scenario": ctx.name,
            "family": ctx.spec.family.name,
            "potential": repr(ctx.spec.potential),
            "config": self._config.to_dict(),
            "passed": report.passed,
            "exit_code": report.exit_code,
            "checks": [v.to_dict() for v in report.verdicts],
            "error": report.error,
            "files": list(report.files),
        }
        if ctx.computed("report"):
            data["case_report"] = ctx.report.to_dict()
        if ctx.computed("sweep"):
            data["convergence"] = ctx.sweep.to_dict()
            data["bounds"] = {repr(sol.lam): sol.check_bounds() for sol in ctx.sweep.solutions}
        if ctx.computed("u0H"):
            data["u0_H"] = {"trusted": ctx.u0H.trusted, "meta": ctx.u0H.meta}
        if ctx.computed("appendix"):
            data["appendix"] = ctx.appendix.to_dict()
        return data


def run(config: RunConfig, write_outputs: bool = True) -> RunReport:
    return Runner(config).run(write_outputs)
