import copy
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from discounted import DEFAULT_LAMBDAS, Closure, Grid1D, SolverConfig
from errors import ConfigError, WeakKamError

OUTPUT_ENV = "WEAKKAM1D_OUT"

_SECTIONS = ("grid", "solver")


@dataclass(frozen=True)
class GridConfig:
    """
    Explicit grid when x_lo, x_hi and n are all given, else an integer-aligned grid of step dx
    """

    x_lo: Optional[float] = None
    x_hi: Optional[float] = None
    n: Optional[int] = None
    dx: float = 1.0 / 512

    def __post_init__(self):
        given = [v is not None for v in (self.x_lo, self.x_hi, self.n)]
        if any(given) and not all(given):
            raise ConfigError("grid.x_lo, grid.x_hi and grid.n go together")
        if self.dx <= 0:
            raise ConfigError(f"grid.dx must be positive, got {self.dx}")

    @property
    def explicit(self) -> bool:
        return self.n is not None

    def build(self) -> Grid1D:
        try:
            return Grid1D(float(self.x_lo), float(self.x_hi), int(self.n))
        except WeakKamError as e:
            raise ConfigError(f"invalid grid: {e}") from e


@dataclass(frozen=True)
class SolverSettings:
    closure: str = Closure.PERIODIC_FAR_FIELD.value
    velocity_points: int = 201
    tol_fix: float = 1e-9
    max_iterations: Optional[int] = None
    refine_velocity: bool = True

    def __post_init__(self):
        if self.closure not in {c.value for c in Closure}:
            raise ConfigError(f"solver.closure must be one of {[c.value for c in Closure]}, got {self.closure!r}")

    def to_solver_config(self) -> SolverConfig:
        return SolverConfig(velocity_points=self.velocity_points, tol_fix=self.tol_fix,
                            max_iterations=self.max_iterations, closure=Closure(self.closure),
                            refine_velocity=self.refine_velocity)


@dataclass(frozen=True)
class RunConfig:
    scenario: Union[str, Dict[str, Any]] = "E3"
    eps1: float = 1e-3
    grid: GridConfig = field(default_factory=GridConfig)
    lambdas: Tuple[float, ...] = DEFAULT_LAMBDAS
    lambda_min: Optional[float] = None
    window: Tuple[float, float] = (-2.0, 3.0)
    outputs: str = "outputs"
    checks: Optional[Tuple[str, ...]] = None
    workers: int = 1
    seed: int = 0
    curves: int = 50
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        if not isinstance(self.scenario, (str, dict)):
            raise ConfigError(f"scenario must be a name or an inline parameter object, got {self.scenario!r}")
        if not self.lambdas or any(lam <= 0 for lam in self.lambdas):
            raise ConfigError(f"lambdas must be a non-empty list of positive numbers, got {list(self.lambdas)}")
        if self.lambda_min is not None and self.lambda_min <= 0:
            raise ConfigError(f"lambda_min must be positive, got {self.lambda_min}")
        if len(self.window) != 2 or not self.window[0] < self.window[1]:
            raise ConfigError(f"window must be [lo, hi] with lo < hi, got {list(self.window)}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.eps1 <= 0:
            raise ConfigError(f"eps1 must be positive, got {self.eps1}")
        if self.curves < 1:
            raise ConfigError(f"curves must be at least 1, got {self.curves}")

    @property
    def sweep_lambdas(self) -> Tuple[float, ...]:
        """
        Distinct lambdas in decreasing order, cut at lambda_min (which is appended when missing)
        """

        lambdas = sorted(set(self.lambdas), reverse=True)
        if self.lambda_min is not None:
            lambdas = [lam for lam in lambdas if lam >= self.lambda_min * (1 - 1e-12)]
            if not lambdas or lambdas[-1] > self.lambda_min * (1 + 1e-12):
                lambdas.append(self.lambda_min)
        return tuple(lambdas)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["lambdas"] = list(self.lambdas)
        data["window"] = list(self.window)
        data["checks"] = None if self.checks is None else list(self.checks)
        return data


def parse_value(text: str) -> Any:
    """
    JSON literal when the text parses as one, the plain string otherwise
    """

    try:
        return json.loads(text)
    except ValueError:
        return text


def _set_dotted(tree: Dict[str, Any], dotted: str, value: Any):
    parts = dotted.split(".")
    if parts[0] not in tree:
        raise ConfigError(f"unknown config key {dotted!r}")
    node = tree
    for depth, part in enumerate(parts[:-1]):
        child = node.get(part)
        if not isinstance(child, dict):
            raise ConfigError(f"config key {'.'.join(parts[:depth + 1])!r} has no sub-keys")
        node = child
    inline = parts[0] == "scenario"
    if len(parts) > 1 and not inline and parts[-1] not in node:
        raise ConfigError(f"unknown config key {dotted!r}")
    node[parts[-1]] = value


def _merge(tree: Dict[str, Any], update: Mapping[str, Any], path: str = ""):
    for key, value in update.items():
        where = f"{path}{key}"
        if key not in tree:
            raise ConfigError(f"unknown config key {where!r}")
        if path == "" and key in _SECTIONS:
            if not isinstance(value, Mapping):
                raise ConfigError(f"config key {where!r} expects an object")
            _merge(tree[key], value, where + ".")
        else:
            tree[key] = copy.deepcopy(value)


def _build(tree: Dict[str, Any]) -> RunConfig:
    try:
        grid = GridConfig(**tree["grid"])
        solver = SolverSettings(**tree["solver"])
        checks = tree["checks"]
        return RunConfig(
            grid=grid,
            solver=solver,
            scenario=tree["scenario"],
            eps1=float(tree["eps1"]),
            lambdas=tuple(float(lam) for lam in tree["lambdas"]),
            lambda_min=None if tree["lambda_min"] is None else float(tree["lambda_min"]),
            window=tuple(float(w) for w in tree["window"]),
            outputs=str(tree["outputs"]),
            checks=None if checks is None else tuple(str(c) for c in checks),
            workers=int(tree["workers"]),
            seed=int(tree["seed"]),
            curves=int(tree["curves"]),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"malformed configuration: {e}") from e


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None,
                environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Defaults, then the JSON file, then WEAKKAM1D_OUT, then dotted overrides
    """

    tree = RunConfig().to_dict()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        except ValueError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        _merge(tree, data)

    environ = os.environ if environ is None else environ
    if environ.get(OUTPUT_ENV):
        tree["outputs"] = environ[OUTPUT_ENV]

    for key, value in (overrides or {}).items():
        _set_dotted(tree, key, value)
    return _build(tree)
