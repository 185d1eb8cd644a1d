import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from errors import ConfigError, WeakKamError
from runner import (EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RUNTIME_ERROR, Checks, RunConfig, list_scenarios, load_config,
                    parse_value, run)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakkam1d", description="1D vanishing-discount experiments")
    commands = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(sub):
        sub.add_argument("--scenario", help="built-in scenario name (see `list`)")
        sub.add_argument("--config", help="JSON run configuration")
        sub.add_argument("--lambda-min", type=float, help="smallest discount of the sweep")
        sub.add_argument("--eps1", type=float, help="epsilon_1 of the appendix example")
        sub.add_argument("--workers", type=int, help="threads for the lambda solves")
        sub.add_argument("--outputs", help="output directory (default from config or WEAKKAM1D_OUT)")
        sub.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    add_run_flags(commands.add_parser("run", help="run a scenario and write its report",
                                      epilog="any config field can be set with a dotted flag, e.g. --grid.dx 0.001"))
    commands.add_parser("list", help="list built-in scenarios")
    check = commands.add_parser("check", help="run named checks only, without writing outputs")
    check.add_argument("checks", nargs="+", choices=Checks.names(), metavar="CHECK",
                       help=f"one of {', '.join(Checks.names())}")
    add_run_flags(check)
    return parser


def _dotted_overrides(extra: Sequence[str]) -> Dict[str, object]:
    overrides = {}
    i = 0
    while i < len(extra):
        token = extra[i]
        if not token.startswith("--") or len(token) == 2:
            raise ConfigError(f"unexpected argument {token!r}")
        key = token[2:]
        if "=" in key:
            key, text = key.split("=", 1)
            i += 1
        elif i + 1 < len(extra):
            text = extra[i + 1]
            i += 2
        else:
            raise ConfigError(f"flag {token} needs a value")
        overrides[key] = parse_value(text)
    return overrides


def _config(args: argparse.Namespace, extra: Sequence[str]) -> RunConfig:
    overrides = _dotted_overrides(extra)
    for flag, key in (("scenario", "scenario"), ("lambda_min", "lambda_min"), ("eps1", "eps1"),
                      ("workers", "workers"), ("outputs", "outputs")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    if args.command == "check":
        overrides["checks"] = list(args.checks)
    return load_config(args.config, overrides)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _parser()
    args, extra = parser.parse_known_args(argv)
    if args.command == "list":
        if extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        print(list_scenarios())
        return EXIT_OK

    try:
        config = _config(args, extra)
        if args.command == "run":
            outputs = Path(config.outputs)
            outputs.mkdir(parents=True, exist_ok=True)
            logging.basicConfig(level=args.log_level, filename=str(outputs / "run.log"), filemode="w")
        else:
            logging.basicConfig(level=args.log_level)
        report = run(config, write_outputs=args.command == "run")
    except ConfigError as e:
        print(f"weakkam1d: error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except OSError as e:
        print(f"weakkam1d: error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except WeakKamError as e:
        print(f"weakkam1d: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR

    print(report.summary())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
