"""
Command line front end::

    lobound bound --gate ns
    lobound certify --gate ns --grid 4001 --kmax 1000 --tol 1e-10
    lobound sweep-phase --points 101 --out curve.csv

Documents go to ``--out`` (or stdout); progress goes to stderr. Exit status
is 0 on success, 1 when a verification fails, 2 on invalid input and 3 when
a numerical routine breaks down (eigen solver, linear program, dual structure).
"""
import argparse
import csv
import io
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence

from lobound._version import get_versions
from lobound.commands import Command, CommandResult
from lobound.commands.bounds import BoundCommand, SweepPhaseCommand
from lobound.commands.certify import CertifyCommand, FindCertCommand
from lobound.commands.duality import DualityCheckCommand
from lobound.commands.search import OptimizeCommand, SimulateCommand
from lobound.config import FORMATS, RunConfig
from lobound.exceptions import (
    ConvergenceError,
    InputError,
    LoboundError,
    SolverError,
    StructuralError,
)

logger = logging.getLogger("lobound")

SCHEMA = 1
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3

COMMANDS: Dict[str, Command] = {
    command.name: command
    for command in (
        BoundCommand(),
        OptimizeCommand(),
        CertifyCommand(),
        FindCertCommand(),
        DualityCheckCommand(),
        SweepPhaseCommand(),
        SimulateCommand(),
    )
}

#: fields of a CSV document, per tabular command
CSV_FIELDS: Dict[str, List[str]] = {
    "sweep-phase": ["phi2", "closed_form", "searched_bound"],
}

_handler: Optional[logging.Handler] = None


def configure_logging(verbosity: int) -> None:
    """
    Routes the ``lobound`` loggers to stderr: WARNING with ``-q``, INFO by
    default and DEBUG with ``-v``.
    """

    global _handler

    if _handler is not None:
        logger.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter("%(asctime)s %(name)s %(levelname)s %(message)s"))
    logger.addHandler(_handler)
    logger.setLevel({-1: logging.WARNING, 0: logging.INFO}.get(verbosity, logging.DEBUG))


def _common_options() -> argparse.ArgumentParser:
    # None stands for the command default
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--gate", help="ns | phase:<phi2> | sign:<N> | custom:<phi1>,...,<phiN>")
    parser.add_argument("--n", type=int, help="auxiliary photon cutoff")
    parser.add_argument("--restarts", type=int, help="multi-start restarts")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--grid", type=int, help="transmittivity grid points")
    parser.add_argument("--kmax", type=int, help="largest Fock level checked on the grid")
    parser.add_argument("--tol", type=float, help="verification tolerance")
    parser.add_argument("--eta", type=float, help="width of the dense bands next to t = +-1")
    parser.add_argument("--draws", type=int, help="random draws of duality-check")
    parser.add_argument("--points", type=int, help="phase values of sweep-phase")
    parser.add_argument("--workers", type=int, help="worker processes (default: $LOBOUND_WORKERS)")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=FORMATS, help="output format")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v", "--verbose", dest="verbosity", action="store_const", const=1, default=0
    )
    verbosity.add_argument("-q", "--quiet", dest="verbosity", action="store_const", const=-1)

    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lobound",
        description="Success probability bounds of postselected linear optics gates",
    )
    parser.add_argument("--version", action="version", version=get_versions()["version"])
    common = _common_options()
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    for command in COMMANDS.values():
        subparser = subparsers.add_parser(command.name, help=command.help, parents=[common])
        command.add_arguments(subparser)

    return parser


def render(config: RunConfig, result: CommandResult, timestamp: Optional[str] = None) -> str:
    """
    The output document of a run. JSON keys are sorted, so identical
    configurations produce identical documents up to ``timestamp``.
    """

    if config.format == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_FIELDS[config.command], lineterminator="\n")
        writer.writeheader()
        writer.writerows(result.rows or [])

        return buffer.getvalue()

    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    document = {
        "schema": SCHEMA,
        "version": get_versions()["version"],
        "command": config.command,
        "config": config.as_dict(),
        "result": result.payload,
        "timestamp": timestamp,
    }

    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def run(config: RunConfig) -> int:
    """
    Executes one configured command and writes its document

    :return: the exit status
    """

    command = COMMANDS[config.command]

    if config.format == "csv" and not command.tabular:
        raise InputError(f"{config.command} has no csv output")
    result = command.execute(config)
    text = render(config, result)

    if config.out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(config.out, "w", newline="") as handle:
            handle.write(text)
        logger.info("wrote %s", config.out)

    return result.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    options = vars(args)
    command = options.pop("command")
    configure_logging(options.pop("verbosity"))

    try:
        config = RunConfig.resolve(command, options)

        return run(config)
    except (InputError, OSError) as exc:
        logger.error("invalid input: %s", exc)

        return EXIT_INVALID
    except (ConvergenceError, SolverError, StructuralError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)

        return EXIT_INTERNAL
    except LoboundError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)

        return EXIT_FAILED
