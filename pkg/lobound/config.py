"""
Run configuration of the command line front end.

A :class:`RunConfig` is resolved once (command line values, then per-command
defaults, then the environment) and echoed verbatim in every output document.
"""
import dataclasses
import os
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

from lobound.exceptions import InputError
from lobound.fock import GateSpec, parse_gate
from lobound.utils import default_workers

#: environment variable holding the default worker count
WORKERS_ENV = "LOBOUND_WORKERS"

COMMANDS: Tuple[str, ...] = (
    "bound",
    "optimize",
    "certify",
    "find-cert",
    "duality-check",
    "sweep-phase",
    "simulate",
)
FORMATS: Tuple[str, ...] = ("json", "csv")

BASE_DEFAULTS: Dict[str, Any] = {
    "gate": "ns",
    "n": 2,
    "restarts": 20,
    "seed": 0,
    "grid": 4001,
    "kmax": 1000,
    "tol": 1e-10,
    "eta": 1e-3,
    "draws": 100,
    "points": 101,
    "format": "json",
}

#: overrides of :data:`BASE_DEFAULTS` per command
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "find-cert": {"grid": 2001, "kmax": 500},
    "duality-check": {"n": 10, "grid": 401, "kmax": 300},
    "sweep-phase": {"grid": 401, "kmax": 300, "format": "csv"},
}


def workers_from_env(environ: Optional[Mapping[str, str]] = None) -> int:
    """
    Worker count from :data:`WORKERS_ENV`, or the number of available CPUs
    """

    environ = os.environ if environ is None else environ
    value = environ.get(WORKERS_ENV, "").strip()

    if not value:
        return default_workers()
    try:
        workers = int(value)
    except ValueError:
        raise InputError(f"{WORKERS_ENV} must be an integer, got {value!r}")

    if workers < 1:
        raise InputError(f"{WORKERS_ENV} must be >= 1, got {workers}")

    return workers


def _at_least(name: str, value, minimum):
    if value < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {value!r}")


@dataclass(frozen=True)
class RunConfig:
    """
    Fully resolved options of one run. ``seed`` is carried by every command,
    stochastic or not, so that outputs always record it.
    """

    command: str
    gate: str
    n: int
    restarts: int
    seed: int
    grid: int
    kmax: int
    tol: float
    eta: float
    draws: int
    points: int
    workers: int
    format: str
    out: Optional[str] = None
    cert: Optional[str] = None
    cert_out: Optional[str] = None
    input: Optional[str] = None
    n_max: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command: {self.command!r}")

        if self.format not in FORMATS:
            raise InputError(f"unknown output format: {self.format!r}")
        _at_least("n", self.n, 0)
        _at_least("restarts", self.restarts, 1)
        _at_least("grid", self.grid, 2)
        _at_least("kmax", self.kmax, 0)
        _at_least("draws", self.draws, 1)
        _at_least("points", self.points, 2)
        _at_least("workers", self.workers, 1)

        if self.n_max is not None:
            _at_least("n_max", self.n_max, 0)

        if not self.tol > 0:
            raise InputError(f"tol must be positive, got {self.tol!r}")

        if not 0 < self.eta < 1:
            raise InputError(f"eta must lie in (0, 1), got {self.eta!r}")
        # canonical selector; raises on malformed input
        object.__setattr__(self, "gate", parse_gate(self.gate).selector)

    @property
    def gate_spec(self) -> GateSpec:
        return parse_gate(self.gate)

    @classmethod
    def resolve(
        cls,
        command: str,
        options: Mapping[str, Any],
        environ: Optional[Mapping[str, str]] = None,
    ) -> "RunConfig":
        """
        Builds the configuration of ``command`` from ``options``; options that
        are missing or ``None`` take the command's defaults. ``workers``
        falls back to :func:`workers_from_env`.
        """

        if command not in COMMANDS:
            raise InputError(f"unknown command: {command!r}")
        values: Dict[str, Any] = dict(BASE_DEFAULTS)
        values.update(COMMAND_DEFAULTS.get(command, {}))
        names = {f.name for f in dataclasses.fields(cls)}

        for key, value in options.items():
            if value is None:
                continue

            if key not in names:
                raise InputError(f"unknown option: {key!r}")
            values[key] = value

        if values.get("workers") is None:
            values["workers"] = workers_from_env(environ)
        values["command"] = command

        return cls(**values)

    def as_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)
