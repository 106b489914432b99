import argparse
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Optional

from lobound.certificate import CertificateFamily, loads, ns_certificate
from lobound.config import RunConfig
from lobound.exceptions import InputError, SerializationError
from lobound.fock import GateSpec


@dataclass
class CommandResult:
    """
    ``payload`` becomes the ``result`` member of the JSON document; ``rows``
    (when present) are what a CSV output contains.
    """

    payload: Dict[str, Any]
    exit_code: int = 0
    rows: Optional[List[Dict[str, Any]]] = field(default=None)


class Command(ABC):
    #: subcommand name on the command line
    name: ClassVar[str]
    help: ClassVar[str] = ""
    #: whether :attr:`CommandResult.rows` is produced
    tabular: ClassVar[bool] = False

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """
        Adds the options specific to this command
        """

    @abstractmethod
    def execute(self, config: RunConfig) -> CommandResult:
        pass


def read_certificate(path: str) -> CertificateFamily:
    try:
        with open(path) as handle:
            return loads(handle.read())
    except OSError as exc:
        raise InputError(f"cannot read certificate {path!r}: {exc.strerror}")
    except SerializationError as exc:
        raise InputError(f"{path}: {exc}")


def stored_certificate(config: RunConfig, gate: GateSpec) -> Optional[CertificateFamily]:
    """
    The certificate named by ``--cert``, or the built-in one of the
    non-linear sign shift; ``None`` when neither applies.
    """

    if config.cert is not None:
        cert = read_certificate(config.cert)

        if cert.gate.phases != gate.phases:
            raise InputError(f"certificate {config.cert!r} is for {cert.gate}, not {gate}")

        return cert

    if gate.label == "ns":
        return ns_certificate()

    return None
