import logging
import math

import numpy as np

from lobound.certificate import bound, find_certificate, phase_bound, verify
from lobound.commands import Command, CommandResult, stored_certificate
from lobound.config import RunConfig
from lobound.exceptions import UnverifiedCertificateError
from lobound.fock import gate_phase
from lobound.utils import TWO_PI

logger = logging.getLogger(__name__)


class BoundCommand(Command):
    """
    Upper bound on the success probability of a gate: a verified stored
    certificate when there is one, the closed form for phase gates and a
    certificate search otherwise.
    """

    name = "bound"
    help = "upper bound on the success probability of a gate"

    def add_arguments(self, parser):
        parser.add_argument("--cert", help="certificate table to verify instead of searching")

    def execute(self, config: RunConfig) -> CommandResult:
        gate = config.gate_spec
        cert = stored_certificate(config, gate)

        if cert is not None:
            report = verify(cert, config.grid, config.kmax, config.tol, config.eta)
            payload = {
                "method": "certificate",
                "delta": cert.delta,
                "verification": report.as_dict(),
            }
            try:
                payload["bound"] = bound(cert, report)
            except UnverifiedCertificateError as exc:
                logger.error("%s", exc)
                payload["bound"] = None

                return CommandResult(payload, exit_code=1)

            return CommandResult(payload)

        if gate.label == "phase":
            value = phase_bound(gate.phases[1])

            return CommandResult(
                {
                    "method": "closed-form",
                    "bound": value,
                    "delta": 0.5 * math.sqrt(value),
                    "phi2": gate.phases[1],
                }
            )
        cert = find_certificate(
            gate, config.grid, config.kmax, tol=config.tol, eta=config.eta, workers=config.workers
        )

        return CommandResult(
            {
                "method": "search",
                "bound": cert.bound,
                "delta": cert.delta,
                "cells": len(cert.pieces),
            }
        )


class SweepPhaseCommand(Command):
    """
    Closed form bound of the non-linear phase shift next to the bound of a
    searched certificate, on a uniform grid of ``phi2`` in ``[0, 2 pi]``.
    """

    name = "sweep-phase"
    help = "phase gate bound curve, closed form against certificate search"
    tabular = True

    def execute(self, config: RunConfig) -> CommandResult:
        rows = []

        for index, phi2 in enumerate(np.linspace(0.0, TWO_PI, config.points)):
            cert = find_certificate(
                gate_phase(float(phi2)),
                config.grid,
                config.kmax,
                tol=config.tol,
                eta=config.eta,
                workers=config.workers,
            )
            rows.append(
                {
                    "phi2": float(phi2),
                    "closed_form": phase_bound(float(phi2)),
                    "searched_bound": cert.bound,
                }
            )
            logger.info("phase sweep %d/%d: phi2=%.6f", index + 1, config.points, phi2)
        excess = max(row["searched_bound"] - row["closed_form"] for row in rows)

        return CommandResult({"points": len(rows), "max_excess": excess, "rows": rows}, rows=rows)
