import logging

from lobound.certificate import dumps, find_certificate, verify
from lobound.commands import Command, CommandResult, stored_certificate
from lobound.config import RunConfig
from lobound.exceptions import InputError

logger = logging.getLogger(__name__)


class CertifyCommand(Command):
    """
    Verifies a stored certificate: the built-in one of the non-linear sign
    shift, or a table written by ``find-cert``.
    """

    name = "certify"
    help = "verify a dual certificate on a grid"

    def add_arguments(self, parser):
        parser.add_argument("--cert", help="certificate table written by find-cert")

    def execute(self, config: RunConfig) -> CommandResult:
        gate = config.gate_spec
        cert = stored_certificate(config, gate)

        if cert is None:
            raise InputError(f"no built-in certificate for {gate}; pass --cert")
        report = verify(cert, config.grid, config.kmax, config.tol, config.eta)

        if not report.passed:
            logger.error(
                "certificate fails at t=%r, k=%d: %r > %r",
                report.estimate_t,
                report.estimate_k,
                report.max_estimate,
                cert.delta,
            )

        return CommandResult(
            {
                "gate": gate.selector,
                "passed": report.passed,
                "delta": cert.delta,
                "bound": report.bound if report.passed else None,
                "verification": report.as_dict(),
            },
            exit_code=0 if report.passed else 1,
        )


class FindCertCommand(Command):
    name = "find-cert"
    help = "search a piecewise constant certificate"

    def add_arguments(self, parser):
        parser.add_argument("--cert-out", dest="cert_out", help="write the certificate table here")

    def execute(self, config: RunConfig) -> CommandResult:
        cert = find_certificate(
            config.gate_spec,
            config.grid,
            config.kmax,
            tol=config.tol,
            eta=config.eta,
            workers=config.workers,
        )

        if config.cert_out is not None:
            with open(config.cert_out, "w") as handle:
                handle.write(dumps(cert))
            logger.info("certificate written to %s", config.cert_out)

        return CommandResult(
            {
                "gate": cert.gate.selector,
                "delta": cert.delta,
                "bound": cert.bound,
                "cells": len(cert.pieces),
                "grid": cert.grid,
                "k_max": cert.k_max,
            }
        )
