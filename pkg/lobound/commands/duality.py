import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from lobound.certificate import CertificateFamily, build_dual_solution, find_certificate
from lobound.commands import Command, CommandResult, stored_certificate
from lobound.config import RunConfig
from lobound.exceptions import InfeasibleError
from lobound.fock import BeamSplitter, GateSpec
from lobound.primal import convex_point, optimal_point, random_eps
from lobound.sdp import assemble, embed_primal, weak_duality_gap
from lobound.utils import parallel_map

logger = logging.getLogger(__name__)

#: most negative gap accepted as rounding
GAP_TOL = 1e-9


@dataclass(frozen=True)
class _DrawTask:
    index: int
    gate: GateSpec
    cert: CertificateFamily
    n_max: int
    seed_sequence: np.random.SeedSequence


class DrawOutcome(NamedTuple):
    index: int
    n: int
    gap: float
    symmetric_gap: float
    primal_probability: float
    bound: float
    error: Optional[str]


def check_draw(task: _DrawTask) -> DrawOutcome:
    """
    Compares one network with the certificate dual at the same
    ``(t, eps)`` and ``phi = 0``, where the certificate dual is feasible.
    For a gate with phases other than 0 and pi the overlaps are drawn real.
    Half of the draws use a random ``eps`` (usually an infeasible gate,
    probability 0); the others the best ``eps`` for the drawn beam splitter.
    """

    rng = np.random.default_rng(task.seed_sequence)
    n = int(rng.integers(0, task.n_max + 1))
    bs = BeamSplitter(rng.uniform(-1.0, 1.0), 0.0)
    found = None

    if rng.random() < 0.5 and task.gate.real:
        found = convex_point(task.gate, bs, n)

    if found is not None:
        point, _ = found
        eps = point.eps
    else:
        eps = random_eps(rng, n, real=not task.gate.real)
        point, _ = optimal_point(task.gate, bs, eps)
    sol, gamma = build_dual_solution(task.cert, task.gate, bs, eps)
    problem = assemble(task.gate, bs, eps, gamma)

    try:
        report = weak_duality_gap(embed_primal(point, problem), sol, problem)
    except InfeasibleError as exc:
        return DrawOutcome(task.index, n, math.nan, math.nan, math.nan, math.nan, str(exc))

    return DrawOutcome(
        task.index,
        n,
        report.gap,
        report.symmetric_gap,
        report.primal_probability,
        report.bound,
        None,
    )


class DualityCheckCommand(Command):
    """
    Weak duality on seeded random draws at ``phi = 0``: every network
    against the dual point built from the gate's certificate.
    """

    name = "duality-check"
    help = "weak duality between random networks and certificate duals"

    def add_arguments(self, parser):
        parser.add_argument("--cert", help="certificate table to build the dual points from")

    def execute(self, config: RunConfig) -> CommandResult:
        gate = config.gate_spec
        cert = stored_certificate(config, gate)

        if cert is None:
            cert = find_certificate(
                gate,
                config.grid,
                config.kmax,
                tol=config.tol,
                eta=config.eta,
                workers=config.workers,
            )
        children = np.random.SeedSequence(config.seed).spawn(config.draws)
        tasks = [
            _DrawTask(index, gate, cert, config.n, child) for index, child in enumerate(children)
        ]
        outcomes: List[DrawOutcome] = parallel_map(check_draw, tasks, config.workers)
        failed = [outcome for outcome in outcomes if outcome.error is not None]
        checked = [outcome for outcome in outcomes if outcome.error is None]

        for outcome in failed:
            logger.error("draw %d infeasible: %s", outcome.index, outcome.error)
        violations = [outcome.index for outcome in checked if outcome.gap < -GAP_TOL]
        payload = {
            "gate": gate.selector,
            "delta": cert.delta,
            "phi": 0.0,
            "real_eps": not gate.real,
            "draws": len(outcomes),
            "infeasible": [outcome.index for outcome in failed],
            "violations": violations,
            "min_gap": min((o.gap for o in checked), default=None),
            "min_symmetric_gap": min((o.symmetric_gap for o in checked), default=None),
            "max_primal_probability": max(
                (o.primal_probability for o in checked), default=None
            ),
            "max_point_bound": max((o.bound for o in checked), default=None),
        }
        logger.info(
            "duality check of %s: %d draws, %d violations, %d infeasible",
            gate,
            len(outcomes),
            len(violations),
            len(failed),
        )

        return CommandResult(payload, exit_code=1 if violations or failed else 0)
