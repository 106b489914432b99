import math

import numpy as np

from lobound.commands import Command, CommandResult
from lobound.config import RunConfig
from lobound.exceptions import InputError
from lobound.primal import SearchResult, input_state, outer_search, simulate_gate, sweep_n


class OptimizeCommand(Command):
    """
    Seeded multi-start search at ``--n``, or at every auxiliary cutoff
    ``n = N..n_max`` with ``--n-max``
    """

    name = "optimize"
    help = "best network found by seeded multi-start search"

    def add_arguments(self, parser):
        parser.add_argument(
            "--n-max", dest="n_max", type=int, help="search every auxiliary cutoff up to this one"
        )

    def execute(self, config: RunConfig) -> CommandResult:
        if config.n_max is None:
            result = outer_search(
                config.gate_spec,
                config.n,
                restarts=config.restarts,
                seed=config.seed,
                workers=config.workers,
            )

            exit_code = 0 if result.point is not None else 1

            return CommandResult(_search_payload(result), exit_code=exit_code)
        results = sweep_n(
            config.gate_spec,
            config.n_max,
            restarts=config.restarts,
            seed=config.seed,
            workers=config.workers,
        )
        found = [result for result in results if result.point is not None]
        best = max(found, key=lambda result: result.probability, default=None)
        payload = {
            "n_max": config.n_max,
            "per_n": [_search_payload(result) for result in results],
            "best_n": best.n if best is not None else None,
            "probability": best.probability if best is not None else None,
        }

        return CommandResult(payload, exit_code=0 if found else 1)


def _search_payload(result: SearchResult) -> dict:
    payload = result.as_dict()
    payload["restart_probabilities"] = [outcome.probability for outcome in result.outcomes]

    return payload


def parse_amplitudes(text: str) -> np.ndarray:
    """
    Comma separated amplitudes; complex values use Python syntax (``0.5+0.5j``)
    """

    try:
        return np.array([complex(item.strip()) for item in text.split(",")])
    except ValueError:
        raise InputError(f"malformed amplitude list: {text!r}")


class SimulateCommand(Command):
    """
    Searches a network for the gate and runs one input state through it
    """

    name = "simulate"
    help = "run an input state through the best network found for a gate"

    def add_arguments(self, parser):
        parser.add_argument(
            "--input",
            help="input amplitudes y0,...,yN (default: uniform superposition)",
        )

    def execute(self, config: RunConfig) -> CommandResult:
        gate = config.gate_spec

        if config.input is None:
            y = np.full(gate.cutoff + 1, 1.0 / math.sqrt(gate.cutoff + 1), dtype=complex)
        else:
            y = input_state(gate, parse_amplitudes(config.input))
        result = outer_search(
            gate, config.n, restarts=config.restarts, seed=config.seed, workers=config.workers
        )

        if result.point is None:
            return CommandResult({"search": result.as_dict(), "simulation": None}, exit_code=1)
        simulation = simulate_gate(result.point, gate, y)

        return CommandResult(
            {
                "input": [[float(v.real), float(v.imag)] for v in y],
                "search": result.as_dict(),
                "simulation": simulation.as_dict(),
            }
        )
