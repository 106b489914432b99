"""
Network model: a central beam splitter between the input mode and a
distinguished auxiliary mode prepared in ``sum_k x_{k+1} |k> |omega_k>``,
followed by postselection with overlaps ``eps_{k+1}``.

The inner weight problem at fixed ``(t, phi, eps)`` is solved in closed form
by projection, the outer problem by seeded multi-start Nelder-Mead.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import linprog, minimize

from lobound.exceptions import InputError, SolverError
from lobound.fock import BeamSplitter, GateSpec, g_table, gate_ns
from lobound.linalg import DEFAULT_ORTHO_TOL, project_complement
from lobound.utils import (
    TWO_PI,
    as_complex_vector,
    as_real_vector,
    normalize_angle,
    parallel_map,
    unit_phase,
)

logger = logging.getLogger(__name__)

#: tolerance on the normalization of the auxiliary overlaps
NORM_TOL = 1e-12
#: sides of the polygon approximating complex moduli in the convex inner program
POLYGON_SIDES = 32


@dataclass(frozen=True, eq=False)
class NetworkPoint:
    """
    One decomposed network: beam splitter, auxiliary overlaps ``eps``
    (``n + 1`` complex numbers) and preparation weights ``x`` (``n + 1`` reals).
    """

    bs: BeamSplitter
    eps: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        eps = as_complex_vector(self.eps, "eps")
        x = as_real_vector(self.x, "x")

        if eps.shape[0] < 1:
            raise InputError("eps must have at least one entry")

        if x.shape != eps.shape:
            raise InputError(f"x has {x.shape[0]} entries, eps has {eps.shape[0]}")
        check_normalized(eps)

        if float(x @ x) > 1.0 + NORM_TOL:
            raise InputError(f"weights must satisfy |x|^2 <= 1, got {float(x @ x)!r}")
        eps.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.eps.shape[0] - 1

    @property
    def alpha(self) -> np.ndarray:
        return self.eps.real

    @property
    def beta(self) -> np.ndarray:
        return self.eps.imag

    def as_dict(self) -> dict:
        return {
            "t": self.bs.t,
            "phi": self.bs.phi,
            "n": self.n,
            "eps": [[float(e.real), float(e.imag)] for e in self.eps],
            "x": [float(v) for v in self.x],
        }


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """
    Real vectors ``c^(j)`` and ``d^(j)`` (rows of ``c`` and ``d``, ``j = 0..N``)
    such that a network realizes the gate iff ``(c^(j) - c^(0)) . x = 0`` and
    ``d^(j) . x = 0``; its success amplitude is then ``c^(0) . x``.
    """

    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        if self.c.ndim != 2 or self.c.shape != self.d.shape:
            raise InputError("c and d must be matrices of identical shape")

    @property
    def cutoff(self) -> int:
        return self.c.shape[0] - 1

    @property
    def size(self) -> int:
        return self.c.shape[1]

    def equality_rows(self) -> List[np.ndarray]:
        return [self.c[j] - self.c[0] for j in range(1, self.cutoff + 1)] + list(self.d)

    def residuals(self, x) -> np.ndarray:
        """
        Gate equation residuals ``(c^(j) - c^(0)) . x`` followed by ``d^(j) . x``
        """

        x = np.asarray(x, dtype=float)

        return np.array([row @ x for row in self.equality_rows()])


class InnerSolution(NamedTuple):
    amplitude: float
    x: np.ndarray


def check_normalized(eps: np.ndarray):
    norm = float(np.sum(np.abs(eps) ** 2))

    if abs(norm - 1.0) > NORM_TOL:
        raise InputError(f"eps must be normalized, sum |eps_k|^2 = {norm!r}")


def build_constraints(gate: GateSpec, bs: BeamSplitter, eps) -> ConstraintSystem:
    eps = as_complex_vector(eps, "eps")
    check_normalized(eps)
    alpha, beta = eps.real, eps.imag
    ks = np.arange(eps.shape[0])
    c = np.empty((gate.cutoff + 1, ks.size))
    d = np.empty_like(c)

    for j in range(gate.cutoff + 1):
        xi, zeta = unit_phase(j * bs.phi - gate.phase(j))
        g = g_table(j, ks, bs.t)
        c[j] = (alpha * xi - beta * zeta) * g
        d[j] = (beta * xi + alpha * zeta) * g

    return ConstraintSystem(c, d)


def inner_max(cs: ConstraintSystem, tol: float = DEFAULT_ORTHO_TOL) -> InnerSolution:
    """
    Maximizes ``c^(0) . x`` over ``|x| <= 1`` subject to the gate equations.
    The maximum is ``|P c^(0)|`` with ``P`` the projector onto the orthogonal
    complement of the equation rows, attained at ``x = P c^(0) / |P c^(0)|``.
    """

    projected = project_complement(cs.c[0], cs.equality_rows(), tol)
    norm = float(np.linalg.norm(projected))

    if norm <= tol:
        return InnerSolution(0.0, np.zeros(cs.size))

    return InnerSolution(norm, projected / norm)


def success_probability(gate: GateSpec, bs: BeamSplitter, eps) -> float:
    return inner_max(build_constraints(gate, bs, eps)).amplitude ** 2


def point_probability(point: NetworkPoint, gate: GateSpec) -> float:
    return success_probability(gate, point.bs, point.eps)


def optimal_point(gate: GateSpec, bs: BeamSplitter, eps) -> Tuple[NetworkPoint, float]:
    """
    The network with the given ``(t, phi, eps)`` and optimal weights,
    together with its success probability
    """

    solution = inner_max(build_constraints(gate, bs, eps))

    return NetworkPoint(bs, eps, solution.x), solution.amplitude ** 2


def random_eps(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    """
    Random normalized overlaps ``eps_1..eps_{n+1}`` drawn uniformly from the
    unit sphere of ``C^(n+1)``, or of ``R^(n+1)`` with ``real``
    """

    if n < 0:
        raise InputError(f"n must be >= 0, got {n}")
    v = rng.standard_normal((1 if real else 2) * (n + 1))
    v /= np.linalg.norm(v)
    eps = v.astype(complex) if real else v[: n + 1] + 1j * v[n + 1 :]

    # remove the rounding residue of the normalization
    return eps / math.sqrt(float(np.sum(np.abs(eps) ** 2)))


def convex_point(
    gate: GateSpec, bs: BeamSplitter, n: int, sides: int = POLYGON_SIDES
) -> Optional[Tuple[NetworkPoint, float]]:
    """
    Best network for fixed ``(t, phi)`` and auxiliary cutoff ``n``.

    In the products ``y_k = x_k eps_k`` the gate equations are linear,
    ``sum_k y_k g^(j)_k = a e^{i(phi_j - j phi)}``, and the weights only enter
    through ``sum_k |y_k| <= 1``. The modulus of each ``y_k`` is bounded by an
    inscribed ``sides``-gon with a vertex on the real axis, which makes the
    program a linear one. It is exact whenever the optimum is real; otherwise
    the amplitude found is at least ``cos(pi / sides)`` times the optimum.

    Returns the rebuilt network with its probability re-evaluated in closed
    form, or ``None`` when only the trivial solution exists.
    """

    if n < 0:
        raise InputError(f"n must be >= 0, got {n}")

    if sides < 4 or sides % 2:
        raise InputError(f"polygon needs an even number of sides >= 4, got {sides}")
    size = n + 1
    rows = gate.cutoff + 1
    ks = np.arange(size)
    g = np.vstack([g_table(j, ks, bs.t) for j in range(rows)])
    targets = np.array([unit_phase(gate.phase(j) - j * bs.phi) for j in range(rows)])
    columns = 3 * size + 1

    a_eq = np.zeros((2 * rows, columns))
    a_eq[:rows, :size] = g
    a_eq[rows:, size : 2 * size] = g
    a_eq[:rows, -1] = -targets[:, 0]
    a_eq[rows:, -1] = -targets[:, 1]

    normals = (2 * np.arange(sides) + 1) * math.pi / sides
    a_ub = np.zeros((size * sides + 1, columns))

    for k in range(size):
        block = slice(k * sides, (k + 1) * sides)
        a_ub[block, k] = np.cos(normals)
        a_ub[block, size + k] = np.sin(normals)
        a_ub[block, 2 * size + k] = -math.cos(math.pi / sides)
    a_ub[-1, 2 * size : 3 * size] = 1.0
    b_ub = np.zeros(size * sides + 1)
    b_ub[-1] = 1.0

    objective = np.zeros(columns)
    objective[-1] = -1.0
    bounds = [(None, None)] * (2 * size) + [(0, None)] * (size + 1)
    result = linprog(
        objective,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=np.zeros(2 * rows),
        bounds=bounds,
        method="highs",
    )

    if result.status != 0:
        raise SolverError(f"inner program failed: {result.message}")
    y = result.x[:size] + 1j * result.x[size : 2 * size]
    moduli = np.abs(y)
    total = float(moduli.sum())

    if result.x[-1] <= DEFAULT_ORTHO_TOL or total <= DEFAULT_ORTHO_TOL:
        return None
    eps = np.zeros(size, dtype=complex)
    support = moduli > 0
    eps[support] = y[support] / np.sqrt(moduli[support] * total)
    eps /= math.sqrt(float(np.sum(np.abs(eps) ** 2)))

    return optimal_point(gate, bs, eps)


@dataclass(frozen=True)
class RestartOutcome:
    index: int
    probability: float
    evaluations: int
    max_evaluated: float
    point: Optional[NetworkPoint] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class SearchResult:
    """
    Outcome of :func:`outer_search`. ``probability`` is the closed form value
    at ``point``; ``max_evaluated`` is the largest value seen at any
    evaluated network.
    """

    gate: GateSpec
    n: int
    seed: int
    point: Optional[NetworkPoint]
    probability: float
    restarts: int
    failed: int
    evaluations: int
    max_evaluated: float
    best_restart: int
    outcomes: Tuple[RestartOutcome, ...] = field(repr=False, default=())

    def as_dict(self) -> dict:
        return {
            "gate": self.gate.selector,
            "n": self.n,
            "seed": self.seed,
            "probability": self.probability,
            "restarts": self.restarts,
            "failed": self.failed,
            "evaluations": self.evaluations,
            "max_evaluated": self.max_evaluated,
            "best_restart": self.best_restart,
            "point": self.point.as_dict() if self.point is not None else None,
        }


@dataclass(frozen=True)
class _RestartTask:
    index: int
    gate: GateSpec
    n: int
    seed_sequence: np.random.SeedSequence
    max_iter: int
    xatol: float
    fatol: float


def _network_at(gate: GateSpec, n: int, params: np.ndarray):
    bs = BeamSplitter(math.cos(params[0]), normalize_angle(params[1]))

    return convex_point(gate, bs, n)


def _run_restart(task: _RestartTask) -> RestartOutcome:
    rng = np.random.default_rng(task.seed_sequence)
    start = np.array([rng.uniform(0.0, math.pi), rng.uniform(0.0, TWO_PI)])
    best: List = [0.0, None]
    evaluations = 0

    def objective(params):
        nonlocal evaluations
        evaluations += 1
        found = _network_at(task.gate, task.n, params)

        if found is None:
            return 0.0
        point, probability = found

        if probability > best[0]:
            best[0], best[1] = probability, point

        return -probability

    try:
        result = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"xatol": task.xatol, "fatol": task.fatol, "maxiter": task.max_iter},
        )
        found = _network_at(task.gate, task.n, result.x)
    except Exception as exc:
        return RestartOutcome(task.index, 0.0, evaluations, best[0], error=str(exc))

    if found is None:
        return RestartOutcome(task.index, 0.0, evaluations, best[0])
    point, probability = found

    return RestartOutcome(task.index, probability, evaluations, max(best[0], probability), point)


def outer_search(
    gate: GateSpec,
    n: int,
    restarts: int = 20,
    seed: int = 0,
    workers: int = 1,
    max_iter: int = 2000,
    xatol: float = 1e-10,
    fatol: float = 1e-14,
) -> SearchResult:
    """
    Global search over networks with auxiliary cutoff ``n``.

    Every restart starts Nelder-Mead from a seeded uniform draw of
    ``(arccos t, phi)``; ``eps`` and ``x`` are eliminated by
    :func:`convex_point`. The best restart wins, ties going to the lowest
    restart index. Restarts that raise are counted and skipped.
    """

    if n < 0:
        raise InputError(f"n must be >= 0, got {n}")

    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")
    children = np.random.SeedSequence(seed).spawn(restarts)
    tasks = [
        _RestartTask(index, gate, n, child, max_iter, xatol, fatol)
        for index, child in enumerate(children)
    ]
    logger.info("searching %s with n=%d over %d restarts", gate, n, restarts)
    outcomes = parallel_map(_run_restart, tasks, workers)

    best: Optional[RestartOutcome] = None
    failed = 0

    for outcome in outcomes:
        if outcome.failed:
            failed += 1
            warnings.warn(f"restart {outcome.index} failed: {outcome.error}")
            continue

        if best is None or outcome.probability > best.probability:
            best = outcome
    logger.info(
        "search finished: p=%.12g, %d/%d restarts failed",
        best.probability if best else 0.0,
        failed,
        restarts,
    )

    return SearchResult(
        gate=gate,
        n=n,
        seed=seed,
        point=best.point if best else None,
        probability=best.probability if best else 0.0,
        restarts=restarts,
        failed=failed,
        evaluations=sum(outcome.evaluations for outcome in outcomes),
        max_evaluated=max(outcome.max_evaluated for outcome in outcomes),
        best_restart=best.index if best else -1,
        outcomes=tuple(outcomes),
    )


def sweep_n(
    gate: GateSpec, n_max: int, restarts: int = 20, seed: int = 0, workers: int = 1
) -> List[SearchResult]:
    """
    Best networks for every auxiliary cutoff ``n = N..n_max``
    """

    if n_max < 0:
        raise InputError(f"n must be >= 0, got {n_max}")

    return [
        outer_search(gate, n, restarts=restarts, seed=seed, workers=workers)
        for n in range(min(gate.cutoff, n_max), n_max + 1)
    ]


def ns_reference_point() -> NetworkPoint:
    """
    Network realizing the non-linear sign shift with probability 1/4:
    ``t = 1 - sqrt(2)``, ``phi = 0`` and a single photon distinguished mode
    """

    found = convex_point(gate_ns(), BeamSplitter(1.0 - math.sqrt(2.0), 0.0), 2)

    return found[0]


@dataclass(frozen=True)
class SimulationResult:
    output: np.ndarray
    probability: float
    fidelity: float

    def as_dict(self) -> dict:
        return {
            "output": [[float(v.real), float(v.imag)] for v in self.output],
            "probability": self.probability,
            "fidelity": self.fidelity,
        }


def input_state(gate: GateSpec, y) -> np.ndarray:
    """
    Validates a normalized input ``y_0..y_N`` for ``gate``
    """

    y = as_complex_vector(y, "input")

    if y.shape[0] != gate.cutoff + 1:
        raise InputError(f"expected {gate.cutoff + 1} input amplitudes, got {y.shape[0]}")

    if abs(float(np.sum(np.abs(y) ** 2)) - 1.0) > 1e-9:
        raise InputError("input amplitudes must be normalized")

    return y


def simulate_gate(point: NetworkPoint, gate: GateSpec, y) -> SimulationResult:
    """
    Runs the input ``y_0..y_N`` through the network and compares the
    postselected output to the ideal gate action.
    """

    y = input_state(gate, y)
    ks = np.arange(point.n + 1)
    weights = point.x * point.eps
    factors = np.array(
        [
            complex(*unit_phase(point.bs.phi * j)) * (g_table(j, ks, point.bs.t) @ weights)
            for j in range(gate.cutoff + 1)
        ]
    )
    output = y * factors
    probability = float(np.sum(np.abs(output) ** 2))

    if probability == 0.0:
        return SimulationResult(output, 0.0, 0.0)
    overlap = np.vdot(gate.target(y), output)
    fidelity = float(abs(overlap) ** 2 / probability)

    return SimulationResult(output, probability, fidelity)
