"""
Semidefinite relaxation of the network problem and its Lagrange dual.

Indices below are zero based: row/column 0 carries the objective entry
``Z_00``, row/column 1 is the border row holding ``x`` and rows 2..n+2
form the unit-diagonal block of the relaxed ``x x^T``.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from lobound.exceptions import InfeasibleError, InputError, StructuralError
from lobound.fock import BeamSplitter, GateSpec
from lobound.linalg import DEFAULT_EIGEN_TOL, SymMatrix, eigenvalues_symmetric
from lobound.primal import ConstraintSystem, NetworkPoint, build_constraints

logger = logging.getLogger(__name__)

PRIMAL_TOL = 1e-9
DUAL_TOL = 1e-8


def bordered(dim: int, vector) -> np.ndarray:
    """
    ``dim x dim`` matrix with ``vector`` in row 1 and column 1 from index 2 on
    """

    vector = np.asarray(vector, dtype=float)

    if vector.shape != (dim - 2,):
        raise InputError(f"border vector must have {dim - 2} entries, got {vector.shape}")
    m = np.zeros((dim, dim))
    m[1, 2:] = vector
    m[2:, 1] = vector

    return m


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """
    ``F0``, the gate matrices ``F_1..F_{2N+1}`` and ``G`` (stored last in
    :attr:`F`) for one ``(gate, t, phi, eps)``.
    """

    gate: GateSpec
    bs: BeamSplitter
    eps: np.ndarray
    gamma: float
    constraints: ConstraintSystem
    F0: SymMatrix
    F: Tuple[SymMatrix, ...]

    @property
    def dim(self) -> int:
        return self.F0.dim

    @property
    def n(self) -> int:
        return self.dim - 3

    @property
    def G(self) -> SymMatrix:
        return self.F[-1]

    @property
    def gate_matrices(self) -> Tuple[SymMatrix, ...]:
        return self.F[:-1]

    def labels(self) -> List[str]:
        return [f"F{index}" for index in range(1, len(self.F))] + ["G"]

    def dumps(self) -> str:
        """
        Plain-text dump of all matrices, row major with ``repr`` floats
        """

        lines = [
            "# lobound sdp",
            f"# gate={self.gate.selector} n={self.n} dim={self.dim} gamma={self.gamma!r} "
            f"t={self.bs.t!r} phi={self.bs.phi!r}",
        ]

        for label, matrix in [("F0", self.F0)] + list(zip(self.labels(), self.F)):
            lines.append(f"# matrix {label} dim={matrix.dim}")

            for row in matrix.entries:
                lines.append(" ".join(repr(float(value)) for value in row))

        return "\n".join(lines) + "\n"


def loads_matrices(text: str) -> Dict[str, SymMatrix]:
    """
    Parses the matrices written by :meth:`SdpProblem.dumps`
    """

    matrices: Dict[str, SymMatrix] = {}
    lines = [line for line in text.splitlines() if line.strip()]
    position = 0

    while position < len(lines):
        line = lines[position]
        position += 1

        if not line.startswith("# matrix "):
            continue
        label, size = line[len("# matrix ") :].split()
        dim = int(size.partition("=")[2])
        rows = [[float(value) for value in row.split()] for row in lines[position : position + dim]]
        position += dim
        matrices[label] = SymMatrix(rows)

    return matrices


def assemble(gate: GateSpec, bs: BeamSplitter, eps, gamma: float = 1.0) -> SdpProblem:
    if not gamma >= 1.0:
        raise InputError(f"gamma must be >= 1, got {gamma!r}")
    constraints = build_constraints(gate, bs, eps)
    dim = constraints.size + 2
    c0 = constraints.c[0]
    f0 = np.zeros((dim, dim))
    f0[0, 0] = 1.0
    matrices = [SymMatrix(bordered(dim, constraints.c[j] - c0)) for j in range(1, gate.cutoff + 1)]
    matrices += [SymMatrix(bordered(dim, row)) for row in constraints.d]
    g = bordered(dim, -0.5 * gamma * c0)
    g[0, 0] = 1.0
    matrices.append(SymMatrix(g))

    return SdpProblem(
        gate=gate,
        bs=bs,
        eps=np.asarray(eps, dtype=complex),
        gamma=float(gamma),
        constraints=constraints,
        F0=SymMatrix(f0),
        F=tuple(matrices),
    )


@dataclass(frozen=True)
class PrimalReport:
    """
    Largest absolute residual per constraint group of the relaxation and
    the smallest eigenvalue of ``Z``
    """

    residuals: Dict[str, float]
    min_eigenvalue: Optional[float]
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def feasible(self) -> bool:
        return (
            self.max_residual <= self.tol
            and self.min_eigenvalue is not None
            and self.min_eigenvalue >= -self.tol
        )

    def as_dict(self) -> dict:
        return {
            "residuals": dict(self.residuals),
            "max_residual": self.max_residual,
            "min_eigenvalue": self.min_eigenvalue,
            "tol": self.tol,
            "feasible": self.feasible,
        }


def embed_primal(point: NetworkPoint, problem: SdpProblem, tol: float = PRIMAL_TOL) -> SymMatrix:
    """
    Lifts a network to the relaxation: ``Z_00 = gamma c^(0) . x``, ``x`` in the
    border row and the identity on the remaining block. The sign of ``x``
    is chosen so that ``c^(0) . x >= 0``.

    :raises InfeasibleError: when the weights violate the gate equations
    """

    if point.n != problem.n:
        raise InputError(f"point has n={point.n}, problem has n={problem.n}")
    x = np.array(point.x, dtype=float)
    residuals = problem.constraints.residuals(x)
    worst = float(np.max(np.abs(residuals))) if residuals.size else 0.0

    if worst > tol:
        raise InfeasibleError(
            f"point violates the gate equations (max residual {worst:.3e})",
            PrimalReport({"gate": worst}, None, tol),
        )
    amplitude = float(problem.constraints.c[0] @ x)

    if amplitude < 0:
        x, amplitude = -x, -amplitude
    z = np.zeros((problem.dim, problem.dim))
    z[0, 0] = problem.gamma * amplitude
    z[1, 1] = 1.0
    z[1, 2:] = x
    z[2:, 1] = x
    z[2:, 2:] = np.eye(problem.n + 1)

    return SymMatrix(z)


def _check_dim(matrix: SymMatrix, problem: SdpProblem, name: str):
    if not isinstance(matrix, SymMatrix):
        raise InputError(f"{name} must be a SymMatrix")

    if matrix.dim != problem.dim:
        raise InputError(f"{name} has dimension {matrix.dim}, expected {problem.dim}")


def check_primal_feasible(
    Z: SymMatrix, problem: SdpProblem, tol: float = PRIMAL_TOL
) -> PrimalReport:
    _check_dim(Z, problem, "Z")
    entries = Z.entries
    block = entries[2:, 2:]
    hollow = block - np.diag(np.diag(block))
    residuals = {
        "diagonal": float(np.max(np.abs(np.diag(entries)[1:] - 1.0))),
        "hollow": float(np.max(np.abs(2.0 * hollow))) if hollow.size else 0.0,
        "first_row": float(np.max(np.abs(entries[0, 1:]))),
        "gate": max((abs(f.inner(Z)) for f in problem.gate_matrices), default=0.0),
        "objective": abs(problem.G.inner(Z)),
    }
    min_eigenvalue = eigenvalues_symmetric(Z, min(DEFAULT_EIGEN_TOL, tol))[0]

    return PrimalReport(residuals, min_eigenvalue, tol)


@dataclass(frozen=True, eq=False)
class DualSolution:
    """
    Dual variables: ``z`` (``n + 2`` entries pairing with diagonal entries
    1..n+2), multipliers ``v_1..v_{2N+2}`` and ``V = 0_{2,2} (+) W`` with
    ``W`` hollow.
    """

    z: np.ndarray
    v: np.ndarray
    V: SymMatrix

    @classmethod
    def from_hollow(cls, z, v, W) -> "DualSolution":
        W = np.asarray(W, dtype=float)
        dim = W.shape[0] + 2
        V = np.zeros((dim, dim))
        V[2:, 2:] = W

        return cls(np.asarray(z, dtype=float), np.asarray(v, dtype=float), SymMatrix(V))

    @property
    def W(self) -> np.ndarray:
        return self.V.entries[2:, 2:]

    @property
    def objective(self) -> float:
        """``q^T z`` with ``q = (1, ..., 1)``"""

        return float(np.sum(self.z))


def validate_structure(sol: DualSolution, problem: SdpProblem):
    if sol.z.shape != (problem.n + 2,):
        raise InputError(f"z must have {problem.n + 2} entries, got {sol.z.shape}")

    if sol.v.shape != (len(problem.F),):
        raise InputError(f"v must have {len(problem.F)} entries, got {sol.v.shape}")
    _check_dim(sol.V, problem, "V")
    V = sol.V.entries

    if np.any(V[:2, :] != 0.0):
        raise StructuralError("V must vanish on its first two rows and columns")

    if np.any(np.diag(sol.W) != 0.0):
        raise StructuralError("W must be hollow (zero diagonal)")


def dual_matrix(sol: DualSolution, problem: SdpProblem) -> SymMatrix:
    """
    ``F0 + diag(0, z) + sum_a v_a F_a + V + v_{2N+2} G``
    """

    validate_structure(sol, problem)
    s = np.array(problem.F0.entries) + np.diag(np.concatenate(([0.0], sol.z)))

    for weight, matrix in zip(sol.v, problem.F):
        s += weight * matrix.entries
    s += sol.V.entries

    return SymMatrix(s, symmetrize=True)


@dataclass(frozen=True)
class DualReport:
    min_eigenvalue: float
    objective: float
    tol: float

    @property
    def feasible(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    def as_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "objective": self.objective,
            "tol": self.tol,
            "feasible": self.feasible,
        }


def check_dual_feasible(
    sol: DualSolution, problem: SdpProblem, tol: float = DUAL_TOL
) -> DualReport:
    """
    :raises StructuralError: when ``V`` is not of the form ``0_{2,2} (+) W`` with
     hollow ``W``; a PSD failure is reported, not raised.
    """

    matrix = dual_matrix(sol, problem)
    min_eigenvalue = eigenvalues_symmetric(matrix, min(DEFAULT_EIGEN_TOL, tol))[0]

    return DualReport(min_eigenvalue, sol.objective, tol)


@dataclass(frozen=True)
class DualityReport:
    """
    ``gap`` is ``q^T z + tr[F0 Z]`` (dual minus primal objective);
    ``symmetric_gap`` is ``q^T z - |Z_00|``, the comparison that bounds the
    amplitude. ``bound`` is ``(q^T z)^2 / gamma^2``.
    """

    gap: float
    symmetric_gap: float
    dual_objective: float
    primal_objective: float
    bound: float
    primal_probability: float
    primal: PrimalReport = field(repr=False)
    dual: DualReport = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "gap": self.gap,
            "symmetric_gap": self.symmetric_gap,
            "dual_objective": self.dual_objective,
            "primal_objective": self.primal_objective,
            "bound": self.bound,
            "primal_probability": self.primal_probability,
            "primal": self.primal.as_dict(),
            "dual": self.dual.as_dict(),
        }


def weak_duality_gap(
    Z: SymMatrix,
    sol: DualSolution,
    problem: SdpProblem,
    primal_tol: float = PRIMAL_TOL,
    dual_tol: float = DUAL_TOL,
) -> DualityReport:
    """
    :raises InfeasibleError: when either point is infeasible; the failing
     report is attached
    """

    primal = check_primal_feasible(Z, problem, primal_tol)

    if not primal.feasible:
        raise InfeasibleError("primal point is infeasible", primal)
    dual = check_dual_feasible(sol, problem, dual_tol)

    if not dual.feasible:
        raise InfeasibleError("dual point is infeasible", dual)
    primal_objective = -problem.F0.inner(Z)
    z00 = float(Z.entries[0, 0])
    report = DualityReport(
        gap=dual.objective - primal_objective,
        symmetric_gap=dual.objective - abs(z00),
        dual_objective=dual.objective,
        primal_objective=primal_objective,
        bound=(dual.objective / problem.gamma) ** 2,
        primal_probability=(z00 / problem.gamma) ** 2,
        primal=primal,
        dual=dual,
    )
    logger.debug("weak duality: %s", report)

    return report
