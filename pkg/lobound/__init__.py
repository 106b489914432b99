from lobound.certificate import (
    CertificateFamily,
    ClosedFormPiece,
    ConstantPiece,
    VerificationReport,
    bound,
    build_dual_solution,
    find_certificate,
    ns_certificate,
    phase_bound,
    point_bound,
    verify,
    w_ratio,
)
from lobound.config import RunConfig
from lobound.exceptions import (
    ConvergenceError,
    InfeasibleError,
    InputError,
    LoboundError,
    SerializationError,
    SolverError,
    StructuralError,
    UnverifiedCertificateError,
)
from lobound.fock import (
    BeamSplitter,
    GateSpec,
    f_coeff,
    g_closed,
    g_general,
    g_table,
    gate_custom,
    gate_ns,
    gate_phase,
    gate_sign,
    parse_gate,
)
from lobound.linalg import (
    SymMatrix,
    complement_projector,
    eigenvalues_symmetric,
    is_psd,
    min_eigenvalue,
    project_complement,
)
from lobound.primal import (
    ConstraintSystem,
    NetworkPoint,
    SearchResult,
    build_constraints,
    convex_point,
    inner_max,
    input_state,
    optimal_point,
    outer_search,
    random_eps,
    simulate_gate,
    success_probability,
    sweep_n,
)
from lobound.sdp import (
    DualSolution,
    SdpProblem,
    assemble,
    check_dual_feasible,
    check_primal_feasible,
    embed_primal,
    validate_structure,
    weak_duality_gap,
)

from . import _version

__all__ = [
    "BeamSplitter",
    "GateSpec",
    "gate_ns",
    "gate_phase",
    "gate_sign",
    "gate_custom",
    "parse_gate",
    "g_closed",
    "g_general",
    "g_table",
    "f_coeff",
    "SymMatrix",
    "eigenvalues_symmetric",
    "min_eigenvalue",
    "is_psd",
    "project_complement",
    "complement_projector",
    "NetworkPoint",
    "ConstraintSystem",
    "SearchResult",
    "build_constraints",
    "inner_max",
    "success_probability",
    "optimal_point",
    "convex_point",
    "outer_search",
    "sweep_n",
    "random_eps",
    "input_state",
    "simulate_gate",
    "SdpProblem",
    "DualSolution",
    "assemble",
    "embed_primal",
    "check_primal_feasible",
    "check_dual_feasible",
    "validate_structure",
    "weak_duality_gap",
    "CertificateFamily",
    "ClosedFormPiece",
    "ConstantPiece",
    "VerificationReport",
    "ns_certificate",
    "w_ratio",
    "verify",
    "bound",
    "phase_bound",
    "find_certificate",
    "build_dual_solution",
    "point_bound",
    "RunConfig",
    "LoboundError",
    "InputError",
    "ConvergenceError",
    "StructuralError",
    "InfeasibleError",
    "UnverifiedCertificateError",
    "SolverError",
    "SerializationError",
]

__version__ = _version.get_versions()["version"]
