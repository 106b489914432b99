"""
Dual certificates: functions ``s_1..s_N`` of the transmittivity and a radius
``delta`` such that for every ``t`` and every Fock level ``k``

.. math::

    |w_k(t)| = \\Big| \\big(-\\tfrac12 + \\sum_j s_j\\big) g^{(0)}_k
    - \\sum_j \\cos(\\phi_j) s_j g^{(j)}_k \\Big| \\le \\delta,

which bounds the success probability of the gate by ``4 delta**2``.
"""
import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from lobound.exceptions import (
    InfeasibleError,
    InputError,
    SerializationError,
    SolverError,
    UnverifiedCertificateError,
)
from lobound.fock import BeamSplitter, GateSpec, g_general, g_table, gate_ns, parse_gate
from lobound.primal import build_constraints
from lobound.sdp import DualSolution, assemble, check_dual_feasible
from lobound.utils import normalize_angle, parallel_map, unit_phase

logger = logging.getLogger(__name__)

DEFAULT_T_POINTS = 4001
DEFAULT_K_MAX = 1000
DEFAULT_TOL = 1e-10
#: half width of the bands next to t = +-1 that are sampled densely instead
#: of being covered by the tail envelope
DEFAULT_ETA = 1e-3
#: step of the central differences used for d(w)/dt
DERIVATIVE_STEP = 1e-6
BAND_POINTS = 101
#: rows of the t grid evaluated at once
CHUNK_ROWS = 256
#: subdivisions per refinement level and refinement depth of suspicious cells
REFINE_POINTS = 9
REFINE_DEPTH = 8
#: Fock level beyond which the tail envelope is not pursued
TAIL_K_CAP = 400000
#: the same inside the bands next to t = +-1, where Fock levels up to it are
#: sampled when the envelope does not settle
BAND_K_CAP = 20000

NOTE = (
    "numerical certification on a finite t grid with derivative margins and a tail "
    "envelope for large k; not a formal proof"
)


@dataclass(frozen=True)
class ConstantPiece:
    lo: float
    hi: float
    values: Tuple[float, ...]

    def evaluate(self, ts: np.ndarray) -> np.ndarray:
        return np.tile(np.asarray(self.values, dtype=float), (np.size(ts), 1))


@dataclass(frozen=True)
class ClosedFormPiece:
    """
    ``func`` maps an array of ``t`` values to an array of shape
    ``(len(t), N)``; it must be a module level function when certificates
    are verified on several workers.
    """

    lo: float
    hi: float
    func: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def evaluate(self, ts: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(np.asarray(ts, dtype=float)), dtype=float)


Piece = Union[ConstantPiece, ClosedFormPiece]


@dataclass(frozen=True)
class CertificateFamily:
    """
    Functions ``s_j`` given piecewise on a partition of ``[-1, 1]``. Pieces
    are half open ``[lo, hi)`` except the last, which includes ``t = 1``.
    """

    gate: GateSpec
    pieces: Tuple[Piece, ...]
    delta: float
    k_max: Optional[int] = None
    grid: Optional[int] = None
    derived: bool = False

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)

        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise InputError(f"delta must be finite and >= 0, got {self.delta!r}")

        if not pieces:
            raise InputError("a certificate needs at least one piece")

        if pieces[0].lo != -1.0 or pieces[-1].hi != 1.0:
            raise InputError("pieces must cover [-1, 1]")

        for previous, current in zip(pieces, pieces[1:]):
            if previous.hi != current.lo:
                raise InputError(f"gap or overlap between pieces at t={previous.hi!r}")

        for piece in pieces:
            if not piece.lo < piece.hi:
                raise InputError(f"empty piece [{piece.lo!r}, {piece.hi!r})")

            if isinstance(piece, ConstantPiece):
                if len(piece.values) != self.gate.cutoff:
                    raise InputError(
                        f"piece has {len(piece.values)} values, gate needs {self.gate.cutoff}"
                    )

                if min(piece.values, default=0.0) < 0:
                    raise InputError("certificate functions must be non negative")

    @property
    def bound(self) -> float:
        """``4 delta**2``, regardless of verification; see :func:`bound`"""

        return 4.0 * self.delta * self.delta

    @property
    def tabulated(self) -> bool:
        return all(isinstance(piece, ConstantPiece) for piece in self.pieces)

    def piece_index(self, t: float) -> int:
        if not -1.0 <= t <= 1.0:
            raise InputError(f"transmittivity must lie in [-1, 1], got {t!r}")

        return max(bisect.bisect_right([piece.lo for piece in self.pieces], t) - 1, 0)

    def s(self, t: float) -> np.ndarray:
        values = self.pieces[self.piece_index(t)].evaluate(np.array([t]))[0]

        if np.any(values < 0):
            raise InputError(f"certificate function is negative at t={t!r}")

        return values

    def with_delta(self, delta: float) -> "CertificateFamily":
        return CertificateFamily(
            self.gate, self.pieces, delta, self.k_max, self.grid, self.derived
        )


def _ns_left(ts: np.ndarray) -> np.ndarray:
    return np.column_stack((0.25 / (1.0 - ts), np.zeros_like(ts)))


def _ns_middle(ts: np.ndarray) -> np.ndarray:
    return np.column_stack((np.zeros_like(ts), 0.25 / (1.0 + ts * ts)))


def ns_certificate() -> CertificateFamily:
    """
    Certificate with ``delta = 1/4`` for the non-linear sign shift
    """

    knee = 1.0 - math.sqrt(2.0)

    return CertificateFamily(
        gate_ns(),
        (
            ClosedFormPiece(-1.0, knee, _ns_left, "(1/(4(1-t)), 0)"),
            ClosedFormPiece(knee, 0.0, _ns_middle, "(0, 1/(4(1+t^2)))"),
            ConstantPiece(0.0, 1.0, (0.25, 0.125)),
        ),
        0.25,
    )


def w_ratio(gate: GateSpec, s_values: Sequence[float], t: float, k: int) -> float:
    s_values = np.asarray(s_values, dtype=float)

    if s_values.shape != (gate.cutoff,):
        raise InputError(f"expected {gate.cutoff} certificate values, got {s_values.shape}")

    if np.any(s_values < 0):
        raise InputError("certificate values must be non negative")
    cosines = gate.cosines()
    total = (-0.5 + math.fsum(s_values)) * g_general(0, k, t)

    return total - math.fsum(
        cosines[j - 1] * s_values[j - 1] * g_general(j, k, t) for j in range(1, gate.cutoff + 1)
    )


def ratio_table(cosines: np.ndarray, s_rows: np.ndarray, ts: np.ndarray, ks) -> np.ndarray:
    """
    ``w_k(t)`` for rows ``t`` (with certificate values ``s_rows``) and columns ``k``
    """

    table = (-0.5 + s_rows.sum(axis=1))[:, None] * g_table(0, ks, ts)

    for j, cosine in enumerate(cosines, start=1):
        if cosine != 0.0:
            table -= (cosine * s_rows[:, j - 1])[:, None] * g_table(j, ks, ts)

    return table


@dataclass
class _Extremum:
    value: float = -1.0
    t: float = 0.0
    k: int = 0

    def update(self, values: np.ndarray, ts: np.ndarray, ks: np.ndarray):
        if values.size == 0:
            return
        row, column = np.unravel_index(int(np.argmax(values)), values.shape)

        if values[row, column] > self.value:
            self.value = float(values[row, column])
            self.t = float(ts[row])
            self.k = int(ks[column])


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    max_value: float
    argmax_t: float
    argmax_k: int
    max_estimate: float
    estimate_t: float
    estimate_k: int
    continuity_margin: float
    refined_cells: int
    tail_points: int
    tail_horizon: int
    band_unsettled: int
    delta: float
    tol: float
    t_points: int
    k_max: int
    eta: float
    note: str = field(default=NOTE)

    @property
    def bound(self) -> float:
        return 4.0 * self.delta * self.delta

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_value": self.max_value,
            "argmax": {"t": self.argmax_t, "k": self.argmax_k},
            "max_estimate": self.max_estimate,
            "estimate_argmax": {"t": self.estimate_t, "k": self.estimate_k},
            "continuity_margin": self.continuity_margin,
            "refined_cells": self.refined_cells,
            "tail_points": self.tail_points,
            "tail_horizon": self.tail_horizon,
            "band_unsettled": self.band_unsettled,
            "delta": self.delta,
            "bound": self.bound,
            "tol": self.tol,
            "t_points": self.t_points,
            "k_max": self.k_max,
            "eta": self.eta,
            "note": self.note,
        }


def _derivatives(piece: Piece, cosines: np.ndarray, ts: np.ndarray, ks) -> np.ndarray:
    upper = np.minimum(ts + DERIVATIVE_STEP, 1.0)
    lower = np.maximum(ts - DERIVATIVE_STEP, -1.0)
    plus = ratio_table(cosines, piece.evaluate(upper), upper, ks)
    minus = ratio_table(cosines, piece.evaluate(lower), lower, ks)

    return (plus - minus) / (upper - lower)[:, None]


def _cell_estimates(
    values: np.ndarray, slopes: np.ndarray, widths: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Upper estimate of ``|w|`` on every cell between consecutive rows. Cells
    on which ``w`` is monotone are bounded by their endpoints; otherwise
    a quadratic overshoot margin is added.
    """

    left, right = slopes[:-1], slopes[1:]
    turning = left * right <= 0
    margins = np.where(
        turning, 0.5 * widths[:, None] * np.minimum(np.abs(left), np.abs(right)), 0.0
    )
    ends = np.maximum(np.abs(values[:-1]), np.abs(values[1:]))

    return ends + margins, margins


class _Refined(NamedTuple):
    estimate: float
    value: float
    t: float


def _refine(
    piece: Piece, cosines: np.ndarray, lo: float, hi: float, k: int, threshold: float, depth: int
) -> _Refined:
    """
    Re-estimates ``max |w_k|`` on ``[lo, hi]`` on a finer grid, recursing into
    sub-cells whose estimate still exceeds ``threshold``. Also returns the
    largest sampled ``|w_k|`` and where it was found.
    """

    ts = np.linspace(lo, hi, REFINE_POINTS)
    ks = np.array([k])
    values = np.abs(ratio_table(cosines, piece.evaluate(ts), ts, ks)[:, 0])
    slopes = _derivatives(piece, cosines, ts, ks)
    estimates = _cell_estimates(values[:, None], slopes, np.diff(ts))[0][:, 0]
    peak = int(np.argmax(values))
    value, where = float(values[peak]), float(ts[peak])
    estimate = 0.0

    for index in range(REFINE_POINTS - 1):
        cell = float(estimates[index])

        if cell > threshold and depth > 1:
            found = _refine(piece, cosines, ts[index], ts[index + 1], k, threshold, depth - 1)
            cell = found.estimate

            if found.value > value:
                value, where = found.value, found.t
        estimate = max(estimate, cell)

    return _Refined(max(estimate, value), value, where)


def _envelope(offset: float, weights: np.ndarray, u: float, ks: np.ndarray) -> np.ndarray:
    # |g^(j)_k(t)| <= (1 + k)^j |t|^(k - j) for k >= j
    log_u = math.log(u)
    envelope = abs(offset) * np.exp(ks * log_u)

    for j, weight in enumerate(weights, start=1):
        if weight:
            envelope = envelope + weight * np.exp(j * np.log1p(ks) + (ks - j) * log_u)

    return envelope


def _tail_horizon(
    offset: float, weights: np.ndarray, t: float, start: int, delta: float, cap: int = TAIL_K_CAP
) -> int:
    """
    Smallest ``K >= start`` past which the envelope of ``|w_k(t)|`` is
    decreasing and at most ``delta``; ``-1`` when no such ``K <= cap``.
    """

    u = abs(t)

    if u == 0.0:
        return start

    if u >= 1.0:
        return -1
    order = len(weights)
    peak = math.ceil(order / -math.log(u)) if order else 0
    low = max(start, peak)

    if low > cap:
        return -1

    def below(k: int) -> bool:
        return bool(_envelope(offset, weights, u, np.array([float(k)]))[0] <= delta)

    if below(low):
        return low
    high = low

    while not below(high):
        if high >= cap:
            return -1
        low, high = high, min(2 * high, cap)

    while high - low > 1:
        middle = (low + high) // 2

        if below(middle):
            high = middle
        else:
            low = middle

    return high


def _evaluation_points(t_points: int, eta: float) -> np.ndarray:
    band = np.linspace(1.0 - eta, 1.0, BAND_POINTS)

    return np.unique(np.concatenate((np.linspace(-1.0, 1.0, t_points), band, -band)))


def verify(
    cert: CertificateFamily,
    t_points: int = DEFAULT_T_POINTS,
    k_max: int = DEFAULT_K_MAX,
    tol: float = DEFAULT_TOL,
    eta: float = DEFAULT_ETA,
) -> VerificationReport:
    """
    Checks ``|w_k(t)| <= delta + tol`` on a grid of ``t_points`` values (plus
    dense bands next to ``t = +-1``) for ``k = 0..k_max``, between grid points
    through derivative margins, and for ``k > k_max`` through a tail envelope
    taken at the largest ``|t|`` of the neighbouring cells. Levels below the
    envelope horizon are sampled. Inside the bands the horizon is capped at
    :data:`BAND_K_CAP`; band points whose envelope has not settled by then are
    sampled up to the cap and counted in ``band_unsettled``. At ``t = +-1``
    the values only depend on the parity of ``k`` and are covered exactly.
    """

    gate = cert.gate

    if t_points < 2:
        raise InputError(f"t_points must be >= 2, got {t_points}")

    if k_max < gate.cutoff:
        raise InputError(f"k_max must be >= {gate.cutoff}, got {k_max}")

    if tol <= 0 or not 0 < eta < 1:
        raise InputError("tol must be positive and eta in (0, 1)")
    cosines = gate.cosines()
    threshold = cert.delta + tol
    ks = np.arange(k_max + 1)
    points = _evaluation_points(t_points, eta)
    sampled, estimated = _Extremum(), _Extremum()
    margin = 0.0
    refined = 0
    tail_points = 0
    tail_horizon = k_max
    band_unsettled = 0
    tail_ok = True

    for piece in cert.pieces:
        inside = points[(points >= piece.lo) & (points <= piece.hi)]
        ts = np.unique(np.concatenate(([piece.lo, piece.hi], inside)))
        s_rows = piece.evaluate(ts)

        if np.any(s_rows < 0):
            raise InputError("certificate functions must be non negative")

        for start in range(0, ts.size - 1, CHUNK_ROWS):
            rows = slice(start, min(start + CHUNK_ROWS + 1, ts.size))
            chunk = ts[rows]
            values = ratio_table(cosines, s_rows[rows], chunk, ks)
            slopes = _derivatives(piece, cosines, chunk, ks)
            estimates, margins = _cell_estimates(values, slopes, np.diff(chunk))
            sampled.update(np.abs(values), chunk, ks)
            margin = max(margin, float(margins.max()))

            for cell, k in zip(*np.nonzero(estimates > threshold)):
                if max(abs(values[cell, k]), abs(values[cell + 1, k])) > threshold:
                    continue
                refined += 1
                estimate, value, where = _refine(
                    piece,
                    cosines,
                    chunk[cell],
                    chunk[cell + 1],
                    int(ks[k]),
                    threshold,
                    REFINE_DEPTH,
                )
                estimates[cell, k] = estimate
                sampled.update(np.array([[value]]), np.array([where]), np.array([ks[k]]))
            estimated.update(estimates, chunk[:-1], ks)

        for index, (t, s_values) in enumerate(zip(ts, s_rows)):
            if abs(t) == 1.0:
                # g^(j)_k(+-1) = (+-1)^(j+k): the sampled k already cover both parities
                continue
            # envelope over both neighbouring cells
            around = slice(max(index - 1, 0), index + 2)
            u = float(np.max(np.abs(ts[around])))
            offset = float(np.max(np.abs(-0.5 + s_rows[around].sum(axis=1))))
            weights = np.abs(cosines) * s_rows[around].max(axis=0)
            in_band = abs(t) > 1.0 - eta
            cap = BAND_K_CAP if in_band else TAIL_K_CAP
            horizon = _tail_horizon(offset, weights, u, k_max + 1, cert.delta, cap)

            if horizon < 0 and not in_band:
                tail_ok = False
                logger.warning("tail envelope does not settle at t=%r", t)
                continue

            if horizon < 0:
                band_unsettled += 1
                horizon = cap + 1

            if horizon > k_max + 1:
                tail_points += 1
                tail_horizon = max(tail_horizon, horizon)
                tail_ks = np.arange(k_max + 1, horizon)
                tail = ratio_table(cosines, s_values[None, :], np.array([t]), tail_ks)
                sampled.update(np.abs(tail), np.array([t]), tail_ks)
                estimated.update(np.abs(tail), np.array([t]), tail_ks)

    if sampled.value > estimated.value:
        estimated = _Extremum(sampled.value, sampled.t, sampled.k)
    passed = tail_ok and estimated.value <= threshold
    report = VerificationReport(
        passed=passed,
        max_value=sampled.value,
        argmax_t=sampled.t,
        argmax_k=sampled.k,
        max_estimate=estimated.value,
        estimate_t=estimated.t,
        estimate_k=estimated.k,
        continuity_margin=margin,
        refined_cells=refined,
        tail_points=tail_points,
        tail_horizon=tail_horizon,
        band_unsettled=band_unsettled,
        delta=cert.delta,
        tol=tol,
        t_points=t_points,
        k_max=k_max,
        eta=eta,
    )
    logger.info(
        "verified %s: max=%.15g estimate=%.15g delta=%.15g passed=%s",
        gate,
        report.max_value,
        report.max_estimate,
        cert.delta,
        passed,
    )

    return report


def bound(cert: CertificateFamily, report: Optional[VerificationReport] = None, **options) -> float:
    """
    ``4 delta**2`` of a certificate that passes :func:`verify`. Without a
    ``report`` the certificate is verified with ``options``.

    :raises UnverifiedCertificateError: when verification fails
    """

    if report is None:
        report = verify(cert, **options)

    if report.delta != cert.delta:
        raise UnverifiedCertificateError(
            f"report is for delta={report.delta!r}, certificate has {cert.delta!r}", report
        )

    if not report.passed:
        raise UnverifiedCertificateError(
            f"certificate fails at t={report.estimate_t!r}, k={report.estimate_k} "
            f"(|w| up to {report.max_estimate!r} > {cert.delta!r})",
            report,
        )

    return cert.bound


def phase_bound(phi2: float) -> float:
    """
    Upper bound on the success probability of the non-linear phase shift
    by ``phi2``
    """

    phi2 = normalize_angle(phi2)

    return (3.0 - math.cos(math.pi - phi2)) ** 2 / 16.0


def build_dual_solution(
    cert: CertificateFamily, gate: GateSpec, bs: BeamSplitter, eps
) -> Tuple[DualSolution, float]:
    """
    Dual point of the relaxation at ``(t, phi, eps)`` built from the
    certificate values ``s = s(t)`` and the radius ``delta``:

    * ``v_j = -cos(j phi) s_j``, ``v_{N+j+1} = -sin(j phi) s_j``, ``v_{2N+2} = 1``
    * ``gamma = 2 sum_j s_j (1 - cos(j phi)) + 1``
    * ``W_ab = w_a w_b / delta`` off the diagonal and
      ``z = (delta, alpha_1^2 delta, ..., alpha_{n+1}^2 delta)``

    where ``w`` is the border of the dual matrix and ``alpha = Re(eps)``.
    The sine multipliers carry a minus sign because the imaginary gate rows
    are written with the phase ``j phi - phi_j``.

    The border works out to

    .. math::

        w_k = \\alpha_k \\big(w^{ratio}_k - (\\gamma - 1) t^k\\big)
        - \\beta_k \\sum_j \\sin(\\phi_j) s_j g^{(j)}_k,

    so at ``phi = 0`` (where ``gamma = 1``) and for a gate whose phases are
    multiples of ``pi`` it is ``alpha_k w^{ratio}_k``, and the point is dual
    feasible whenever the certificate inequality holds at ``t``. Elsewhere
    feasibility is not implied and has to be checked with
    :func:`lobound.sdp.check_dual_feasible`.
    """

    if gate.phases != cert.gate.phases:
        raise InputError(f"certificate is for {cert.gate}, not {gate}")
    s = cert.s(bs.t)
    cutoff = gate.cutoff
    v = np.zeros(2 * cutoff + 2)

    for j in range(1, cutoff + 1):
        cosine, sine = unit_phase(j * bs.phi)
        v[j - 1] = -cosine * s[j - 1]
        v[cutoff + j] = -sine * s[j - 1]
    v[-1] = 1.0
    gamma = 1.0 + 2.0 * math.fsum(
        s[j - 1] * (1.0 - unit_phase(j * bs.phi)[0]) for j in range(1, cutoff + 1)
    )

    cs = build_constraints(gate, bs, eps)
    w = (-0.5 * gamma - v[:cutoff].sum()) * cs.c[0]

    for j in range(1, cutoff + 1):
        w += v[j - 1] * cs.c[j]

    for j in range(cutoff + 1):
        w += v[cutoff + j] * cs.d[j]
    delta = cert.delta

    if delta > 0:
        W = np.outer(w, w) / delta
        np.fill_diagonal(W, 0.0)
    else:
        W = np.zeros((w.size, w.size))
    alpha = np.asarray(eps, dtype=complex).real
    z = np.concatenate(([delta], alpha ** 2 * delta))

    return DualSolution.from_hollow(z, v, W), gamma


def point_bound(cert: CertificateFamily, gate: GateSpec, bs: BeamSplitter, eps) -> float:
    """
    ``(q^T z)^2 / gamma^2`` of the certificate dual at one point, at most
    ``4 delta**2``.

    :raises InfeasibleError: when the certificate dual is not feasible there
    """

    sol, gamma = build_dual_solution(cert, gate, bs, eps)
    report = check_dual_feasible(sol, assemble(gate, bs, eps, gamma))

    if not report.feasible:
        raise InfeasibleError(
            f"certificate dual is infeasible at t={bs.t!r}, phi={bs.phi!r} "
            f"(minimum eigenvalue {report.min_eigenvalue!r})",
            report,
        )

    return (sol.objective / gamma) ** 2


@dataclass(frozen=True)
class _CellTask:
    cosines: Tuple[float, ...]
    samples: Tuple[float, ...]
    k_max: int


def _solve_cell(task: _CellTask) -> Tuple[Tuple[float, ...], float]:
    """
    ``min_{s >= 0} max_{t, k} |w_k(t)|`` over the cell samples
    """

    cosines = np.asarray(task.cosines)
    ts = np.asarray(task.samples)
    ks = np.arange(task.k_max + 1)
    g0 = g_table(0, ks, ts)
    offsets = (-0.5 * g0).ravel()
    slopes = np.column_stack(
        [(g0 - cosine * g_table(j, ks, ts)).ravel() for j, cosine in enumerate(cosines, start=1)]
    )
    keep = (np.abs(offsets) > 1e-15) | np.any(np.abs(slopes) > 1e-15, axis=1)
    offsets, slopes = offsets[keep], slopes[keep]
    ones = -np.ones((offsets.size, 1))
    result = linprog(
        np.r_[np.zeros(cosines.size), 1.0],
        A_ub=np.vstack((np.hstack((slopes, ones)), np.hstack((-slopes, ones)))),
        b_ub=np.concatenate((-offsets, offsets)),
        bounds=[(0, None)] * (cosines.size + 1),
        method="highs",
    )

    if result.status != 0:
        raise SolverError(f"cell [{ts[0]!r}, {ts[-1]!r}]: {result.message}")
    s = np.maximum(result.x[: cosines.size], 0.0)
    achieved = float(np.max(np.abs(offsets + slopes @ s))) if offsets.size else 0.5

    return tuple(float(value) for value in s), achieved


def find_certificate(
    gate: GateSpec,
    t_points: int = 2001,
    k_max: int = 500,
    delta_tol: float = 1e-9,
    tol: float = DEFAULT_TOL,
    eta: float = DEFAULT_ETA,
    workers: int = 1,
) -> CertificateFamily:
    """
    Piecewise constant certificate on the cells of a uniform ``t_points``
    grid. Every cell solves a minimax linear program over its endpoints and
    midpoint, for Fock levels up to ``k_max`` or, in cells reaching into the
    bands next to ``t = +-1``, up to :data:`BAND_K_CAP`. ``delta`` is the
    worst cell value raised to the verified estimate on a grid with twice the
    resolution, plus ``delta_tol``.

    :raises SolverError: when a cell program fails or the result does not verify
    """

    if gate.cutoff < 1:
        raise InputError("certificate search needs a gate with cutoff >= 1")

    if t_points < 2:
        raise InputError(f"t_points must be >= 2, got {t_points}")

    if k_max < gate.cutoff:
        raise InputError(f"k_max must be >= {gate.cutoff}, got {k_max}")
    edges = np.linspace(-1.0, 1.0, t_points)
    cosines = tuple(float(c) for c in gate.cosines())
    tasks = [
        _CellTask(
            cosines,
            (float(lo), float(0.5 * (lo + hi)), float(hi)),
            BAND_K_CAP if max(abs(lo), abs(hi)) > 1.0 - eta else k_max,
        )
        for lo, hi in zip(edges[:-1], edges[1:])
    ]
    logger.info("solving %d certificate cells for %s", len(tasks), gate)
    solutions = parallel_map(_solve_cell, tasks, workers)
    pieces = tuple(
        ConstantPiece(float(lo), float(hi), values)
        for (lo, hi), (values, _) in zip(zip(edges[:-1], edges[1:]), solutions)
    )
    cell_delta = max(achieved for _, achieved in solutions)
    fine = 2 * (t_points - 1) + 1
    draft = CertificateFamily(gate, pieces, cell_delta, k_max, t_points, derived=True)
    report = verify(draft, fine, k_max, tol, eta)
    delta = max(cell_delta, report.max_estimate) + delta_tol
    cert = draft.with_delta(delta)
    final = verify(cert, fine, k_max, tol, eta)

    if not final.passed:
        raise SolverError(
            f"searched certificate does not verify (estimate {final.max_estimate!r} > {delta!r})"
        )
    logger.info("certificate for %s: delta=%.12g bound=%.12g", gate, delta, cert.bound)

    return cert


HEADER = "# lobound certificate"


def dumps(cert: CertificateFamily) -> str:
    """
    Plain-text table: a header with gate, delta, k_max and grid followed by
    rows ``t_lo t_hi s_1 .. s_N``. Floats are written with ``repr`` so that
    :func:`loads` restores them exactly.
    """

    if not cert.tabulated:
        raise SerializationError("only piecewise constant certificates can be serialized")
    lines = [
        HEADER,
        f"gate {cert.gate.selector}",
        f"delta {cert.delta!r}",
        f"k_max {cert.k_max if cert.k_max is not None else '-'}",
        f"grid {cert.grid if cert.grid is not None else '-'}",
        f"derived {int(cert.derived)}",
        "t_lo t_hi " + " ".join(f"s_{j}" for j in range(1, cert.gate.cutoff + 1)),
    ]

    for piece in cert.pieces:
        lines.append(" ".join(repr(float(value)) for value in (piece.lo, piece.hi, *piece.values)))

    return "\n".join(lines) + "\n"


def loads(text: str) -> CertificateFamily:
    lines = [line.strip() for line in text.splitlines() if line.strip()]

    if len(lines) < 7 or lines[0] != HEADER:
        raise SerializationError("not a lobound certificate table")
    header = {}

    for line in lines[1:6]:
        key, _, value = line.partition(" ")
        header[key] = value.strip()

    try:
        gate = parse_gate(header["gate"])
        delta = float(header["delta"])
        k_max = None if header["k_max"] == "-" else int(header["k_max"])
        grid = None if header["grid"] == "-" else int(header["grid"])
        derived = bool(int(header["derived"]))
        pieces: List[Piece] = []

        for line in lines[7:]:
            values = [float(value) for value in line.split()]

            if len(values) != gate.cutoff + 2:
                raise SerializationError(f"row has {len(values)} columns: {line!r}")
            pieces.append(ConstantPiece(values[0], values[1], tuple(values[2:])))

        return CertificateFamily(gate, tuple(pieces), delta, k_max, grid, derived)
    except (KeyError, ValueError) as exc:
        raise SerializationError(f"malformed certificate table: {exc}")
