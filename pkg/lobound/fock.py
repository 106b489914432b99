"""
Gate catalog and the diagonal Fock-basis coefficients of a beam splitter.

For a beam splitter with transmittivity ``t`` and phase ``phi``

.. math::

    f^{(j)}_k = \\langle j, k | V | j, k \\rangle = e^{i \\phi j} g^{(j)}_k(t),
    \\qquad
    g^{(j)}_k(t) = \\sum_{l=0}^{\\min(j,k)} (-1)^l \\binom{j}{l} \\binom{k}{l}
    (1 - t^2)^l \\, t^{j + k - 2l}.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, Sequence, Tuple

import numpy as np
from scipy.special import eval_jacobi

from lobound.exceptions import InputError
from lobound.utils import normalize_angle, unit_phase

#: beyond this level the coefficients come from the Jacobi recurrence
EXACT_BINOMIAL_LIMIT = 20


@dataclass(frozen=True)
class GateSpec:
    """
    Diagonal single mode gate ``|j> -> e^{i phi_j} |j>`` for ``j = 0..N``.
    ``phases`` holds ``phi_1..phi_N``; ``phi_0`` is fixed to 0.
    """

    phases: Tuple[float, ...]
    label: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "phases", tuple(normalize_angle(float(phi)) for phi in self.phases)
        )

    @property
    def cutoff(self) -> int:
        return len(self.phases)

    N = cutoff

    def phase(self, j: int) -> float:
        if j < 0 or j > self.cutoff:
            raise InputError(f"Fock level {j} outside 0..{self.cutoff}")

        return 0.0 if j == 0 else self.phases[j - 1]

    def unit_phases(self) -> np.ndarray:
        """``e^{i phi_j}`` for ``j = 0..N``"""

        return np.array([complex(*unit_phase(self.phase(j))) for j in range(self.cutoff + 1)])

    def cosines(self) -> np.ndarray:
        """``cos(phi_j)`` for ``j = 1..N``"""

        return np.array([unit_phase(phi)[0] for phi in self.phases])

    @property
    def real(self) -> bool:
        """every phase is 0 or pi"""

        return all(unit_phase(phi)[1] == 0.0 for phi in self.phases)

    def target(self, y: Sequence[complex]) -> np.ndarray:
        """
        Ideal output amplitudes for the input amplitudes ``y_0..y_N``
        """

        y = np.asarray(y, dtype=complex)

        if y.shape != (self.cutoff + 1,):
            raise InputError(f"expected {self.cutoff + 1} input amplitudes, got {y.shape}")

        return y * self.unit_phases()

    @property
    def selector(self) -> str:
        if self.label in ("ns", "sign"):
            return "ns" if self.label == "ns" else f"sign:{self.cutoff}"

        if self.label == "phase":
            return f"phase:{self.phases[1]!r}"

        return "custom:" + ",".join(repr(phi) for phi in self.phases)

    def __str__(self) -> str:
        return self.selector


@dataclass(frozen=True)
class BeamSplitter:
    """
    Central beam splitter with transmittivity ``t`` in ``[-1, 1]`` and
    phase ``phi`` (normalized into ``[0, 2pi)``)
    """

    t: float
    phi: float = 0.0

    def __post_init__(self):
        t = float(self.t)

        if not (-1.0 <= t <= 1.0):
            raise InputError(f"transmittivity must lie in [-1, 1], got {self.t!r}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "phi", normalize_angle(float(self.phi)))


def gate_ns() -> GateSpec:
    """
    Non-linear sign shift ``(y0, y1, y2) -> (y0, y1, -y2)``
    """

    return GateSpec((0.0, math.pi), label="ns")


def gate_phase(phi2: float) -> GateSpec:
    """
    Non-linear phase shift ``(y0, y1, y2) -> (y0, y1, e^{i phi2} y2)``
    """

    return GateSpec((0.0, phi2), label="phase")


def gate_sign(cutoff: int) -> GateSpec:
    """
    Sign flip of the highest level: ``y_N -> -y_N``
    """

    if int(cutoff) != cutoff or cutoff < 1:
        raise InputError(f"sign gate needs a cutoff >= 1, got {cutoff!r}")

    return GateSpec((0.0,) * (int(cutoff) - 1) + (math.pi,), label="sign")


def gate_custom(phases: Iterable[float]) -> GateSpec:
    return GateSpec(tuple(float(phi) for phi in phases), label="custom")


def _parse_float(value: str) -> float:
    try:
        result = float(value)
    except ValueError:
        raise InputError(f"not a number: {value!r}")

    if not math.isfinite(result):
        raise InputError(f"not a finite number: {value!r}")

    return result


def _parse_int(value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise InputError(f"not an integer: {value!r}")


def _parse_phase_list(value: str) -> Tuple[float, ...]:
    if not value.strip():
        return ()

    return tuple(_parse_float(item.strip()) for item in value.split(","))


GATE_SELECTOR_PARSERS: Dict[str, Callable[[str], GateSpec]] = {
    "phase": lambda value: gate_phase(_parse_float(value)),
    "sign": lambda value: gate_sign(_parse_int(value)),
    "custom": lambda value: gate_custom(_parse_phase_list(value)),
}


def parse_gate(selector: str) -> GateSpec:
    """
    Parses a gate selector: ``ns``, ``phase:<phi2>``, ``sign:<N>`` or
    ``custom:<phi1>,...,<phiN>``
    """

    selector = selector.strip()

    if selector == "ns":
        return gate_ns()
    kind, sep, value = selector.partition(":")

    if not sep or kind not in GATE_SELECTOR_PARSERS:
        raise InputError(f"unknown gate selector: {selector!r}")

    return GATE_SELECTOR_PARSERS[kind](value)


def _check_levels(j: int, k: int):
    if j < 0 or k < 0 or int(j) != j or int(k) != k:
        raise InputError(f"Fock levels must be non negative integers, got j={j!r}, k={k!r}")


def _check_t(t: float):
    if not (-1.0 <= t <= 1.0):
        raise InputError(f"transmittivity must lie in [-1, 1], got {t!r}")


def g_closed(j: int, k: int, t: float) -> float:
    """
    Closed forms of ``g^{(j)}_k`` for ``j <= 2`` with the negative powers of
    ``t`` cancelled, so ``t = 0`` is a regular point.
    """

    _check_levels(j, k)
    _check_t(t)
    r = 1.0 - t * t

    if j == 0:
        return t ** k

    if j == 1:
        if k == 0:
            return t

        return t ** (k - 1) * (t * t - k * r)

    if j == 2:
        if k == 0:
            return t * t

        if k == 1:
            return t ** 3 - 2.0 * t * r

        return t ** (k - 2) * (t ** 4 - 2.0 * k * t * t * r + r * r * k * (k - 1) / 2.0)
    raise InputError(f"closed forms exist for j <= 2 only, got j={j}")


def _g_jacobi(j: int, ks: np.ndarray, ts: np.ndarray) -> np.ndarray:
    # g^{(j)}_k(t) = t^{|j-k|} P_m^{(0, |j-k|)}(2t^2 - 1), m = min(j, k)
    ks = np.asarray(ks, dtype=np.int64)
    ts = np.asarray(ts, dtype=float)
    gap = np.abs(ks - j)
    degree = np.minimum(ks, j).astype(np.int64)
    x = 2.0 * ts[:, None] * ts[:, None] - 1.0

    return np.power(ts[:, None], gap[None, :]) * eval_jacobi(
        degree[None, :], 0.0, gap[None, :].astype(float), x
    )


def g_general(j: int, k: int, t: float) -> float:
    """
    ``g^{(j)}_k(t)`` for any ``j, k >= 0``.

    While ``min(j, k)`` stays within :data:`EXACT_BINOMIAL_LIMIT` the
    combinatorial sum is taken with exact integer binomials. Beyond it the
    alternating sum cancels badly, and the value is read from the Jacobi
    polynomial form ``t^{|j-k|} P_{min(j,k)}^{(0,|j-k|)}(2t^2 - 1)``,
    evaluated by its three term recurrence.
    """

    _check_levels(j, k)
    _check_t(t)

    if min(j, k) > EXACT_BINOMIAL_LIMIT:
        return float(_g_jacobi(j, np.array([k]), np.array([t]))[0, 0])
    r = 1.0 - t * t

    return math.fsum(
        (-1) ** level
        * float(math.comb(j, level) * math.comb(k, level))
        * r ** level
        * t ** (j + k - 2 * level)
        for level in range(min(j, k) + 1)
    )


@lru_cache(maxsize=64)
def _binomial_products(j: int, k_max: int) -> np.ndarray:
    # products[l, k] = C(j, l) * C(k, l), zero for l > k
    ks = np.arange(k_max + 1, dtype=float)
    products = np.zeros((j + 1, k_max + 1))
    column = np.ones(k_max + 1)

    for level in range(j + 1):
        if level:
            column = column * (ks - level + 1) / level
        products[level] = math.comb(j, level) * column
    products.setflags(write=False)

    return products


def g_table(j: int, ks: Sequence[int], ts) -> np.ndarray:
    """
    Vectorized ``g^{(j)}_k(t)``: returns an array of shape ``(len(ts), len(ks))``.
    A scalar ``ts`` yields shape ``(len(ks),)``.
    """

    ks = np.asarray(ks, dtype=int)
    scalar = np.ndim(ts) == 0
    ts = np.atleast_1d(np.asarray(ts, dtype=float))

    if ks.ndim != 1 or ts.ndim != 1:
        raise InputError("ks and ts must be one dimensional")

    if j < 0 or (ks.size and ks.min() < 0):
        raise InputError("Fock levels must be non negative")

    if ts.size and (ts.min() < -1.0 or ts.max() > 1.0):
        raise InputError("transmittivity must lie in [-1, 1]")

    if j > EXACT_BINOMIAL_LIMIT:
        table = _g_jacobi(j, ks, ts)

        return table[0] if scalar else table

    k_max = int(ks.max()) if ks.size else 0
    capacity = max(64, 1 << k_max.bit_length())
    products = _binomial_products(j, capacity)[:, ks]
    r = 1.0 - ts * ts
    table = np.zeros((ts.size, ks.size))

    for level in range(j + 1):
        active = ks >= level

        if not np.any(active):
            break
        power = j + ks[active] - 2 * level
        term = (
            ((-1.0) ** level)
            * products[level, active][None, :]
            * (r ** level)[:, None]
            * np.power(ts[:, None], power[None, :])
        )
        table[:, active] += term

    return table[0] if scalar else table


def f_coeff(j: int, k: int, bs: BeamSplitter) -> complex:
    """
    ``e^{i phi j} g^{(j)}_k(t)``
    """

    c, s = unit_phase(bs.phi * j)

    return complex(c, s) * g_general(j, k, bs.t)
