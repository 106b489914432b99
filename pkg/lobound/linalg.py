"""
Dense real symmetric linear algebra: a cyclic Jacobi eigenvalue solver,
positive-semidefiniteness tests and orthogonal projection onto the
complement of a span.
"""
import math
from typing import Iterable, List, Sequence, Union

import numpy as np

from lobound.exceptions import ConvergenceError, InputError

#: default off-diagonal Frobenius norm at which a Jacobi iteration stops
DEFAULT_EIGEN_TOL = 1e-10
#: default norm below which a vector is treated as lying in the span
DEFAULT_ORTHO_TOL = 1e-12
#: sweep budget of the Jacobi iteration
MAX_SWEEPS = 100


class SymMatrix:
    """
    Immutable dense real symmetric matrix.

    :param entries: square array like
    :param symmetrize: replace ``entries`` by ``(entries + entries.T) / 2``
     instead of rejecting an asymmetric input
    """

    __slots__ = ("_entries",)

    def __init__(self, entries, symmetrize: bool = False):
        array = np.array(entries, dtype=float)

        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise InputError(f"expected a square matrix, got shape {array.shape}")

        if array.shape[0] < 1:
            raise InputError("matrix dimension must be >= 1")

        if not np.all(np.isfinite(array)):
            raise InputError("matrix entries must be finite")

        if symmetrize:
            array = 0.5 * (array + array.T)
        elif not np.array_equal(array, array.T):
            raise InputError("matrix is not symmetric")
        array.setflags(write=False)
        self._entries = array

    @classmethod
    def zeros(cls, dim: int) -> "SymMatrix":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def identity(cls, dim: int) -> "SymMatrix":
        return cls(np.eye(dim))

    @classmethod
    def diagonal(cls, values: Iterable[float]) -> "SymMatrix":
        return cls(np.diag(np.asarray(list(values), dtype=float)))

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """read-only view of the entries"""

        return self._entries

    def __array__(self, dtype=None):
        return self._entries if dtype is None else self._entries.astype(dtype)

    def __getitem__(self, index):
        return self._entries[index]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymMatrix):
            return NotImplemented

        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        self._check_compatible(other)

        return SymMatrix(self._entries + other._entries)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        self._check_compatible(other)

        return SymMatrix(self._entries - other._entries)

    def __mul__(self, scalar: float) -> "SymMatrix":
        return SymMatrix(float(scalar) * self._entries)

    __rmul__ = __mul__

    def __neg__(self) -> "SymMatrix":
        return SymMatrix(-self._entries)

    def __repr__(self) -> str:
        return f"SymMatrix(dim={self.dim})"

    def trace(self) -> float:
        return float(np.trace(self._entries))

    def inner(self, other: "SymMatrix") -> float:
        """
        Trace inner product ``tr[self @ other]``
        """

        self._check_compatible(other)

        return float(np.sum(self._entries * other._entries))

    def shifted(self, shift: float) -> "SymMatrix":
        return SymMatrix(self._entries + shift * np.eye(self.dim))

    def _check_compatible(self, other: "SymMatrix"):
        if not isinstance(other, SymMatrix):
            raise InputError(f"expected SymMatrix, got {type(other).__name__}")

        if other.dim != self.dim:
            raise InputError(f"dimension mismatch: {self.dim} != {other.dim}")


MatrixLike = Union[SymMatrix, np.ndarray, Sequence[Sequence[float]]]


def _as_sym(m: MatrixLike) -> SymMatrix:
    return m if isinstance(m, SymMatrix) else SymMatrix(m)


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def eigenvalues_symmetric(
    m: MatrixLike, tol: float = DEFAULT_EIGEN_TOL, max_sweeps: int = MAX_SWEEPS
) -> List[float]:
    """
    All eigenvalues of a real symmetric matrix, in ascending order, computed
    with cyclic Jacobi rotations.

    The iteration stops once the off-diagonal Frobenius norm is at most
    ``tol``, or once it is at the rounding floor of the matrix
    (``dim * eps * ||m||_F``) which only matters for matrices with very
    large entries.

    :raises ConvergenceError: when ``max_sweeps`` sweeps do not converge
    """

    if tol <= 0:
        raise InputError(f"tol must be positive, got {tol}")
    a = np.array(_as_sym(m).entries, dtype=float)
    n = a.shape[0]
    floor = n * np.finfo(float).eps * float(np.linalg.norm(a))
    threshold = max(tol, floor)
    off = _off_norm(a)
    sweeps = 0

    while off > threshold:
        if sweeps == max_sweeps:
            raise ConvergenceError("Jacobi iteration did not converge", sweeps, off)
        sweeps += 1

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]

                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)

                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
        off = _off_norm(a)

    return sorted(float(value) for value in np.diag(a))


def min_eigenvalue(m: MatrixLike, tol: float = DEFAULT_EIGEN_TOL) -> float:
    return eigenvalues_symmetric(m, tol)[0]


def is_psd(m: MatrixLike, shift: float = 0.0, tol: float = DEFAULT_EIGEN_TOL) -> bool:
    """
    ``True`` iff the smallest eigenvalue of ``m`` is at least ``-shift``
    """

    if shift < 0:
        raise InputError(f"shift must be non negative, got {shift}")

    return min_eigenvalue(m, tol) >= -shift


def orthonormal_basis(span: Sequence, tol: float = DEFAULT_ORTHO_TOL) -> List[np.ndarray]:
    """
    Orthonormal basis of ``span`` by modified Gram-Schmidt with a second
    orthogonalization pass. Vectors whose remainder has norm below ``tol``
    are dropped.
    """

    if tol <= 0:
        raise InputError(f"tol must be positive, got {tol}")
    basis: List[np.ndarray] = []
    dim = None

    for vector in span:
        w = np.array(vector, dtype=float)

        if w.ndim != 1:
            raise InputError(f"span vectors must be one dimensional, got shape {w.shape}")

        if dim is None:
            dim = w.shape[0]
        elif w.shape[0] != dim:
            raise InputError(f"dimension mismatch in span: {w.shape[0]} != {dim}")

        for _ in range(2):
            for b in basis:
                w -= (b @ w) * b
        norm = float(np.linalg.norm(w))

        if norm > tol:
            basis.append(w / norm)

    return basis


def project_complement(v, span: Sequence, tol: float = DEFAULT_ORTHO_TOL) -> np.ndarray:
    """
    Orthogonal projection of ``v`` onto the orthogonal complement of
    ``span(span)``.

    :raises InputError: when the vectors do not share one dimension
    """

    vector = np.array(v, dtype=float)

    if vector.ndim != 1:
        raise InputError(f"v must be one dimensional, got shape {vector.shape}")

    for u in span:
        if np.shape(u) != vector.shape:
            raise InputError(
                f"dimension mismatch: span vector {np.shape(u)} vs v {vector.shape}"
            )
    basis = orthonormal_basis(span, tol)

    for _ in range(2):
        for b in basis:
            vector -= (b @ vector) * b

    return vector


def complement_projector(dim: int, span: Sequence, tol: float = DEFAULT_ORTHO_TOL) -> SymMatrix:
    """
    The matrix ``P`` with ``P @ v == project_complement(v, span)``
    """

    p = np.eye(dim)

    for b in orthonormal_basis(span, tol):
        if b.shape[0] != dim:
            raise InputError(f"dimension mismatch: {b.shape[0]} != {dim}")
        p -= np.outer(b, b)

    return SymMatrix(p, symmetrize=True)
