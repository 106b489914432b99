import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Sequence, Tuple, TypeVar

import numpy as np

from lobound.exceptions import InputError

T = TypeVar("T")
R = TypeVar("R")

TWO_PI = 2.0 * math.pi

#: cos/sin of angles within this distance of a multiple of pi/2 are snapped
_SNAP_TOL = 1e-15


def normalize_angle(angle: float) -> float:
    """
    Maps ``angle`` into ``[0, 2*pi)``
    """

    if not math.isfinite(angle):
        raise InputError(f"phase must be finite, got {angle!r}")
    reduced = math.fmod(angle, TWO_PI)

    if reduced < 0:
        reduced += TWO_PI

    # fmod of a value just below a multiple of 2pi can round up to 2pi
    if reduced >= TWO_PI:
        reduced = 0.0

    return reduced


def unit_phase(angle: float) -> Tuple[float, float]:
    """
    Returns ``(cos(angle), sin(angle))`` with the round-off of multiples of
    pi/2 removed, so that e.g. ``unit_phase(-pi) == (-1.0, 0.0)``.
    """

    c, s = math.cos(angle), math.sin(angle)

    if abs(c) < _SNAP_TOL:
        c = 0.0

    if abs(s) < _SNAP_TOL:
        s = 0.0

    if c == 0.0:
        s = math.copysign(1.0, s)
    elif s == 0.0:
        c = math.copysign(1.0, c)

    return c, s


def as_real_vector(values: Iterable[float], name: str) -> np.ndarray:
    vector = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)

    if vector.ndim != 1:
        raise InputError(f"{name} must be a vector, got shape {vector.shape}")

    if not np.all(np.isfinite(vector)):
        raise InputError(f"{name} must be finite")

    return vector


def as_complex_vector(values: Iterable[complex], name: str) -> np.ndarray:
    vector = np.array(
        list(values) if not isinstance(values, np.ndarray) else values, dtype=complex
    )

    if vector.ndim != 1:
        raise InputError(f"{name} must be a vector, got shape {vector.shape}")

    if not np.all(np.isfinite(vector)):
        raise InputError(f"{name} must be finite")

    return vector


def default_workers() -> int:
    return os.cpu_count() or 1


def parallel_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """
    Maps ``func`` over ``items`` preserving order. With ``workers > 1`` the
    calls are distributed over a process pool, so ``func`` and the items
    must be picklable.
    """

    if workers < 1:
        raise InputError(f"workers must be >= 1, got {workers}")

    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]

    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(func, items))
