#!/usr/bin/env python3
"""
Spline Core Module

Partitions, data sets, end conditions, tension parameters and the
overflow/cancellation-safe hyperbolic kernels consumed by every spline
family in this package.

All kernels accept scalars or numpy arrays. Scalars in give floats out.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np


ArrayLike = Union[float, Sequence[float], np.ndarray]

# Above this argument magnitude the kernels switch to exponent-factored or
# log-space evaluation.
LARGE_ARGUMENT = 30.0

# Below this magnitude the (z cosh z - sinh z)/z^3 family uses its series.
SERIES_RADIUS = 0.5

# alpha * max(|x_0|, |x_N|) must not exceed this (cosh stays representable).
COSH_GUARD = 700.0

LN2 = math.log(2.0)


# =============================================================================
# Errors
# =============================================================================

class SplineError(Exception):
    """
    Base class for every numerical failure raised by the package

    Each subclass carries a stable error code (same E-code style as the
    request validator) and the CLI exit code it maps to.
    """
    code = 'E100'
    exit_code = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return f"{self.code}: {self.message}"


class NonFinite(SplineError):
    code = 'E101'


class NonMonotone(SplineError):
    code = 'E102'


class LengthMismatch(SplineError):
    code = 'E103'


class DivideByZero(SplineError):
    code = 'E104'


class OutOfDomain(SplineError):
    code = 'E105'


class TensionOutOfRange(SplineError):
    code = 'E106'


class DegenerateErrors(SplineError):
    code = 'E107'


class DenseTooLarge(SplineError):
    code = 'E108'


class InvalidEndCondition(SplineError):
    code = 'E109'


class InvalidStudy(SplineError):
    code = 'E110'


class TensionTooLarge(SplineError):
    """Tridiagonal system lost diagonal dominance ("sufficiently small alpha" violated)"""
    code = 'E201'
    exit_code = 3

    def __init__(self, message: str, dominance_margin: float = float('nan')):
        super().__init__(message)
        self.dominance_margin = dominance_margin


class NotDominant(SplineError):
    code = 'E202'
    exit_code = 3

    def __init__(self, message: str, dominance_margin: float = float('nan')):
        super().__init__(message)
        self.dominance_margin = dominance_margin


class SingularLocalSystem(SplineError):
    code = 'E203'
    exit_code = 3


class Overflow(SplineError):
    code = 'E204'
    exit_code = 3


class SingularSystem(SplineError):
    code = 'E205'
    exit_code = 3

    def __init__(self, message: str, condition: float = float('inf')):
        super().__init__(message)
        self.condition = condition


# =============================================================================
# Domain Types
# =============================================================================

def _frozen_array(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Partition:
    """
    Strictly increasing nodes x_0 < ... < x_N

    Attributes:
        nodes: node abscissae
        widths: h_j = x_j - x_{j-1}, 1 <= j <= N
        hbar: max_j h_j
        mesh_ratio: hbar / min_j h_j
    """
    nodes: np.ndarray
    widths: np.ndarray
    hbar: float
    mesh_ratio: float

    @property
    def n_intervals(self) -> int:
        return len(self.widths)

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    def contains(self, x: ArrayLike) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= self.nodes[0]) & (x <= self.nodes[-1])))

    def locate(self, x: ArrayLike, side: str = 'right') -> np.ndarray:
        """
        Interval index (1..N) of each x

        side='right' assigns interior nodes to the piece on their right,
        side='left' to the piece on their left. Endpoints always map into
        the domain.
        """
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise OutOfDomain(f"x outside [{self.a!r}, {self.b!r}]")
        index = np.searchsorted(self.nodes, x, side=side)
        return np.clip(index, 1, self.n_intervals)


@dataclass(frozen=True)
class DataSet:
    """
    Ordinates aligned with a partition

    left_end/right_end carry y'_0, y'_N (Type I) or y''_0, y''_N (Type III).
    slopes carries y'_0..y'_N for Hermite fits.
    """
    values: np.ndarray
    left_end: Optional[float] = None
    right_end: Optional[float] = None
    slopes: Optional[np.ndarray] = None

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


class EndType(Enum):
    TYPE_I = 'I'
    TYPE_II = 'II'
    TYPE_III = 'III'

    @classmethod
    def parse(cls, token: Union[str, 'EndType']) -> 'EndType':
        if isinstance(token, EndType):
            return token
        key = str(token).strip().upper()
        for member in cls:
            if member.value == key or member.name == key:
                return member
        raise InvalidEndCondition(f"unknown end condition type: {token!r}")


@dataclass(frozen=True)
class EndCondition:
    """
    End condition of a k=2 fit

    Type I payloads are first derivatives, Type III payloads second
    derivatives; Type II carries none. With hyperbolic=True a second
    derivative payload constrains cosh(alpha x) * t rather than t itself
    (used when a tanh-family fit stands in for a polyhyperbolic one).
    """
    kind: EndType
    left: Optional[float] = None
    right: Optional[float] = None
    hyperbolic: bool = False

    def __post_init__(self):
        if self.kind is EndType.TYPE_II:
            if self.left is not None or self.right is not None:
                raise InvalidEndCondition("Type II end condition carries no payload")
            return
        for name in ('left', 'right'):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise NonFinite(f"end condition {name} payload must be finite")

    @classmethod
    def type_i(cls, left: float, right: float) -> 'EndCondition':
        return cls(EndType.TYPE_I, float(left), float(right))

    @classmethod
    def type_ii(cls) -> 'EndCondition':
        return cls(EndType.TYPE_II)

    @classmethod
    def type_iii(cls, left: float, right: float) -> 'EndCondition':
        return cls(EndType.TYPE_III, float(left), float(right))

    @property
    def needs_payload(self) -> bool:
        return self.kind is not EndType.TYPE_II

    def payload(self) -> tuple:
        """(left, right) with Type II mapped onto zero second derivatives"""
        if self.kind is EndType.TYPE_II:
            return 0.0, 0.0
        if self.left is None or self.right is None:
            raise InvalidEndCondition(f"Type {self.kind.value} end condition needs left and right payloads")
        return self.left, self.right

    def resolve(self, data: DataSet) -> 'EndCondition':
        """Fill a missing payload from the data set's end values"""
        if not self.needs_payload or (self.left is not None and self.right is not None):
            return self
        left = self.left if self.left is not None else data.left_end
        right = self.right if self.right is not None else data.right_end
        if left is None or right is None:
            raise InvalidEndCondition(f"Type {self.kind.value} end condition needs left and right payloads")
        return EndCondition(self.kind, float(left), float(right), self.hyperbolic)


@dataclass(frozen=True)
class TensionParam:
    """Tension alpha > 0, in inverse domain units"""
    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha <= 0.0:
            raise TensionOutOfRange(f"alpha must be a positive finite real, got {self.alpha!r}")

    def check(self, partition: Partition) -> 'TensionParam':
        reach = self.alpha * max(abs(partition.a), abs(partition.b))
        if reach > COSH_GUARD:
            raise Overflow(f"alpha*max|x| = {reach:.6g} exceeds {COSH_GUARD:g}")
        return self


def as_tension(alpha: Union[float, TensionParam]) -> TensionParam:
    if isinstance(alpha, TensionParam):
        return alpha
    return TensionParam(float(alpha))


# =============================================================================
# Constructors
# =============================================================================

def make_partition(nodes: Sequence[float]) -> Partition:
    """
    Build a Partition from node abscissae

    Raises:
        NonFinite: on NaN/Inf nodes
        NonMonotone: if any x_j <= x_{j-1}, or fewer than two nodes
    """
    x = np.asarray(nodes, dtype=float).ravel()
    if len(x) < 2:
        raise NonMonotone("a partition needs at least two nodes")
    if not np.all(np.isfinite(x)):
        raise NonFinite("partition nodes must be finite")
    widths = np.diff(x)
    if np.any(widths <= 0.0):
        j = int(np.argmax(widths <= 0.0)) + 1
        raise NonMonotone(f"nodes not strictly increasing at index {j}")
    hbar = float(np.max(widths))
    return Partition(
        nodes=_frozen_array(x),
        widths=_frozen_array(widths),
        hbar=hbar,
        mesh_ratio=hbar / float(np.min(widths)),
    )


def uniform_partition(a: float, b: float, n_intervals: int) -> Partition:
    return make_partition(np.linspace(a, b, n_intervals + 1))


def make_dataset(partition: Partition,
                 values: Sequence[float],
                 left_end: Optional[float] = None,
                 right_end: Optional[float] = None,
                 slopes: Optional[Sequence[float]] = None) -> DataSet:
    """
    Build a DataSet aligned with a partition

    Raises:
        LengthMismatch: values or slopes not of length N+1
        NonFinite: any non-finite entry
    """
    y = np.asarray(values, dtype=float).ravel()
    expected = len(partition.nodes)
    if len(y) != expected:
        raise LengthMismatch(f"expected {expected} values, got {len(y)}")
    if not np.all(np.isfinite(y)):
        raise NonFinite("data values must be finite")

    slope_array = None
    if slopes is not None:
        slope_array = np.asarray(slopes, dtype=float).ravel()
        if len(slope_array) != expected:
            raise LengthMismatch(f"expected {expected} slopes, got {len(slope_array)}")
        if not np.all(np.isfinite(slope_array)):
            raise NonFinite("slopes must be finite")
        slope_array = _frozen_array(slope_array)

    for name, value in (('left_end', left_end), ('right_end', right_end)):
        if value is not None and not math.isfinite(value):
            raise NonFinite(f"{name} must be finite")

    return DataSet(
        values=_frozen_array(y),
        left_end=None if left_end is None else float(left_end),
        right_end=None if right_end is None else float(right_end),
        slopes=slope_array,
    )


def as_dataset(partition: Partition, values) -> DataSet:
    if isinstance(values, DataSet):
        if len(values.values) != len(partition.nodes):
            raise LengthMismatch(f"expected {len(partition.nodes)} values, got {len(values.values)}")
        return values
    return make_dataset(partition, values)


# =============================================================================
# Stable Kernels
# =============================================================================

def _finish(result):
    if np.ndim(result) == 0:
        return float(result)
    return result


def log_cosh(x: ArrayLike):
    """log(cosh(x)) without overflow"""
    ax = np.abs(np.asarray(x, dtype=float))
    small = np.minimum(ax, LARGE_ARGUMENT)
    with np.errstate(over='ignore'):
        result = np.where(ax > LARGE_ARGUMENT,
                          ax + np.log1p(np.exp(-2.0 * ax)) - LN2,
                          np.log(np.cosh(small)))
    return _finish(result)


def cosh_ratio(a: ArrayLike, b: ArrayLike):
    """cosh(a)/cosh(b), via log space when either argument is large"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    large = np.maximum(np.abs(a), np.abs(b)) > LARGE_ARGUMENT
    direct = np.cosh(np.where(large, 0.0, a)) / np.cosh(np.where(large, 0.0, b))
    factored = np.exp(np.asarray(log_cosh(a)) - np.asarray(log_cosh(b)))
    return _finish(np.where(large, factored, direct))


def sech_squared(x: ArrayLike):
    """sech^2(x); underflows gracefully to zero"""
    x = np.asarray(x, dtype=float)
    large = np.abs(x) > LARGE_ARGUMENT
    direct = 1.0 / np.cosh(np.where(large, 0.0, x)) ** 2
    factored = np.exp(-2.0 * np.asarray(log_cosh(x)))
    return _finish(np.where(large, factored, direct))


def stable_sinh_ratio(a: ArrayLike, b: ArrayLike):
    """
    sinh(a)/sinh(b) without intermediate overflow

    For max(|a|,|b|) > 30 the exponent-factored form
    sign(a)sign(b) e^{|a|-|b|} (1-e^{-2|a|})/(1-e^{-2|b|}) is used.

    Raises:
        DivideByZero: if b == 0
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(b == 0.0):
        raise DivideByZero("sinh ratio with zero denominator argument")
    aa, ab = np.abs(a), np.abs(b)
    large = np.maximum(aa, ab) > LARGE_ARGUMENT
    direct = np.sinh(np.where(large, 0.0, a)) / np.sinh(np.where(large, 1.0, b))
    with np.errstate(over='ignore'):
        factored = (np.sign(a) * np.sign(b) * np.exp(aa - ab)
                    * np.expm1(-2.0 * aa) / np.expm1(-2.0 * ab))
    return _finish(np.where(large, factored, direct))


def stable_cosh_sinh_ratio(a: ArrayLike, b: ArrayLike):
    """
    cosh(a)/sinh(b) without intermediate overflow

    Raises:
        DivideByZero: if b == 0
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(b == 0.0):
        raise DivideByZero("cosh/sinh ratio with zero denominator argument")
    aa, ab = np.abs(a), np.abs(b)
    large = np.maximum(aa, ab) > LARGE_ARGUMENT
    direct = np.cosh(np.where(large, 0.0, a)) / np.sinh(np.where(large, 1.0, b))
    with np.errstate(over='ignore'):
        factored = (np.sign(b) * np.exp(aa - ab)
                    * (1.0 + np.exp(-2.0 * aa)) / -np.expm1(-2.0 * ab))
    return _finish(np.where(large, factored, direct))


def tanh_diff(A: ArrayLike, B: ArrayLike):
    """
    tanh(A) - tanh(B) via sinh(A-B)/(cosh(A)cosh(B))

    The cosh product moves to log space when |A|+|B| > 30. There the
    linear parts of the logs are combined first, |A-B| - |A| - |B|, so the
    exponent does not carry the rounding of two large logarithms.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    d = A - B
    aa, ab, ad = np.abs(A), np.abs(B), np.abs(d)
    large = (aa + ab) > LARGE_ARGUMENT
    direct = np.sinh(np.where(large, 0.0, d)) / (
        np.cosh(np.where(large, 0.0, A)) * np.cosh(np.where(large, 0.0, B)))
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        exponent = ((ad - aa - ab) + LN2 + np.log(-np.expm1(-2.0 * ad))
                    - np.log1p(np.exp(-2.0 * aa)) - np.log1p(np.exp(-2.0 * ab)))
        factored = np.sign(d) * np.exp(exponent)
    factored = np.where(d == 0.0, 0.0, factored)
    return _finish(np.where(large, factored, direct))


def divided_difference(x0: ArrayLike, x1: ArrayLike, y0: ArrayLike, y1: ArrayLike):
    """
    (y1 - y0)/(x1 - x0)

    Raises:
        DivideByZero: if x0 == x1
    """
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    if np.any(x0 == x1):
        raise DivideByZero("divided difference over coincident abscissae")
    return _finish((np.asarray(y1, dtype=float) - np.asarray(y0, dtype=float)) / (x1 - x0))


def sinhc(z: ArrayLike):
    """sinh(z)/z, equal to 1 at z = 0"""
    z = np.asarray(z, dtype=float)
    safe = np.where(z == 0.0, 1.0, z)
    with np.errstate(over='ignore'):
        result = np.where(z == 0.0, 1.0, np.sinh(safe) / safe)
    return _finish(result)


# -----------------------------------------------------------------------------
# Small-argument series kernels
#
# Each kernel below is a ratio whose numerator cancels to high order at z=0.
# For |z| < SERIES_RADIUS the Maclaurin series is summed instead.
# -----------------------------------------------------------------------------

def _series_coefficients(term, count: int = 10) -> np.ndarray:
    return np.array([term(n) for n in range(count)], dtype=float)


# (z cosh z - sinh z)/z^3 = sum_{n>=1} 2n z^{2n-2} / (2n+1)!
_KERNEL_E_SERIES = _series_coefficients(
    lambda n: 2.0 * (n + 1) / math.factorial(2 * n + 3))

# (sinh z cosh z - z)/z^3 = sum_{n>=1} 4^n z^{2n-2} / (2n+1)!
_KERNEL_B_SERIES = _series_coefficients(
    lambda n: 4.0 ** (n + 1) / math.factorial(2 * n + 3))

# (sinh^2 z - z^2)/z^4 = sum_{n>=2} 2^{2n-1} z^{2n-4} / (2n)!
_KERNEL_C_SERIES = _series_coefficients(
    lambda n: 2.0 ** (2 * n + 3) / math.factorial(2 * n + 4))


def _sum_even_series(coefficients: np.ndarray, z: np.ndarray) -> np.ndarray:
    z2 = z * z
    result = np.zeros_like(z)
    for c in coefficients[::-1]:
        result = result * z2 + c
    return result


def _series_kernel(z, coefficients, direct):
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < SERIES_RADIUS
    safe = np.where(small, 1.0, z)
    with np.errstate(over='ignore', invalid='ignore'):
        result = np.where(small, _sum_even_series(coefficients, z), direct(safe))
    return _finish(result)


def kernel_e(z: ArrayLike):
    """(z cosh z - sinh z)/z^3, leading term 1/3"""
    return _series_kernel(z, _KERNEL_E_SERIES,
                          lambda w: (w * np.cosh(w) - np.sinh(w)) / w ** 3)


def kernel_b(z: ArrayLike):
    """(sinh z cosh z - z)/z^3, leading term 2/3"""
    return _series_kernel(z, _KERNEL_B_SERIES,
                          lambda w: (np.sinh(w) * np.cosh(w) - w) / w ** 3)


def kernel_c(z: ArrayLike):
    """(sinh^2 z - z^2)/z^4, leading term 1/3"""
    return _series_kernel(z, _KERNEL_C_SERIES,
                          lambda w: (np.sinh(w) ** 2 - w * w) / w ** 4)


# =============================================================================
# Shared helpers
# =============================================================================

def data_scale(*arrays) -> float:
    """1 + sum of sup-norms, the tolerance scale used across the package"""
    total = 1.0
    for array in arrays:
        if array is not None and np.size(array):
            total += float(np.max(np.abs(array)))
    return total


def composite_grid(partition: Partition, per_interval: int) -> np.ndarray:
    """per_interval equispaced samples in every interval, all nodes included"""
    if per_interval < 1:
        raise InvalidStudy("samples per interval must be positive")
    fractions = np.arange(per_interval) / per_interval
    left = partition.nodes[:-1, None]
    grid = left + partition.widths[:, None] * fractions[None, :]
    return np.concatenate([grid.ravel(), partition.nodes[-1:]])


def cubic_piece(coefficients: np.ndarray, u: np.ndarray, deriv: int = 0) -> np.ndarray:
    """
    Evaluate local cubics c0 + c1 u + c2 u^2 + c3 u^3 (or a derivative)

    coefficients has shape (..., 4) aligned with u.
    """
    c0, c1, c2, c3 = (coefficients[..., k] for k in range(4))
    if deriv == 0:
        return c0 + u * (c1 + u * (c2 + u * c3))
    if deriv == 1:
        return c1 + u * (2.0 * c2 + 3.0 * c3 * u)
    if deriv == 2:
        return 2.0 * c2 + 6.0 * c3 * u
    if deriv == 3:
        return 6.0 * c3 + 0.0 * u
    return np.zeros_like(u)
