#!/usr/bin/env python3
"""
Cubic Reference Module

Classical interpolants used as alpha -> 0 limits and error baselines:
linear spline, C2 cubic spline (end Types I/II/III), C1 cubic Hermite, and
Fritsch-Carlson monotone slope selection.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from spline_core import (
    DataSet, EndCondition, EndType, LengthMismatch, Partition,
    as_dataset, cubic_piece,
)
from spline_k2 import TridiagonalSystem, thomas_solve


logger = logging.getLogger(__name__)

# Fritsch-Carlson: (m_{j-1}/D_j, m_j/D_j) kept inside the circle of this radius
MONOTONE_RADIUS = 3.0

# Shrink factor keeping slopes strictly inside the monotone region
STRICT_INTERIOR = 0.9


# =============================================================================
# Types
# =============================================================================

@dataclass(frozen=True)
class LinearSpline:
    """Piecewise-linear interpolant l[Y]"""
    partition: Partition
    values: np.ndarray

    @property
    def order(self) -> int:
        return 1

    @property
    def max_derivative(self) -> int:
        return 1

    def evaluate(self, x, deriv: int = 0):
        return eval_linear(self, x, deriv)

    def to_records(self) -> list:
        nodes = self.partition.nodes
        return [{'interval': j, 'x0': float(nodes[j - 1]), 'x1': float(nodes[j]),
                 'representation': 'linear',
                 'y0': float(self.values[j - 1]), 'y1': float(self.values[j])}
                for j in range(1, len(nodes))]


@dataclass(frozen=True)
class CubicSpline:
    """
    Piecewise cubic in local coordinates u = x - x_{j-1}

    pieces[j-1] = (c0, c1, c2, c3); smoothness is 'C2' for spline fits and
    'C1' for Hermite fits.
    """
    partition: Partition
    pieces: np.ndarray
    smoothness: str = 'C2'

    @property
    def order(self) -> int:
        return 2

    @property
    def max_derivative(self) -> int:
        return 3

    def evaluate(self, x, deriv: int = 0):
        return eval_cubic(self, x, deriv)

    def to_records(self) -> list:
        nodes = self.partition.nodes
        return [{'interval': j, 'x0': float(nodes[j - 1]), 'x1': float(nodes[j]),
                 'representation': 'cubic_local',
                 'c0': float(c[0]), 'c1': float(c[1]),
                 'c2': float(c[2]), 'c3': float(c[3])}
                for j, c in enumerate(self.pieces, start=1)]


# =============================================================================
# Linear
# =============================================================================

def fit_linear(partition: Partition, values: Union[DataSet, np.ndarray]) -> LinearSpline:
    data = as_dataset(partition, values)
    return LinearSpline(partition=partition, values=data.values)


def eval_linear(spline: LinearSpline, x, deriv: int = 0):
    """Value or slope; interior nodes take the left piece, higher derivatives are 0"""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    j = spline.partition.locate(x, side='left')
    u0 = spline.partition.nodes[j - 1]
    h = spline.partition.widths[j - 1]
    y0 = spline.values[j - 1]
    slope = (spline.values[j] - y0) / h
    if deriv == 0:
        result = y0 + slope * (x - u0)
    elif deriv == 1:
        result = slope
    else:
        result = np.zeros_like(x)
    if scalar:
        return float(result[0])
    return result


# =============================================================================
# Cubic spline
# =============================================================================

def assemble_cubic_system(partition: Partition,
                          values: Union[DataSet, np.ndarray],
                          end: EndCondition) -> TridiagonalSystem:
    """
    Second-derivative system of the C2 cubic spline

    Rows match the alpha -> 0 limits of the tanh system: h_j/6,
    (h_j + h_{j+1})/3, h_{j+1}/6. The hyperbolic flag has no meaning here.
    """
    data = as_dataset(partition, values)
    end = end.resolve(data)
    h = partition.widths
    slopes = np.diff(data.values) / h
    n_int = partition.n_intervals

    sub = np.zeros(n_int)
    diag = np.zeros(n_int + 1)
    sup = np.zeros(n_int)
    rhs = np.zeros(n_int + 1)

    sub[:-1] = h[:-1] / 6.0
    diag[1:-1] = (h[:-1] + h[1:]) / 3.0
    sup[1:] = h[1:] / 6.0
    rhs[1:-1] = slopes[1:] - slopes[:-1]

    left, right = end.payload()
    if end.kind is EndType.TYPE_I:
        diag[0] = h[0] / 3.0
        sup[0] = h[0] / 6.0
        rhs[0] = slopes[0] - left
        sub[-1] = h[-1] / 6.0
        diag[-1] = h[-1] / 3.0
        rhs[-1] = right - slopes[-1]
    else:
        diag[0] = 1.0
        rhs[0] = left
        diag[-1] = 1.0
        rhs[-1] = right

    return TridiagonalSystem(sub=sub, diag=diag, sup=sup, rhs=rhs)


def fit_cubic(partition: Partition,
              values: Union[DataSet, np.ndarray],
              end: EndCondition) -> CubicSpline:
    """C2 cubic spline sigma[Y] with the given end condition"""
    data = as_dataset(partition, values)
    moments = thomas_solve(assemble_cubic_system(partition, data, end))
    h = partition.widths
    y = data.values
    slopes = np.diff(y) / h
    m0, m1 = moments[:-1], moments[1:]
    pieces = np.column_stack([
        y[:-1],
        slopes - h * (2.0 * m0 + m1) / 6.0,
        m0 / 2.0,
        (m1 - m0) / (6.0 * h),
    ])
    return CubicSpline(partition=partition, pieces=pieces, smoothness='C2')


def hermite_pieces(partition: Partition, values: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Local cubic coefficients matching value and slope at both ends of every interval"""
    h = partition.widths
    delta = np.diff(values) / h
    m0, m1 = slopes[:-1], slopes[1:]
    return np.column_stack([
        values[:-1],
        m0,
        (3.0 * delta - 2.0 * m0 - m1) / h,
        (m0 + m1 - 2.0 * delta) / (h * h),
    ])


def resolve_slopes(partition: Partition, data: DataSet, slopes) -> np.ndarray:
    if slopes is None:
        slopes = data.slopes
    if slopes is None:
        raise LengthMismatch("Hermite fit needs a slope vector")
    slopes = np.asarray(slopes, dtype=float).ravel()
    if len(slopes) != len(partition.nodes):
        raise LengthMismatch(f"expected {len(partition.nodes)} slopes, got {len(slopes)}")
    return slopes


def fit_cubic_hermite(partition: Partition,
                      values: Union[DataSet, np.ndarray],
                      slopes: Optional[np.ndarray] = None) -> CubicSpline:
    """C1 cubic Hermite interpolant; slopes default to the data set's slope vector"""
    data = as_dataset(partition, values)
    slopes = resolve_slopes(partition, data, slopes)
    return CubicSpline(partition=partition,
                       pieces=hermite_pieces(partition, data.values, slopes),
                       smoothness='C1')


def eval_cubic(spline: CubicSpline, x, deriv: int = 0):
    """Value or derivative 0..3; interior nodes take the right piece"""
    if deriv not in (0, 1, 2, 3):
        raise ValueError(f"cubic splines support deriv 0..3, got {deriv}")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    j = spline.partition.locate(x, side='right')
    u = x - spline.partition.nodes[j - 1]
    result = cubic_piece(spline.pieces[j - 1], u, deriv)
    if scalar:
        return float(result[0])
    return result


# =============================================================================
# Monotone slopes
# =============================================================================

def monotone_slopes(partition: Partition,
                    values: Union[DataSet, np.ndarray],
                    strictness: float = STRICT_INTERIOR) -> np.ndarray:
    """
    Fritsch-Carlson slopes for a monotone cubic Hermite interpolant

    Start from averaged divided differences (zero at local extrema), zero
    both slopes on flat intervals, then scale (m_{j-1}, m_j)/D_j back into a
    circle of radius 3*strictness wherever it lies outside.
    """
    data = as_dataset(partition, values)
    delta = np.diff(data.values) / partition.widths
    n = len(data.values)

    slopes = np.zeros(n)
    slopes[0] = delta[0]
    slopes[-1] = delta[-1]
    if n > 2:
        left, right = delta[:-1], delta[1:]
        same_sign = left * right > 0.0
        slopes[1:-1] = np.where(same_sign, 0.5 * (left + right), 0.0)

    radius = MONOTONE_RADIUS * strictness
    for j, d in enumerate(delta):
        if d == 0.0:
            slopes[j] = 0.0
            slopes[j + 1] = 0.0
            continue
        a = slopes[j] / d
        b = slopes[j + 1] / d
        if a < 0.0:
            slopes[j] = 0.0
            a = 0.0
        if b < 0.0:
            slopes[j + 1] = 0.0
            b = 0.0
        norm = np.hypot(a, b)
        if norm > radius:
            tau = radius / norm
            slopes[j] = tau * a * d
            slopes[j + 1] = tau * b * d
    logger.debug("Monotone slopes: %s", slopes)
    return slopes
