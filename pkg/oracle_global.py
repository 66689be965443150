#!/usr/bin/env python3
"""
Dense Global Oracle Module

Independent reference for the k=2 polyhyperbolic fit: one dense system over
all 4N exponential coefficients, solved with partial pivoting. It never
touches the tridiagonal machinery, which makes it a cross-check for it.

Row layout (same order as the classic listing):
    N rows   interpolation at the left end of each interval
    N rows   interpolation at the right end of each interval
    N-1 rows first-derivative continuity at interior nodes
    N-1 rows second-derivative continuity at interior nodes
    2 rows   end conditions
"""

import logging
import warnings
from dataclasses import dataclass
from typing import List, Union

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from spline_core import (
    DataSet, DenseTooLarge, EndCondition, EndType, NonFinite, Partition,
    SingularSystem, TensionParam, as_dataset, as_tension,
)
from spline_k2 import ExpSpline2


logger = logging.getLogger(__name__)

MAX_DENSE_INTERVALS = 200
PIVOT_FLOOR = 1e-13

BASIS_LOCAL = 'local'
BASIS_GLOBAL = 'global'


@dataclass(frozen=True)
class DenseAssembly:
    matrix: np.ndarray
    rhs: np.ndarray
    row_kinds: List[str]

    def count(self, kind: str) -> int:
        return sum(1 for k in self.row_kinds if k == kind)


def _basis_row(alpha: float, z: float, deriv: int) -> np.ndarray:
    """
    Derivative `deriv` of [e^{-az}, z e^{-az}, e^{az}, z e^{az}] at z
    """
    em = np.exp(-alpha * z)
    ep = np.exp(alpha * z)
    if deriv == 0:
        return np.array([em, z * em, ep, z * ep])
    if deriv == 1:
        return np.array([-alpha * em, (1.0 - alpha * z) * em,
                         alpha * ep, (1.0 + alpha * z) * ep])
    return np.array([alpha * alpha * em, (alpha * alpha * z - 2.0 * alpha) * em,
                     alpha * alpha * ep, (alpha * alpha * z + 2.0 * alpha) * ep])


def assemble_global_system(partition: Partition,
                           values: Union[DataSet, np.ndarray],
                           alpha: Union[float, TensionParam],
                           end: EndCondition,
                           basis: str = BASIS_LOCAL) -> DenseAssembly:
    """
    Dense 4N x 4N system for the exponential coefficients

    basis='local' uses z = x - x_{j-1} on interval j; basis='global' uses
    z = x throughout.

    Raises:
        DenseTooLarge: N > MAX_DENSE_INTERVALS
    """
    n_int = partition.n_intervals
    if n_int > MAX_DENSE_INTERVALS:
        raise DenseTooLarge(f"dense oracle limited to {MAX_DENSE_INTERVALS} intervals, got {n_int}")
    if basis not in (BASIS_LOCAL, BASIS_GLOBAL):
        raise ValueError(f"unknown basis: {basis}")

    a = as_tension(alpha).check(partition).alpha
    data = as_dataset(partition, values)
    end = end.resolve(data)
    x = partition.nodes
    y = data.values

    def at(j: int, node: float, deriv: int) -> np.ndarray:
        origin = x[j - 1] if basis == BASIS_LOCAL else 0.0
        return _basis_row(a, node - origin, deriv)

    size = 4 * n_int
    matrix = np.zeros((size, size))
    rhs = np.zeros(size)
    kinds = []
    row = 0

    def block(j: int) -> slice:
        return slice(4 * (j - 1), 4 * j)

    for j in range(1, n_int + 1):
        matrix[row, block(j)] = at(j, x[j - 1], 0)
        rhs[row] = y[j - 1]
        kinds.append('interpolation')
        row += 1
    for j in range(1, n_int + 1):
        matrix[row, block(j)] = at(j, x[j], 0)
        rhs[row] = y[j]
        kinds.append('interpolation')
        row += 1
    for deriv in (1, 2):
        for j in range(1, n_int):
            matrix[row, block(j)] = at(j, x[j], deriv)
            matrix[row, block(j + 1)] = -at(j + 1, x[j], deriv)
            kinds.append('continuity')
            row += 1

    left, right = end.payload()
    end_deriv = 1 if end.kind is EndType.TYPE_I else 2
    matrix[row, block(1)] = at(1, x[0], end_deriv)
    rhs[row] = left
    matrix[row + 1, block(n_int)] = at(n_int, x[-1], end_deriv)
    rhs[row + 1] = right
    kinds.extend(['end', 'end'])

    return DenseAssembly(matrix=matrix, rhs=rhs, row_kinds=kinds)


def dense_solve(matrix, rhs) -> np.ndarray:
    """
    LU with partial pivoting

    Raises:
        NonFinite: non-finite entries
        SingularSystem: a pivot below 1e-13 times its row scale
    """
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"dense_solve needs a square matrix, got shape {matrix.shape}")
    if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(rhs))):
        raise NonFinite("dense system has non-finite entries")

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        lu, piv = lu_factor(matrix)

    order = np.arange(matrix.shape[0])
    for i, p in enumerate(piv):
        order[i], order[p] = order[p], order[i]
    row_scale = np.max(np.abs(matrix), axis=1)[order]
    pivots = np.abs(np.diag(lu))
    weak = pivots < PIVOT_FLOOR * row_scale
    if np.any(weak) or np.any(row_scale == 0.0):
        condition = float(np.linalg.cond(matrix))
        raise SingularSystem(f"pivot below floor at row {int(np.argmax(weak))} "
                             f"(condition {condition:.3g})", condition=condition)
    return lu_solve((lu, piv), rhs)


def _global_to_local(pieces: np.ndarray, alpha: float, origins: np.ndarray) -> np.ndarray:
    a, b, c, d = pieces.T
    em = np.exp(-alpha * origins)
    ep = np.exp(alpha * origins)
    return np.column_stack([(a + b * origins) * em, b * em,
                            (c + d * origins) * ep, d * ep])


def fit_s2_global(partition: Partition,
                  values: Union[DataSet, np.ndarray],
                  alpha: Union[float, TensionParam],
                  end: EndCondition,
                  basis: str = BASIS_LOCAL) -> ExpSpline2:
    """Polyhyperbolic C2 fit from the dense system"""
    assembly = assemble_global_system(partition, values, alpha, end, basis=basis)
    a = as_tension(alpha).alpha
    solution = dense_solve(assembly.matrix, assembly.rhs)
    pieces = solution.reshape(partition.n_intervals, 4)
    if basis == BASIS_GLOBAL:
        pieces = _global_to_local(pieces, a, partition.nodes[:-1])
    logger.debug("Dense oracle solved %d unknowns (%s basis)", len(solution), basis)
    return ExpSpline2.from_pieces(a, partition, pieces)
