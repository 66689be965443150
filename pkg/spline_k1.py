#!/usr/bin/env python3
"""
First-Order Spline Module

Closed-form k=1 interpolants. On [x_{j-1}, x_j]:

    S family: s(x) = sinh(a(x_j - x))/sinh(a h_j) y_{j-1} + sinh(a(x - x_{j-1}))/sinh(a h_j) y_j
    T family: t(x) = y_{j-1} + (y_j - y_{j-1}) (tanh(ax) - tanh(ax_{j-1}))/(tanh(ax_j) - tanh(ax_{j-1}))

Both forms are barycentric in the node values, so a Spline1 stores the
values and a family tag and evaluates its weights on demand.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from spline_core import (
    DataSet, OutOfDomain, Partition, TensionParam,
    as_dataset, as_tension, sech_squared, stable_cosh_sinh_ratio,
    stable_sinh_ratio, tanh_diff,
)


logger = logging.getLogger(__name__)

FAMILY_S = 'S'
FAMILY_T = 'T'


@dataclass(frozen=True)
class Spline1:
    """C0 first-order interpolant of family S (sinh weights) or T (tanh weights)"""
    family: str
    alpha: float
    partition: Partition
    values: np.ndarray

    @property
    def order(self) -> int:
        return 1

    @property
    def max_derivative(self) -> int:
        return 1

    def evaluate(self, x, deriv: int = 0):
        return eval1(self, x, deriv)

    def to_records(self) -> list:
        """Per-interval coefficient records for the coefficient dump"""
        nodes = self.partition.nodes
        return [
            {
                'interval': j,
                'x0': float(nodes[j - 1]),
                'x1': float(nodes[j]),
                'representation': 'sinh_weights' if self.family == FAMILY_S else 'tanh_weights',
                'y0': float(self.values[j - 1]),
                'y1': float(self.values[j]),
            }
            for j in range(1, len(nodes))
        ]


def _fit(family: str, partition: Partition, values, alpha) -> Spline1:
    tension = as_tension(alpha).check(partition)
    data = as_dataset(partition, values)
    logger.debug("k=1 %s fit: N=%d alpha=%g", family, partition.n_intervals, tension.alpha)
    return Spline1(family=family, alpha=tension.alpha, partition=partition, values=data.values)


def fit_s1(partition: Partition, values: Union[DataSet, np.ndarray],
           alpha: Union[float, TensionParam]) -> Spline1:
    """
    Fit the sinh-weighted k=1 interpolant

    Raises:
        LengthMismatch: values not aligned with the partition
        TensionOutOfRange: alpha not positive
    """
    return _fit(FAMILY_S, partition, values, alpha)


def fit_t1(partition: Partition, values: Union[DataSet, np.ndarray],
           alpha: Union[float, TensionParam]) -> Spline1:
    """Fit the tanh-weighted k=1 interpolant (reproduces constants)"""
    return _fit(FAMILY_T, partition, values, alpha)


def eval1(spline: Spline1, x, deriv: int = 0):
    """
    Evaluate a k=1 spline or its first derivative

    Interior nodes take the left piece (the spline is only C0 there). At
    nodes deriv 0 returns the stored value exactly.

    Raises:
        OutOfDomain: x outside [x_0, x_N]
        ValueError: deriv not in {0, 1}
    """
    if deriv not in (0, 1):
        raise ValueError(f"k=1 splines support deriv 0 or 1, got {deriv}")

    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    partition = spline.partition
    if not partition.contains(x):
        raise OutOfDomain(f"x outside [{partition.a!r}, {partition.b!r}]")

    j = partition.locate(x, side='left')
    u0 = partition.nodes[j - 1]
    u1 = partition.nodes[j]
    y0 = spline.values[j - 1]
    y1 = spline.values[j]
    a = spline.alpha

    if spline.family == FAMILY_S:
        h = u1 - u0
        if deriv == 0:
            result = (y0 * np.asarray(stable_sinh_ratio(a * (u1 - x), a * h))
                      + y1 * np.asarray(stable_sinh_ratio(a * (x - u0), a * h)))
        else:
            result = a * (y1 * np.asarray(stable_cosh_sinh_ratio(a * (x - u0), a * h))
                          - y0 * np.asarray(stable_cosh_sinh_ratio(a * (u1 - x), a * h)))
    else:
        span = np.asarray(tanh_diff(a * u1, a * u0))
        if deriv == 0:
            result = y0 + (y1 - y0) * np.asarray(tanh_diff(a * x, a * u0)) / span
        else:
            result = (y1 - y0) * a * np.asarray(sech_squared(a * x)) / span

    if deriv == 0:
        at_node = np.searchsorted(partition.nodes, x, side='left')
        at_node = np.minimum(at_node, len(partition.nodes) - 1)
        hit = partition.nodes[at_node] == x
        result = np.where(hit, spline.values[at_node], result)

    if scalar:
        return float(result[0])
    return result
