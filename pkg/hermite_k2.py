#!/usr/bin/env python3
"""
Hermite Polyhyperbolic Module

C1 Hermite interpolation in the span of {e^{-au}, u e^{-au}, e^{au}, u e^{au}}
matching value and slope at both ends of every interval, plus sampling-based
shape verification and the alpha-halving search that makes a fit inherit
the shape of its data.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from cubic_ref import resolve_slopes
from spline_core import (
    DataSet, InvalidStudy, Partition, SingularLocalSystem, TensionParam,
    as_dataset, as_tension, composite_grid, divided_difference,
)
from spline_k2 import CUBIC_LIMIT_THRESHOLD, ExpSpline2, interval_weights


logger = logging.getLogger(__name__)

# Below this alpha*h an interval is reported as its cubic Hermite limit
HERMITE_LIMIT_THRESHOLD = CUBIC_LIMIT_THRESHOLD

MIN_RESOLUTION = 64
DEFAULT_RESOLUTION = 2048
MAX_HALVINGS = 60

SHAPE_PROPERTIES = ('positive', 'monotone_up', 'monotone_down', 'convex')


@dataclass(frozen=True)
class ShapeReport:
    """Outcome of a sampled shape check; witness is the first violating x"""
    property: str
    holds: bool
    witness: Optional[float]
    resolution: int
    worst: float

    def to_dict(self) -> dict:
        return {
            'property': self.property,
            'holds': self.holds,
            'witness': self.witness,
            'resolution': self.resolution,
            'worst': self.worst,
        }


@dataclass(frozen=True)
class ShapeSearchResult:
    found: bool
    alpha: float
    halvings: int
    report: ShapeReport
    stopped_early: bool = False

    def to_dict(self) -> dict:
        return {
            'found': self.found,
            'alpha': self.alpha,
            'halvings': self.halvings,
            'stopped_early': self.stopped_early,
            'report': self.report.to_dict(),
        }


# =============================================================================
# Fitting
# =============================================================================

def fit_hermite_s2(partition: Partition,
                   values: Union[DataSet, np.ndarray],
                   slopes: Optional[np.ndarray],
                   alpha: Union[float, TensionParam]) -> ExpSpline2:
    """
    Local Hermite polyhyperbolic fit

    Each interval solves a 2x2 for g = s'' - a^2 s at its ends from the
    end-slope weights of the node form:

        mu g0 + nu g1 = w D - tau y0 - m0
        nu g0 + mu g1 = m1 - w D - tau y1

    mu > nu for every alpha h, and the weights tend to the cubic Hermite
    ones as alpha h -> 0. Intervals with alpha h below
    HERMITE_LIMIT_THRESHOLD are written out as cubic pieces.
    """
    tension = as_tension(alpha).check(partition)
    data = as_dataset(partition, values)
    slopes = resolve_slopes(partition, data, slopes)
    a = tension.alpha
    x = partition.nodes
    y0, y1 = data.values[:-1], data.values[1:]
    m0, m1 = slopes[:-1], slopes[1:]

    weights = interval_weights(partition.widths, a)
    wd = weights.w * np.asarray(divided_difference(x[:-1], x[1:], y0, y1))
    r0 = wd - weights.tau * y0 - m0
    r1 = m1 - wd - weights.tau * y1
    mu, nu = weights.mu, weights.nu
    det = (mu - nu) * (mu + nu)
    if np.any(~np.isfinite(det)) or np.any(det <= 0.0):
        raise SingularLocalSystem("local Hermite system singular")

    g0 = (mu * r0 - nu * r1) / det
    g1 = (mu * r1 - nu * r0) / det
    spline = ExpSpline2(alpha=a, partition=partition,
                        ends=np.column_stack([y0, y1, g0, g1]), smoothness='C1')
    if np.any(spline.limit_mask):
        logger.debug("%d of %d intervals at the cubic Hermite limit",
                     int(np.sum(spline.limit_mask)), partition.n_intervals)
    return spline


# =============================================================================
# Shape checks
# =============================================================================

def data_has_property(values, prop: str) -> bool:
    """Whether node data themselves carry the claimed shape"""
    y = np.asarray(values, dtype=float)
    if prop == 'positive':
        return bool(np.all(y >= 0.0))
    if prop == 'monotone_up':
        return bool(np.all(np.diff(y) >= 0.0))
    if prop == 'monotone_down':
        return bool(np.all(np.diff(y) <= 0.0))
    if prop == 'convex':
        return bool(np.all(np.diff(y, 2) >= 0.0))
    raise InvalidStudy(f"unknown shape property: {prop}")


def shape_check(spline, prop: str, resolution: int = DEFAULT_RESOLUTION) -> ShapeReport:
    """
    Sample a spline for positivity, monotonicity or convexity

    Samples `resolution` points per interval plus every node. Violations are
    counted beyond 1e-12 * (1 + max|s|).
    """
    if prop not in SHAPE_PROPERTIES:
        raise InvalidStudy(f"unknown shape property: {prop}")
    if resolution < MIN_RESOLUTION:
        raise InvalidStudy(f"resolution must be >= {MIN_RESOLUTION}")

    grid = composite_grid(spline.partition, resolution)
    values = np.asarray(spline.evaluate(grid, 0))
    tolerance = 1e-12 * (1.0 + float(np.max(np.abs(values))))

    if prop == 'positive':
        quantity = values
    elif prop == 'monotone_up':
        quantity = np.asarray(spline.evaluate(grid, 1))
    elif prop == 'monotone_down':
        quantity = -np.asarray(spline.evaluate(grid, 1))
    else:
        quantity = np.asarray(spline.evaluate(grid, 2))

    violated = quantity < -tolerance
    witness = float(grid[np.argmax(violated)]) if np.any(violated) else None
    return ShapeReport(property=prop, holds=witness is None, witness=witness,
                       resolution=resolution, worst=float(np.min(quantity)))


def find_shape_preserving_alpha(partition: Partition,
                                values: Union[DataSet, np.ndarray],
                                slopes: Optional[np.ndarray],
                                prop: str,
                                alpha0: float = 1.0,
                                resolution: int = DEFAULT_RESOLUTION,
                                max_halvings: int = MAX_HALVINGS) -> ShapeSearchResult:
    """
    Halve alpha from alpha0 until the Hermite fit passes shape_check

    Stops early once every interval sits at its cubic limit, since further
    halving cannot change the fit.
    """
    alpha = float(alpha0)
    report = None
    for halvings in range(max_halvings + 1):
        spline = fit_hermite_s2(partition, values, slopes, alpha)
        report = shape_check(spline, prop, resolution)
        logger.info("Shape search: alpha=%g %s", alpha, 'holds' if report.holds else f'fails at {report.witness}')
        if report.holds:
            return ShapeSearchResult(found=True, alpha=alpha, halvings=halvings, report=report)
        if spline.all_limit:
            return ShapeSearchResult(found=False, alpha=alpha, halvings=halvings,
                                     report=report, stopped_early=True)
        if halvings < max_halvings:
            alpha *= 0.5
    return ShapeSearchResult(found=False, alpha=alpha, halvings=max_halvings, report=report)
