#!/usr/bin/env python3
"""
Convergence Study Module

Empirical rate measurement:
- h-refinement studies (uniform N doubling) against the k=1 rate h^2 and
  the k=2 rates h^{4-i}
- alpha-sweep studies measuring how fast a tension family approaches its
  polynomial limit

Orders are log2 ratios of consecutive sup-errors, summarised by the median
with the coarsest step dropped.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from cubic_ref import fit_cubic, fit_cubic_hermite, fit_linear
from hermite_k2 import fit_hermite_s2
from spline_core import (
    DataSet, DegenerateErrors, EndCondition, EndType, InvalidStudy, Partition,
    composite_grid, make_dataset, uniform_partition,
)
from spline_k1 import fit_s1, fit_t1
from spline_k2 import fit_s2, fit_t2


logger = logging.getLogger(__name__)

ERROR_FLOOR = 1e-14
EXACT_TOLERANCE = 1e-10
MIN_SAMPLES = 100

FIRST_ORDER_FAMILIES = ('s1', 't1', 'linear')

# Half-widths of the pass band around the expected order
ORDER_TOLERANCES = {'first_order': 0.15, 'fourth_order': 0.25, 'derivative': 0.3}
HERMITE_FAMILIES = ('hermite', 'cubic_hermite')
FAMILIES = ('s1', 't1', 's2', 't2', 'cubic', 'hermite', 'linear', 'cubic_hermite')

LIMIT_FAMILY = {
    's1': 'linear', 't1': 'linear', 'linear': 'linear',
    's2': 'cubic', 't2': 'cubic', 'cubic': 'cubic',
    'hermite': 'cubic_hermite', 'cubic_hermite': 'cubic_hermite',
}


# =============================================================================
# Reference functions
# =============================================================================

@dataclass(frozen=True)
class ReferenceFunction:
    """A test function with analytic derivatives up to order 3"""
    name: str
    derivatives: Tuple[Callable, ...]
    interval: Tuple[float, float]

    def __call__(self, x):
        return self.derivatives[0](x)

    def derivative(self, order: int) -> Callable:
        return self.derivatives[order]


def _runge(x):
    return 1.0 / (1.0 + x * x)


def _runge_d1(x):
    return -2.0 * x / (1.0 + x * x) ** 2


def _runge_d2(x):
    return (6.0 * x * x - 2.0) / (1.0 + x * x) ** 3


def _runge_d3(x):
    return 24.0 * x * (1.0 - x * x) / (1.0 + x * x) ** 4


REFERENCE_FUNCTIONS: Dict[str, ReferenceFunction] = {
    'sin': ReferenceFunction('sin', (np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)),
                             (0.0, math.pi)),
    'exp': ReferenceFunction('exp', (np.exp, np.exp, np.exp, np.exp), (0.0, 1.0)),
    'runge': ReferenceFunction('runge', (_runge, _runge_d1, _runge_d2, _runge_d3), (-2.0, 2.0)),
}


def get_reference_function(name: str) -> ReferenceFunction:
    try:
        return REFERENCE_FUNCTIONS[name]
    except KeyError:
        raise InvalidStudy(f"unknown test function: {name!r} "
                           f"(known: {', '.join(sorted(REFERENCE_FUNCTIONS))})") from None


# =============================================================================
# Report
# =============================================================================

@dataclass
class ConvergenceReport:
    """
    Errors per level and the orders fitted to them

    parameter is 'h' for refinement studies and 'alpha' for limit studies.
    criterion 'band' passes when |summary - target| <= tolerance,
    'at_least' when summary >= target - tolerance. With require_decreasing
    the errors must also fall strictly from level to level.
    """
    family: str
    parameter: str
    derivative_order: int
    levels: List[Tuple[float, float]]
    target: float
    tolerance: float
    criterion: str = 'band'
    fitted_orders: List[float] = field(default_factory=list)
    summary_order: Optional[float] = None
    exact: bool = False
    degenerate: bool = False
    passed: bool = False
    require_decreasing: bool = False
    label: str = ''

    @property
    def errors(self) -> List[float]:
        return [error for _, error in self.levels]

    @property
    def strictly_decreasing(self) -> bool:
        errors = self.errors
        return all(e1 < e0 for e0, e1 in zip(errors, errors[1:]))

    def evaluate(self, scale: float = 1.0,
                 floor: float = ERROR_FLOOR,
                 exact_tolerance: float = EXACT_TOLERANCE) -> 'ConvergenceReport':
        """Fill orders, summary and verdict from levels"""
        errors = self.errors
        self.exact = bool(errors) and all(e <= exact_tolerance * scale for e in errors)
        self.fitted_orders = []
        self.summary_order = None
        self.degenerate = False
        if self.exact:
            self.passed = True
            return self

        usable = [e for e in errors if e > floor * scale]
        if len(usable) < 3:
            self.degenerate = True
            self.passed = False
            return self
        self.fitted_orders, self.summary_order = estimate_orders(usable, floor * scale)
        if self.criterion == 'at_least':
            self.passed = self.summary_order >= self.target - self.tolerance
        else:
            self.passed = abs(self.summary_order - self.target) <= self.tolerance
        if self.require_decreasing and not self.strictly_decreasing:
            self.passed = False
        return self

    def to_dict(self) -> dict:
        return {
            'label': self.label,
            'family': self.family,
            'parameter': self.parameter,
            'derivative_order': self.derivative_order,
            'levels': [{self.parameter: p, 'error': e} for p, e in self.levels],
            'fitted_orders': self.fitted_orders,
            'summary_order': self.summary_order,
            'target': self.target,
            'criterion': self.criterion,
            'tolerance': self.tolerance,
            'exact': self.exact,
            'degenerate': self.degenerate,
            'strictly_decreasing': self.strictly_decreasing,
            'require_decreasing': self.require_decreasing,
            'pass': self.passed,
        }


# =============================================================================
# Order estimation
# =============================================================================

def estimate_orders(errors: Sequence[float], floor: float = ERROR_FLOOR) -> Tuple[List[float], float]:
    """
    Per-step log2 ratios and their median (coarsest step dropped)

    Raises:
        InvalidStudy: fewer than three errors
        DegenerateErrors: an error at or below the floor
    """
    errors = [float(e) for e in errors]
    if len(errors) < 3:
        raise InvalidStudy("order estimation needs at least three errors")
    if any(e <= floor for e in errors):
        raise DegenerateErrors("error at or below the floor; exact reproduction makes orders meaningless")
    orders = [math.log2(e0 / e1) for e0, e1 in zip(errors, errors[1:])]
    return orders, float(np.median(orders[1:]))


def sup_error(f, spline, deriv: int = 0, samples: int = MIN_SAMPLES) -> float:
    """
    Sup-norm of D^i f - D^i spline on a composite grid

    f is either a spline-like object (compared at the same derivative) or a
    callable already returning the deriv-th derivative of the reference.
    """
    if samples < MIN_SAMPLES:
        raise InvalidStudy(f"samples must be >= {MIN_SAMPLES}")
    grid = composite_grid(spline.partition, samples)
    if hasattr(f, 'evaluate'):
        reference = f.evaluate(grid, deriv)
    else:
        reference = f(grid)
    reference = np.broadcast_to(np.asarray(reference, dtype=float), grid.shape)
    approximation = np.asarray(spline.evaluate(grid, deriv), dtype=float)
    return float(np.max(np.abs(reference - approximation)))


# =============================================================================
# Fitting dispatch
# =============================================================================

def build_fit(family: str, partition: Partition, data: DataSet,
              alpha: float, end: Optional[EndCondition] = None):
    """Fit any family of the package by name"""
    if family == 's1':
        return fit_s1(partition, data, alpha)
    if family == 't1':
        return fit_t1(partition, data, alpha)
    if family == 'linear':
        return fit_linear(partition, data)
    if family == 's2':
        return fit_s2(partition, data, alpha, end)
    if family == 't2':
        return fit_t2(partition, data, alpha, end)
    if family == 'cubic':
        return fit_cubic(partition, data, end)
    if family == 'hermite':
        return fit_hermite_s2(partition, data, None, alpha)
    if family == 'cubic_hermite':
        return fit_cubic_hermite(partition, data)
    raise InvalidStudy(f"unknown family: {family!r}")


def target_order(family: str, deriv: int) -> float:
    base = 2 if family in FIRST_ORDER_FAMILIES else 4
    return float(base - deriv)


def order_tolerance(family: str, deriv: int, tolerances: Optional[dict] = None) -> float:
    """Pass-band half-width for a refinement study of `family` at derivative `deriv`"""
    bands = dict(ORDER_TOLERANCES, **(tolerances or {}))
    if deriv > 0:
        return float(bands['derivative'])
    if family in FIRST_ORDER_FAMILIES:
        return float(bands['first_order'])
    return float(bands['fourth_order'])


def _end_kind(end) -> EndType:
    if end is None:
        return EndType.TYPE_II
    if isinstance(end, EndCondition):
        return end.kind
    return EndType.parse(end)


def sample_reference(f: ReferenceFunction, partition: Partition, end) -> DataSet:
    """Node values, end payloads and slopes of a reference function"""
    x = partition.nodes
    kind = _end_kind(end)
    if len(f.derivatives) < 3:
        raise InvalidStudy(f"reference function {f.name} needs derivatives up to order 2")
    left = right = None
    if kind is EndType.TYPE_I:
        left, right = f.derivative(1)(x[0]), f.derivative(1)(x[-1])
    elif kind is EndType.TYPE_III:
        left, right = f.derivative(2)(x[0]), f.derivative(2)(x[-1])
    return make_dataset(partition, f(x), left_end=left, right_end=right,
                        slopes=f.derivative(1)(x))


def seeded_dataset(partition: Partition, seed: int) -> DataSet:
    """Uniform(-1, 1) values, end payloads and slopes from a seeded generator"""
    rng = np.random.default_rng(seed)
    values = rng.uniform(-1.0, 1.0, len(partition.nodes))
    left, right = rng.uniform(-1.0, 1.0, 2)
    slopes = rng.uniform(-1.0, 1.0, len(partition.nodes))
    return make_dataset(partition, values, left_end=left, right_end=right, slopes=slopes)


def _check_doubling(levels: Sequence[int]) -> None:
    if len(levels) < 3:
        raise InvalidStudy("a convergence study needs at least three levels")
    for n0, n1 in zip(levels, levels[1:]):
        if n1 != 2 * n0:
            raise InvalidStudy(f"levels must double: {n0} -> {n1}")


def _check_halving(alphas: Sequence[float]) -> None:
    if not alphas:
        raise InvalidStudy("alpha sweep is empty")
    for a0, a1 in zip(alphas, alphas[1:]):
        if not math.isclose(a0, 2.0 * a1, rel_tol=1e-9):
            raise InvalidStudy(f"alphas must halve: {a0} -> {a1}")


def _end_condition(kind: EndType) -> EndCondition:
    return EndCondition(kind)


# =============================================================================
# Studies
# =============================================================================

def run_convergence_study(f: Union[ReferenceFunction, Callable],
                          derivatives: Optional[Sequence[Callable]],
                          interval: Tuple[float, float],
                          alpha: float,
                          family: str,
                          end,
                          levels: Sequence[int],
                          deriv: int = 0,
                          samples: int = MIN_SAMPLES,
                          tolerance: Optional[float] = None) -> ConvergenceReport:
    """
    h-refinement study on uniform partitions of `interval`

    `derivatives` lists f', f'', f''' (as far as needed); it may be omitted
    when f is a ReferenceFunction.
    tolerance defaults to order_tolerance(family, deriv).
    """
    if family not in FAMILIES:
        raise InvalidStudy(f"unknown family: {family!r}")
    _check_doubling(levels)
    if not isinstance(f, ReferenceFunction):
        f = ReferenceFunction(getattr(f, '__name__', 'f'), (f,) + tuple(derivatives or ()), tuple(interval))
    elif derivatives:
        f = ReferenceFunction(f.name, (f.derivatives[0],) + tuple(derivatives), tuple(interval))
    max_deriv = 1 if family in FIRST_ORDER_FAMILIES else 3
    if not 0 <= deriv <= max_deriv or deriv >= len(f.derivatives):
        raise InvalidStudy(f"derivative order {deriv} unavailable for family {family}")

    kind = _end_kind(end)
    reference = f.derivative(deriv)
    report = ConvergenceReport(family=family, parameter='h', derivative_order=deriv,
                               levels=[], target=target_order(family, deriv),
                               tolerance=order_tolerance(family, deriv) if tolerance is None else tolerance,
                               label=f"{f.name} {family} end={kind.value} deriv={deriv}")
    scale = 1.0
    for n in levels:
        partition = uniform_partition(interval[0], interval[1], n)
        data = sample_reference(f, partition, kind)
        spline = build_fit(family, partition, data, alpha, _end_condition(kind))
        error = sup_error(reference, spline, deriv, samples)
        scale = max(scale, 1.0 + data.sup_norm)
        report.levels.append((partition.hbar, error))
        logger.info("N=%d hbar=%.6g error=%.6g", n, partition.hbar, error)
    return report.evaluate(scale=scale)


def alpha_limit_study(source,
                      partition: Partition,
                      family_pair: Tuple[str, str],
                      alphas: Sequence[float],
                      end,
                      deriv: int = 0,
                      samples: int = MIN_SAMPLES,
                      tolerance: float = 0.1) -> ConvergenceReport:
    """
    Distance between a tension family and its limit as alpha is halved

    source is a DataSet, a value array, or a ReferenceFunction sampled on
    the partition. The study passes only when the errors fall
    strictly as alpha is halved.
    """
    parametrized, limit = family_pair
    for name in family_pair:
        if name not in FAMILIES:
            raise InvalidStudy(f"unknown family: {name!r}")
    alphas = [float(a) for a in alphas]
    _check_halving(alphas)

    kind = _end_kind(end)
    if isinstance(source, ReferenceFunction):
        data = sample_reference(source, partition, kind)
    elif isinstance(source, DataSet):
        data = source
    else:
        data = make_dataset(partition, source)

    end_condition = _end_condition(kind)
    reference = build_fit(limit, partition, data, alphas[0], end_condition)
    report = ConvergenceReport(family=parametrized, parameter='alpha', derivative_order=deriv,
                               levels=[], target=2.0, tolerance=tolerance, criterion='at_least',
                               require_decreasing=True,
                               label=f"{parametrized} -> {limit} end={kind.value} deriv={deriv}")
    for alpha in alphas:
        spline = build_fit(parametrized, partition, data, alpha, end_condition)
        error = sup_error(reference, spline, deriv, samples)
        report.levels.append((alpha, error))
        logger.info("alpha=%g error=%.6g", alpha, error)
    return report.evaluate(scale=1.0 + data.sup_norm)
