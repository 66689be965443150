#!/usr/bin/env python3
"""
Fit Request Handler

Orchestrates a fit request end to end:
Parse → Validate → Fit → Sample → Write → Audit

The handler owns the statistics of every request it processed; the CLI
only chooses inputs and output paths.
"""

import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from hermite_k2 import fit_hermite_s2
from request_validator import RequestValidator, ValidationError
from run_logger import RunLogger
from spline_core import (
    EndCondition, EndType, NotDominant, Overflow, SplineError, TensionTooLarge,
    composite_grid, make_dataset, make_partition,
)
from spline_k1 import fit_s1, fit_t1
from spline_k2 import fit_s2, fit_t2


DEFAULT_SAMPLES = 200

# Failures that are about alpha rather than the data
TENSION_ERRORS = (TensionTooLarge, NotDominant, Overflow)


@dataclass
class FitOutcome:
    """
    Result of one processed request

    exit_code follows the CLI contract (0 ok, 2 validation, 3 numerical).
    On failure `error` holds the one-line reason.
    """
    exit_code: int
    columns: List[str] = field(default_factory=list)
    table: Optional[np.ndarray] = None
    records: List[Dict[str, Any]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    error: Optional[str] = None
    run_id: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.exit_code == 0


def error_line(error: SplineError, field_name: Optional[str] = None) -> str:
    """'code field: message' for a numerical failure"""
    if field_name is None and isinstance(error, TENSION_ERRORS):
        field_name = 'alpha'
    message = error.message
    margin = getattr(error, 'dominance_margin', None)
    if margin is not None:
        message = f"{message} (dominance margin {margin:.6g})"
    return f"{error.code} {field_name or '-'}: {message}"


class FitHandler:
    """
    Unified handler for fit requests

    Responsibilities:
    - Validate request documents
    - Build the fit for the requested order and family
    - Sample it on the composite grid
    - Collect coefficient records
    - Log to the run audit trail
    """

    def __init__(self,
                 validator: RequestValidator,
                 run_logger: RunLogger,
                 debug_level: int = 0,
                 default_samples: int = DEFAULT_SAMPLES):
        """
        Initialize fit handler

        Args:
            validator: RequestValidator instance
            run_logger: RunLogger instance
            debug_level: Debug output level
            default_samples: samples per interval when the request has none
        """
        self.validator = validator
        self.run_logger = run_logger
        self.debug_level = debug_level
        self.default_samples = default_samples

        self.stats = {
            'total_requests': 0,
            'successful_fits': 0,
            'validation_failures': 0,
            'numerical_failures': 0,
            'failures_by_code': {},
            'total_latency_ms': 0.0,
        }

    # =========================================================================
    # Main Request Processing
    # =========================================================================

    def process_request(self, request: Dict[str, Any]) -> FitOutcome:
        """
        Process a fit request document

        Flow:
            1. Validate request
            2. Fit spline
            3. Sample value and derivative columns
            4. Log and return the outcome
        """
        start_time = time.time()
        self.stats['total_requests'] += 1
        run_id = self.run_logger.log_request_attempt(
            'fit', request if isinstance(request, dict) else {})

        valid, error = self.validator.validate_fit_request(request)
        if not valid:
            return self._validation_failed(run_id, error)

        warnings = self.validator.fit_warnings(request)
        if self.debug_level > 1:
            for warning in warnings:
                print(f"[FIT {run_id}] Warning: {warning}", file=sys.stderr)

        try:
            spline = self.build_spline(request)
            samples = request.get('samples') or self.default_samples
            columns, table = self.sample_table(spline, samples)
        except SplineError as e:
            self._count_failure('numerical_failures', e.code)
            details = {'dominance_margin': e.dominance_margin} if hasattr(e, 'dominance_margin') else None
            self.run_logger.log_numerical_failure(run_id, e.code, e.message, details)
            if self.debug_level > 0:
                print(f"[FIT {run_id}] Numerical failure: {e}", file=sys.stderr)
            return FitOutcome(exit_code=e.exit_code, error=error_line(e), warnings=warnings, run_id=run_id)

        records = spline.to_records()
        latency_ms = (time.time() - start_time) * 1000
        self.stats['successful_fits'] += 1
        self.stats['total_latency_ms'] += latency_ms
        self.run_logger.log_fit_success(run_id, records[0]['representation'],
                                        len(records), len(table), latency_ms)
        if self.debug_level > 2:
            print(f"[FIT {run_id}] Success: {len(table)} rows in {latency_ms:.1f}ms", file=sys.stderr)

        return FitOutcome(exit_code=0, columns=columns, table=table, records=records,
                          warnings=warnings, run_id=run_id)

    def _validation_failed(self, run_id: int, error: ValidationError) -> FitOutcome:
        self._count_failure('validation_failures', error.code)
        self.run_logger.log_validation_failure(run_id, error.code, error.message, error.field)
        if self.debug_level > 0:
            print(f"[FIT {run_id}] Validation failed: {error.line()}", file=sys.stderr)
        return FitOutcome(exit_code=2, error=error.line(), run_id=run_id)

    def _count_failure(self, kind: str, code: str):
        self.stats[kind] += 1
        by_code = self.stats['failures_by_code']
        by_code[code] = by_code.get(code, 0) + 1

    # =========================================================================
    # Fitting
    # =========================================================================

    @staticmethod
    def build_spline(request: Dict[str, Any]):
        """Fit dispatch on (order, family, slopes)"""
        partition = make_partition(request['x'])
        alpha = float(request['alpha'])
        family = request['family']

        if request['order'] == 1:
            fit = fit_s1 if family == 's' else fit_t1
            return fit(partition, request['y'], alpha)

        if request.get('slopes') is not None:
            data = make_dataset(partition, request['y'], slopes=request['slopes'])
            return fit_hermite_s2(partition, data, None, alpha)

        end = request['end']
        kind = EndType.parse(end['type'])
        if kind is EndType.TYPE_II:
            condition = EndCondition.type_ii()
        else:
            condition = EndCondition(kind, float(end['left']), float(end['right']))
        data = make_dataset(partition, request['y'])
        fit = fit_s2 if family == 's' else fit_t2
        return fit(partition, data, alpha, condition)

    @staticmethod
    def sample_table(spline, samples: int):
        """
        Columns x, v, d1[, d2] on `samples` points per interval plus the last node

        Derivative columns stop at what the order defines (d1 for k=1).
        """
        grid = composite_grid(spline.partition, samples)
        columns = ['x', 'v', 'd1']
        if spline.order == 2:
            columns.append('d2')
        table = np.column_stack([grid] + [np.asarray(spline.evaluate(grid, deriv), dtype=float)
                                          for deriv in range(len(columns) - 1)])
        return columns, table

    # =========================================================================
    # Output
    # =========================================================================

    @staticmethod
    def write_outcome(outcome: FitOutcome, out_path: str, fmt: str = 'csv') -> List[str]:
        """
        Write the sample table and coefficient dump

        csv: table at out_path, coefficients at <stem>.coeffs.json
        json: one document with columns, rows and coefficients

        Returns:
            Paths written
        """
        out_dir = os.path.dirname(out_path)
        if out_dir and not os.path.exists(out_dir):
            os.makedirs(out_dir)

        if fmt == 'json':
            document = {
                'columns': outcome.columns,
                'rows': outcome.table.tolist(),
                'coefficients': outcome.records,
            }
            with open(out_path, 'w') as f:
                json.dump(document, f, indent=2)
                f.write('\n')
            return [out_path]

        np.savetxt(out_path, outcome.table, delimiter=',', fmt='%.17g',
                   header=','.join(outcome.columns), comments='')
        coeffs_path = coefficient_path(out_path)
        with open(coeffs_path, 'w') as f:
            json.dump({'coefficients': outcome.records}, f, indent=2)
            f.write('\n')
        return [out_path, coeffs_path]

    # =========================================================================
    # Statistics
    # =========================================================================

    def get_stats(self) -> Dict[str, Any]:
        """Get handler statistics"""
        stats = dict(self.stats)
        stats['failures_by_code'] = dict(self.stats['failures_by_code'])
        if stats['successful_fits'] > 0:
            stats['avg_latency_ms'] = round(stats['total_latency_ms'] / stats['successful_fits'], 2)
        else:
            stats['avg_latency_ms'] = 0
        return stats


def coefficient_path(out_path: str) -> str:
    stem, _ = os.path.splitext(out_path)
    return f"{stem}.coeffs.json"
