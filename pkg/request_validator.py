#!/usr/bin/env python3
"""
Request Validation Module

Multi-layer validation for fit requests and study flags: schema, values,
end conditions, family/order compatibility and tension range. Every layer
returns (is_valid, ValidationError | None); the first failing layer wins.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple


@dataclass
class ValidationError:
    """Validation error details"""
    code: str
    message: str
    field: Optional[str] = None

    def line(self) -> str:
        """One machine-parseable line: 'code field: message'"""
        return f"{self.code} {self.field or '-'}: {self.message}"


Result = Tuple[bool, Optional[ValidationError]]

OK: Result = (True, None)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_number_list(value: Any) -> bool:
    return isinstance(value, (list, tuple)) and all(_is_number(v) for v in value)


def _fail(code: str, message: str, field: Optional[str] = None) -> Result:
    return False, ValidationError(code=code, message=message, field=field)


class RequestValidator:
    """
    Layered validator for fit requests and study parameters

    Fit request layers:
    1. Schema (structure, required fields, types)
    2. Values (finite, aligned, strictly increasing nodes)
    3. End condition (type and payload consistency, order 2 only)
    4. Compatibility (Hermite slopes need the polyhyperbolic order-2 family)
    5. Tension (alpha positive and finite)
    """

    VALIDATION_RULES = {
        'fit': {
            'required_fields': ['x', 'y', 'alpha', 'order', 'family'],
            'orders': [1, 2],
            'families': ['s', 't'],
            'end_types': ['I', 'II', 'III'],
        },
        'converge': {
            'families': ['s', 't', 'cubic', 'hermite', 'linear'],
            'max_deriv': {1: 1, 2: 3},
        },
        'shape': {
            'properties': ['positive', 'monotone_up', 'monotone_down', 'convex'],
            'min_resolution': 64,
        },
    }

    def __init__(self, functions: Optional[Sequence[str]] = None):
        """
        Initialize request validator

        Args:
            functions: names of the built-in test functions accepted by studies
        """
        self.functions = set(functions or [])
        self.stats = {
            'total_validations': 0,
            'failures': 0,
            'failures_by_code': {},
        }

    # =========================================================================
    # Main Validation Entry Points
    # =========================================================================

    def validate_fit_request(self, request: Dict[str, Any]) -> Result:
        """
        Validate a fit request document

        Request structure:
            {
                'x': [...], 'y': [...], 'alpha': float,
                'order': 1 | 2, 'family': 's' | 't',
                'end': {'type': 'I'|'II'|'III', 'left': float, 'right': float},
                'slopes': [...],      (optional, Hermite)
                'samples': int        (optional)
            }
        """
        for layer in (self._validate_schema, self._validate_values,
                      self._validate_end, self._validate_compatibility,
                      self._validate_tension):
            valid, error = layer(request)
            if not valid:
                return self._record(False, error)
        return self._record(True, None)

    def fit_warnings(self, request: Dict[str, Any]) -> List[str]:
        """Non-fatal remarks about a request that passed validation"""
        warnings = []
        if request.get('order') == 1 and request.get('end'):
            warnings.append("order 1 fits need no end condition; end payloads ignored")
        return warnings

    # =========================================================================
    # Layer 1: Schema Validation
    # =========================================================================

    def _validate_schema(self, request: Dict[str, Any]) -> Result:
        if not isinstance(request, dict):
            return _fail('E001', 'Request must be a JSON object')

        rules = self.VALIDATION_RULES['fit']
        for field in rules['required_fields']:
            if field not in request:
                return _fail('E002', f'Missing required field: {field}', field)

        for field in ('x', 'y'):
            if not _is_number_list(request[field]):
                return _fail('E003', f'{field} must be a list of numbers', field)
        if 'slopes' in request and request['slopes'] is not None and not _is_number_list(request['slopes']):
            return _fail('E003', 'slopes must be a list of numbers', 'slopes')
        if not _is_number(request['alpha']):
            return _fail('E003', 'alpha must be a number', 'alpha')

        if request['order'] not in rules['orders']:
            return _fail('E004', f"Invalid order: {request['order']}. Allowed: {rules['orders']}", 'order')
        if request['family'] not in rules['families']:
            return _fail('E005', f"Invalid family: {request['family']}. Allowed: {rules['families']}", 'family')
        return OK

    # =========================================================================
    # Layer 2: Value Validation
    # =========================================================================

    def _validate_values(self, request: Dict[str, Any]) -> Result:
        x, y = request['x'], request['y']
        for field, values in (('x', x), ('y', y)):
            if not all(math.isfinite(v) for v in values):
                return _fail('E006', f'{field} contains non-finite values', field)
        if len(x) != len(y):
            return _fail('E007', f'x has {len(x)} entries but y has {len(y)}', 'y')
        if len(x) < 2:
            return _fail('E008', 'At least two nodes are required', 'x')
        for j in range(1, len(x)):
            if not x[j] > x[j - 1]:
                return _fail('E008', f'x not strictly increasing at index {j}', 'x')

        samples = request.get('samples')
        if samples is not None and (not isinstance(samples, int) or isinstance(samples, bool) or samples < 1):
            return _fail('E009', f'samples must be a positive integer, got {samples!r}', 'samples')
        return OK

    # =========================================================================
    # Layer 3: End Condition Validation
    # =========================================================================

    def _validate_end(self, request: Dict[str, Any]) -> Result:
        if request['order'] == 1:
            return OK
        if request.get('slopes') is not None:
            return OK

        end = request.get('end')
        if not isinstance(end, dict):
            return _fail('E010', 'Order 2 fits need an end condition object', 'end')
        kind = end.get('type')
        if kind not in self.VALIDATION_RULES['fit']['end_types']:
            return _fail('E011', f'Invalid end type: {kind!r}', 'end.type')

        has_left = end.get('left') is not None
        has_right = end.get('right') is not None
        if kind == 'II':
            if has_left or has_right:
                return _fail('E013', 'Type II end condition carries no payload', 'end')
            return OK
        if not (has_left and has_right):
            return _fail('E012', f'Type {kind} end condition needs left and right payloads', 'end')
        for side in ('left', 'right'):
            value = end[side]
            if not _is_number(value) or not math.isfinite(value):
                return _fail('E012', f'end.{side} must be a finite number', f'end.{side}')
        return OK

    # =========================================================================
    # Layer 4: Compatibility Validation
    # =========================================================================

    def _validate_compatibility(self, request: Dict[str, Any]) -> Result:
        slopes = request.get('slopes')
        if slopes is None:
            return OK
        if request['order'] != 2 or request['family'] != 's':
            return _fail('E014', 'Hermite slopes need order 2 with family s', 'slopes')
        if len(slopes) != len(request['x']):
            return _fail('E007', f'slopes has {len(slopes)} entries, expected {len(request["x"])}', 'slopes')
        if not all(math.isfinite(v) for v in slopes):
            return _fail('E006', 'slopes contains non-finite values', 'slopes')
        return OK

    # =========================================================================
    # Layer 5: Tension Validation
    # =========================================================================

    def _validate_tension(self, request: Dict[str, Any]) -> Result:
        return self._check_alpha(request['alpha'], 'alpha')

    @staticmethod
    def _check_alpha(alpha: Any, field: str) -> Result:
        if not _is_number(alpha) or not math.isfinite(alpha) or alpha <= 0:
            return _fail('E015', f'{field} must be a positive finite number, got {alpha!r}', field)
        return OK

    # =========================================================================
    # Study Parameters
    # =========================================================================

    def validate_convergence(self, params: Dict[str, Any]) -> Result:
        """Validate converge flags (function, interval, family, levels, deriv, alpha)"""
        rules = self.VALIDATION_RULES['converge']
        checks = [
            self._check_function(params.get('function')),
            self._check_interval(params.get('interval')),
            self._check_alpha(params.get('alpha'), 'alpha'),
            self._check_choice(params.get('family'), rules['families'], 'E005', 'family'),
            self._check_order(params.get('order')),
            self._check_choice(params.get('end'), self.VALIDATION_RULES['fit']['end_types'], 'E011', 'end'),
            self._check_levels(params.get('levels')),
            self._check_deriv(params.get('deriv'), params.get('family'), params.get('order')),
        ]
        return self._first_failure(checks)

    def validate_limit(self, params: Dict[str, Any]) -> Result:
        """Validate limit flags (alphas, N, family, end, optional function)"""
        rules = self.VALIDATION_RULES['converge']
        checks = []
        if params.get('function') is not None:
            checks.append(self._check_function(params['function']))
        checks.extend([
            self._check_interval(params.get('interval')),
            self._check_choice(params.get('family'), rules['families'], 'E005', 'family'),
            self._check_choice(params.get('end'), self.VALIDATION_RULES['fit']['end_types'], 'E011', 'end'),
            self._check_order(params.get('order')),
            self._check_alphas(params.get('alphas')),
            self._check_deriv(params.get('deriv', 0), params.get('family'), params.get('order')),
        ])
        n = params.get('n')
        if not isinstance(n, int) or n < 1:
            checks.append(_fail('E022', f'n must be a positive integer, got {n!r}', 'n'))
        return self._first_failure(checks)

    def validate_shape(self, params: Dict[str, Any]) -> Result:
        """Validate shape flags (property, resolution, alpha0)"""
        rules = self.VALIDATION_RULES['shape']
        checks = [
            self._check_choice(params.get('property'), rules['properties'], 'E023', 'property'),
            self._check_alpha(params.get('alpha0'), 'alpha0'),
        ]
        resolution = params.get('resolution')
        if not isinstance(resolution, int) or resolution < rules['min_resolution']:
            checks.append(_fail('E024', f"resolution must be an integer >= {rules['min_resolution']}",
                                'resolution'))
        return self._first_failure(checks)

    def _check_function(self, name: Any) -> Result:
        if name not in self.functions:
            return _fail('E017', f'Unknown function: {name!r}. Allowed: {sorted(self.functions)}', 'function')
        return OK

    @staticmethod
    def _check_interval(interval: Any) -> Result:
        if interval is None:
            return OK
        if (not _is_number_list(interval) or len(interval) != 2
                or not all(math.isfinite(v) for v in interval) or not interval[0] < interval[1]):
            return _fail('E020', f'interval must be two finite numbers a < b, got {interval!r}', 'interval')
        return OK

    @staticmethod
    def _check_choice(value: Any, allowed: Sequence[str], code: str, field: str) -> Result:
        if value not in allowed:
            return _fail(code, f'Invalid {field}: {value!r}. Allowed: {list(allowed)}', field)
        return OK

    def _check_order(self, order: Any) -> Result:
        return self._check_choice(order, self.VALIDATION_RULES['fit']['orders'], 'E004', 'order')

    @staticmethod
    def _check_levels(levels: Any) -> Result:
        if not isinstance(levels, (list, tuple)) or len(levels) < 3:
            return _fail('E018', 'levels needs at least three entries', 'levels')
        if not all(isinstance(n, int) and n >= 1 for n in levels):
            return _fail('E018', 'levels must be positive integers', 'levels')
        for n0, n1 in zip(levels, levels[1:]):
            if n1 != 2 * n0:
                return _fail('E018', f'levels must double: {n0} -> {n1}', 'levels')
        return OK

    def _check_deriv(self, deriv: Any, family: Any, order: Any) -> Result:
        if family in ('cubic', 'hermite'):
            order = 2
        elif family == 'linear':
            order = 1
        limit = self.VALIDATION_RULES['converge']['max_deriv'].get(order, 0)
        if not isinstance(deriv, int) or not 0 <= deriv <= limit:
            return _fail('E019', f'deriv must be an integer in [0, {limit}], got {deriv!r}', 'deriv')
        return OK

    @staticmethod
    def _check_alphas(alphas: Any) -> Result:
        if not alphas:
            return _fail('E021', 'alphas must not be empty', 'alphas')
        if not _is_number_list(alphas) or not all(math.isfinite(a) and a > 0 for a in alphas):
            return _fail('E021', 'alphas must be positive finite numbers', 'alphas')
        for a0, a1 in zip(alphas, alphas[1:]):
            if not math.isclose(a0, 2.0 * a1, rel_tol=1e-9):
                return _fail('E021', f'alphas must halve: {a0} -> {a1}', 'alphas')
        return OK

    def _first_failure(self, checks: List[Result]) -> Result:
        for valid, error in checks:
            if not valid:
                return self._record(False, error)
        return self._record(True, None)

    # =========================================================================
    # Utility Methods
    # =========================================================================

    def _record(self, valid: bool, error: Optional[ValidationError]) -> Result:
        self.stats['total_validations'] += 1
        if not valid:
            self.stats['failures'] += 1
            by_code = self.stats['failures_by_code']
            by_code[error.code] = by_code.get(error.code, 0) + 1
        return valid, error

    def get_stats(self) -> Dict[str, Any]:
        """Get validation statistics"""
        stats = dict(self.stats)
        stats['failures_by_code'] = dict(self.stats['failures_by_code'])
        return stats
