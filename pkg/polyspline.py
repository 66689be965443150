#!/usr/bin/env python3
"""
polyspline command line

Fit polyhyperbolic and tanh splines from data files, sample them to CSV or
JSON, run convergence and alpha-limit studies, and search for a tension
that makes a Hermite fit inherit the shape of its data.

Exit codes:
    0  ok
    2  validation failure (bad document or flags)
    3  numerical regime failure (dominance lost, overflow, singular system)
    4  shape search failed
"""

import argparse
import configparser
import json
import os
import sys
import time
from typing import Any, Dict, List, Optional

import numpy as np

from convergence import (
    LIMIT_FAMILY, REFERENCE_FUNCTIONS, alpha_limit_study, get_reference_function,
    order_tolerance, run_convergence_study, sample_reference, seeded_dataset,
)
from cubic_ref import fit_cubic, monotone_slopes
from fit_handler import DEFAULT_SAMPLES, FitHandler, error_line
from hermite_k2 import (
    DEFAULT_RESOLUTION, MAX_HALVINGS, ShapeSearchResult, data_has_property,
    find_shape_preserving_alpha, fit_hermite_s2, shape_check,
)
from request_validator import RequestValidator, ValidationError
from run_logger import RunLogger
from spline_core import EndCondition, SplineError, make_dataset, make_partition, uniform_partition
from study_presets import StudyPresets


EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_SEARCH = 4

DEFAULT_CONFIG = 'polyspline.ini'
DEFAULT_SEED = 1729
DEFAULT_LIMIT_INTERVAL = (0.0, 1.0)

LOG_LEVELS = {
    'DEBUG': RunLogger.LEVEL_DEBUG,
    'INFO': RunLogger.LEVEL_INFO,
    'WARNING': RunLogger.LEVEL_WARNING,
    'ERROR': RunLogger.LEVEL_ERROR,
}


class UsageError(Exception):
    """Bad input outside the request validator's reach (unreadable files, unknown presets)"""

    def __init__(self, error: ValidationError):
        super().__init__(error.message)
        self.error = error


# =============================================================================
# Configuration
# =============================================================================

def load_config(path: Optional[str]) -> Dict[str, Any]:
    """
    Read polyspline.ini; a missing file leaves every built-in default in place
    """
    config = configparser.ConfigParser(inline_comment_prefixes=';')
    if path:
        config.read(path)

    return {
        'debug': config.getint('General', 'debug', fallback=0),
        'seed': config.getint('General', 'seed', fallback=DEFAULT_SEED),
        'presets_file': config.get('General', 'presets_file', fallback='presets/studies.yaml'),
        'samples': config.getint('Fit', 'samples', fallback=DEFAULT_SAMPLES),
        'format': config.get('Fit', 'format', fallback='csv'),
        'study_samples': config.getint('Convergence', 'samples_per_interval', fallback=100),
        'order_tolerances': {
            'first_order': config.getfloat('Convergence', 'first_order_tolerance', fallback=0.15),
            'fourth_order': config.getfloat('Convergence', 'fourth_order_tolerance', fallback=0.25),
            'derivative': config.getfloat('Convergence', 'derivative_tolerance', fallback=0.3),
        },
        'limit_tolerance': config.getfloat('Convergence', 'limit_tolerance', fallback=0.1),
        'resolution': config.getint('Shape', 'resolution', fallback=DEFAULT_RESOLUTION),
        'max_halvings': config.getint('Shape', 'max_halvings', fallback=MAX_HALVINGS),
        'alpha0': config.getfloat('Shape', 'alpha0', fallback=1.0),
        'audit_enabled': bool(config.getint('Audit', 'enabled', fallback=1)),
        'audit_log_file': config.get('Audit', 'log_file', fallback='logs/polyspline_runs.log'),
        'audit_log_level': LOG_LEVELS.get(config.get('Audit', 'log_level', fallback='INFO').upper(),
                                          RunLogger.LEVEL_INFO),
        'audit_json_format': bool(config.getint('Audit', 'json_format', fallback=1)),
        'audit_max_bytes': config.getint('Audit', 'max_bytes', fallback=10485760),
        'audit_backup_count': config.getint('Audit', 'backup_count', fallback=5),
        'audit_console_output': bool(config.getint('Audit', 'console_output', fallback=0)),
    }


def make_run_logger(settings: Dict[str, Any]) -> RunLogger:
    return RunLogger(
        log_file=settings['audit_log_file'],
        log_level=settings['audit_log_level'],
        max_bytes=settings['audit_max_bytes'],
        backup_count=settings['audit_backup_count'],
        json_format=settings['audit_json_format'],
        console_output=settings['audit_console_output'],
        enabled=settings['audit_enabled'],
    )


# =============================================================================
# Argument Parsing
# =============================================================================

GLOBAL_DEFAULTS = {'out': None, 'format': None, 'seed': None, 'config': DEFAULT_CONFIG, 'debug': None}


def _global_flags() -> argparse.ArgumentParser:
    """Flags accepted before or after the command name"""
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument('--out', default=argparse.SUPPRESS, help='Output path')
    flags.add_argument('--format', choices=['csv', 'json'], default=argparse.SUPPRESS,
                       help='Artifact format (default from config)')
    flags.add_argument('--seed', type=int, default=argparse.SUPPRESS,
                       help='Seed for randomized data (default from config)')
    flags.add_argument('--config', default=argparse.SUPPRESS, help='Configuration file')
    flags.add_argument('--debug', type=int, default=argparse.SUPPRESS,
                       help='Debug level 0-3 (default from config)')
    return flags


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.out is None:
        parser.error('--out is required')
    return args


def build_parser() -> argparse.ArgumentParser:
    flags = _global_flags()
    parser = argparse.ArgumentParser(
        prog='polyspline', parents=[flags],
        description='Polyhyperbolic and tanh spline fitting and convergence studies')

    commands = parser.add_subparsers(dest='command', required=True)

    fit = commands.add_parser('fit', parents=[flags], help='Fit a spline and sample it')
    source = fit.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', help='JSON request document')
    source.add_argument('--input-csv', help='CSV with header x,y')
    fit.add_argument('--alpha', type=float)
    fit.add_argument('--order', type=int)
    fit.add_argument('--family')
    _add_end_flags(fit)
    fit.add_argument('--samples', type=int, help='Samples per interval')

    converge = commands.add_parser('converge', parents=[flags], help='h-refinement convergence study')
    converge.add_argument('--preset', help='Named study from the presets file')
    converge.add_argument('--function', help=f"One of {', '.join(sorted(REFERENCE_FUNCTIONS))}")
    converge.add_argument('--interval', type=float, nargs=2, metavar=('A', 'B'))
    converge.add_argument('--alpha', type=float)
    converge.add_argument('--family')
    converge.add_argument('--order', type=int)
    converge.add_argument('--end')
    converge.add_argument('--levels', type=int, nargs='+')
    converge.add_argument('--deriv', type=int)
    converge.add_argument('--samples', type=int, help='Samples per interval for sup-errors')

    limit = commands.add_parser('limit', parents=[flags], help='alpha -> 0 limit study')
    limit.add_argument('--preset', help='Named study from the presets file')
    limit.add_argument('--function', help='Sample a test function instead of seeded data')
    limit.add_argument('--interval', type=float, nargs=2, metavar=('A', 'B'))
    limit.add_argument('--n', type=int, help='Number of intervals')
    limit.add_argument('--family')
    limit.add_argument('--order', type=int)
    limit.add_argument('--end')
    limit.add_argument('--alphas', type=float, nargs='*')
    limit.add_argument('--deriv', type=int)
    limit.add_argument('--samples', type=int, help='Samples per interval for sup-errors')

    shape = commands.add_parser('shape', parents=[flags], help='Shape-preserving alpha search')
    source = shape.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', help='JSON document with x, y and optional slopes')
    source.add_argument('--input-csv', help='CSV with header x,y[,slopes]')
    shape.add_argument('--property', required=True)
    shape.add_argument('--alpha0', type=float)
    shape.add_argument('--resolution', type=int)
    shape.add_argument('--max-halvings', type=int)

    return parser


def _add_end_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--end', help='End condition type I, II or III')
    parser.add_argument('--end-left', type=float, help='Left end payload')
    parser.add_argument('--end-right', type=float, help='Right end payload')


# =============================================================================
# Input Documents
# =============================================================================

def read_json_document(path: str) -> Any:
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except (OSError, ValueError) as e:
        raise UsageError(ValidationError('E001', f'Cannot read JSON document {path}: {e}', 'input'))


def read_csv_document(path: str) -> Dict[str, List[float]]:
    """Columns of a headed CSV as a document {x, y[, slopes]}"""
    try:
        table = np.genfromtxt(path, delimiter=',', names=True, dtype=float)
    except (OSError, ValueError) as e:
        raise UsageError(ValidationError('E001', f'Cannot read CSV {path}: {e}', 'input'))
    names = table.dtype.names or ()
    for column in ('x', 'y'):
        if column not in names:
            raise UsageError(ValidationError('E002', f'CSV header lacks column {column}', column))
    table = np.atleast_1d(table)
    document = {'x': table['x'].tolist(), 'y': table['y'].tolist()}
    if 'slopes' in names:
        document['slopes'] = table['slopes'].tolist()
    return document


def load_fit_request(args: argparse.Namespace) -> Dict[str, Any]:
    """Request document with command-line flags taking precedence"""
    if args.input:
        request = read_json_document(args.input)
        if not isinstance(request, dict):
            return request
    else:
        request = read_csv_document(args.input_csv)

    for name in ('alpha', 'order', 'family', 'samples'):
        value = getattr(args, name)
        if value is not None:
            request[name] = value

    if args.end is not None or args.end_left is not None or args.end_right is not None:
        end = dict(request.get('end') or {})
        if args.end is not None:
            end['type'] = args.end
        if args.end_left is not None:
            end['left'] = args.end_left
        if args.end_right is not None:
            end['right'] = args.end_right
        request['end'] = end
    return request


def study_params(args: argparse.Namespace, kind: str, settings: Dict[str, Any],
                 defaults: Dict[str, Any], names: List[str]) -> Dict[str, Any]:
    """Built-in defaults, then preset values, then explicit flags"""
    params = dict(defaults)
    if args.preset:
        try:
            presets = StudyPresets(settings['presets_file'])
            params.update(presets.get(args.preset, kind))
        except (FileNotFoundError, KeyError, ValueError) as e:
            raise UsageError(ValidationError('E016', str(e).strip('"\''), 'preset'))
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            params[name] = list(value) if isinstance(value, (list, tuple)) else value
    if 'interval' in params and params['interval'] is not None:
        params['interval'] = [float(v) for v in params['interval']]
    return params


def study_family(family: str, order: int) -> str:
    """CLI family/order pair as a convergence family name"""
    if family in ('s', 't'):
        return f"{family}{order}"
    return family


# =============================================================================
# Output
# =============================================================================

def _ensure_parent(path: str):
    parent = os.path.dirname(path)
    if parent and not os.path.exists(parent):
        os.makedirs(parent)


def write_json(path: str, document: Dict[str, Any]):
    _ensure_parent(path)
    with open(path, 'w') as f:
        json.dump(document, f, indent=2)
        f.write('\n')


def write_report(out_path: str, report, fmt: str) -> List[str]:
    """
    Report JSON at <stem>.json; with csv format also (parameter, error) at <stem>.csv
    """
    stem, _ = os.path.splitext(out_path)
    paths = [f"{stem}.json"]
    write_json(paths[0], report.to_dict())
    if fmt == 'csv':
        paths.append(f"{stem}.csv")
        table = np.array(report.levels, dtype=float).reshape(-1, 2)
        parameter = 'hbar' if report.parameter == 'h' else report.parameter
        np.savetxt(paths[1], table, delimiter=',', fmt='%.17g',
                   header=f"{parameter},error", comments='')
    return paths


def fail(line: str, code: int) -> int:
    print(line, file=sys.stderr)
    return code


# =============================================================================
# Commands
# =============================================================================

def report_handler_stats(handler: FitHandler, run_logger: RunLogger, debug: int) -> None:
    stats = handler.get_stats()
    run_logger.log_system_event('handler_stats', 'Fit handler statistics', details=stats)
    if debug > 2:
        print(f"handler stats: {json.dumps(stats)}", file=sys.stderr)


def cmd_fit(args, settings, validator: RequestValidator, run_logger: RunLogger) -> int:
    request = load_fit_request(args)
    handler = FitHandler(validator, run_logger, debug_level=settings['debug'],
                         default_samples=settings['samples'])
    outcome = handler.process_request(request)
    report_handler_stats(handler, run_logger, settings['debug'])
    for warning in outcome.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if not outcome.ok:
        return fail(outcome.error, outcome.exit_code)

    fmt = args.format or settings['format']
    for path in handler.write_outcome(outcome, args.out, fmt):
        if settings['debug'] > 2:
            print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_converge(args, settings, validator: RequestValidator, run_logger: RunLogger) -> int:
    defaults = {'function': 'sin', 'interval': None, 'alpha': 0.5, 'family': 't', 'order': 2,
                'end': 'I', 'levels': [8, 16, 32, 64, 128], 'deriv': 0,
                'samples': settings['study_samples']}
    params = study_params(args, 'converge', settings, defaults,
                          ['function', 'interval', 'alpha', 'family', 'order', 'end',
                           'levels', 'deriv', 'samples'])
    start_time = time.time()
    run_id = run_logger.log_request_attempt('converge', params)

    valid, error = validator.validate_convergence(params)
    if not valid:
        run_logger.log_validation_failure(run_id, error.code, error.message, error.field)
        return fail(error.line(), EXIT_VALIDATION)

    f = get_reference_function(params['function'])
    interval = params['interval'] or f.interval
    try:
        report = run_convergence_study(
            f, None, interval, params['alpha'], study_family(params['family'], params['order']),
            params['end'], params['levels'], deriv=params['deriv'], samples=params['samples'],
            tolerance=order_tolerance(study_family(params['family'], params['order']),
                                      params['deriv'], settings['order_tolerances']))
    except SplineError as e:
        run_logger.log_numerical_failure(run_id, e.code, e.message)
        return fail(error_line(e), e.exit_code)

    run_logger.log_study_result(run_id, report.to_dict(), (time.time() - start_time) * 1000)
    write_report(args.out, report, args.format or settings['format'])
    print(f"{report.label}: order {report.summary_order} target {report.target} "
          f"{'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK


def cmd_limit(args, settings, validator: RequestValidator, run_logger: RunLogger) -> int:
    defaults = {'function': None, 'interval': list(DEFAULT_LIMIT_INTERVAL), 'n': 16,
                'family': 't', 'order': 2, 'end': 'I', 'alphas': [0.4, 0.2, 0.1, 0.05],
                'deriv': 0, 'samples': settings['study_samples'], 'seed': settings['seed']}
    params = study_params(args, 'limit', settings, defaults,
                          ['function', 'interval', 'n', 'family', 'order', 'end',
                           'alphas', 'deriv', 'samples', 'seed'])
    start_time = time.time()
    run_id = run_logger.log_request_attempt('limit', params)

    valid, error = validator.validate_limit(params)
    if not valid:
        run_logger.log_validation_failure(run_id, error.code, error.message, error.field)
        return fail(error.line(), EXIT_VALIDATION)

    family = study_family(params['family'], params['order'])
    try:
        partition = uniform_partition(params['interval'][0], params['interval'][1], params['n'])
        if params['function']:
            source = sample_reference(get_reference_function(params['function']), partition, params['end'])
        else:
            source = seeded_dataset(partition, params['seed'])
        report = alpha_limit_study(source, partition, (family, LIMIT_FAMILY.get(family, family)),
                                   params['alphas'], params['end'], deriv=params['deriv'],
                                   samples=params['samples'], tolerance=settings['limit_tolerance'])
    except SplineError as e:
        run_logger.log_numerical_failure(run_id, e.code, e.message)
        return fail(error_line(e), e.exit_code)

    run_logger.log_study_result(run_id, report.to_dict(), (time.time() - start_time) * 1000)
    write_report(args.out, report, args.format or settings['format'])
    print(f"{report.label}: alpha-order {report.summary_order} "
          f"{'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK


def cmd_shape(args, settings, validator: RequestValidator, run_logger: RunLogger) -> int:
    document = read_json_document(args.input) if args.input else read_csv_document(args.input_csv)
    params = {
        'property': args.property,
        'alpha0': args.alpha0 if args.alpha0 is not None else settings['alpha0'],
        'resolution': args.resolution if args.resolution is not None else settings['resolution'],
    }
    max_halvings = args.max_halvings if args.max_halvings is not None else settings['max_halvings']
    start_time = time.time()
    run_id = run_logger.log_request_attempt('shape', document if isinstance(document, dict) else {})

    valid, error = validator.validate_shape(params)
    if valid:
        valid, error = validator.validate_fit_request(_shape_as_fit_request(document, params['alpha0']))
    if not valid:
        run_logger.log_validation_failure(run_id, error.code, error.message, error.field)
        return fail(error.line(), EXIT_VALIDATION)

    prop = params['property']
    try:
        partition = make_partition(document['x'])
        data = make_dataset(partition, document['y'])
        slopes, slope_source = shape_slopes(partition, data, prop, document.get('slopes'))
        if data_has_property(data.values, prop):
            result = find_shape_preserving_alpha(partition, data, slopes, prop,
                                                 alpha0=params['alpha0'],
                                                 resolution=params['resolution'],
                                                 max_halvings=max_halvings)
        else:
            spline = fit_hermite_s2(partition, data, slopes, params['alpha0'])
            result = ShapeSearchResult(found=False, alpha=params['alpha0'], halvings=0,
                                       report=shape_check(spline, prop, params['resolution']))
    except SplineError as e:
        run_logger.log_numerical_failure(run_id, e.code, e.message)
        return fail(error_line(e), e.exit_code)

    summary = result.to_dict()
    summary.update({
        'alpha0': params['alpha0'],
        'data_has_property': data_has_property(data.values, prop),
        'slopes': slopes.tolist(),
        'slope_source': slope_source,
    })
    run_logger.log_search_result(run_id, summary, (time.time() - start_time) * 1000)
    stem, _ = os.path.splitext(args.out)
    write_json(f"{stem}.json", summary)

    if not result.found:
        witness = result.report.witness
        return fail(f"E025 property: {prop} not reached after {result.halvings} halvings "
                    f"(alpha {result.alpha:.6g}, witness x={witness})", EXIT_SEARCH)
    print(f"{prop}: alpha* = {result.alpha!r} after {result.halvings} halvings")
    return EXIT_OK


def _shape_as_fit_request(document: Any, alpha0: float) -> Any:
    """Shape input checked with the fit validator as a Hermite request"""
    if not isinstance(document, dict):
        return document
    request = {'x': document.get('x'), 'y': document.get('y'), 'alpha': alpha0,
               'order': 2, 'family': 's', 'end': {'type': 'II'}}
    for key in ('x', 'y'):
        if key not in document:
            del request[key]
    if document.get('slopes') is not None:
        request['slopes'] = document['slopes']
    return request


def shape_slopes(partition, data, prop: str, given):
    """Node slopes for a shape search and where they came from"""
    if given is not None:
        return np.asarray(given, dtype=float), 'input'
    if prop in ('monotone_up', 'monotone_down'):
        return monotone_slopes(partition, data), 'fritsch_carlson'
    spline = fit_cubic(partition, data, EndCondition.type_ii())
    return np.asarray(spline.evaluate(partition.nodes, 1), dtype=float), 'natural_cubic'


COMMANDS = {
    'fit': cmd_fit,
    'converge': cmd_converge,
    'limit': cmd_limit,
    'shape': cmd_shape,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    settings = load_config(args.config)
    if args.debug is not None:
        settings['debug'] = args.debug
    if args.seed is not None:
        settings['seed'] = args.seed

    validator = RequestValidator(functions=sorted(REFERENCE_FUNCTIONS))
    run_logger = make_run_logger(settings)
    try:
        with run_logger:
            return COMMANDS[args.command](args, settings, validator, run_logger)
    except UsageError as e:
        return fail(e.error.line(), EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())
