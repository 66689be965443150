#!/usr/bin/env python3
"""
Run Audit Logger

Audit trail for fits and studies run through the command line: request
attempts, validation and numerical failures, successful fits with latency,
study verdicts and shape-search outcomes.
"""

import json
import logging
import os
from datetime import datetime
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Optional


class RunLogger:
    """
    Audit logger for polyspline runs

    Entries go to a dedicated non-propagating logger, either as JSON lines
    or as human-readable text. With enabled=False every call still updates
    the statistics but nothing is written.
    """

    LEVEL_DEBUG = logging.DEBUG
    LEVEL_INFO = logging.INFO
    LEVEL_WARNING = logging.WARNING
    LEVEL_ERROR = logging.ERROR

    LOGGER_NAME = 'polyspline_runs'

    def __init__(self,
                 log_file: str = 'logs/polyspline_runs.log',
                 log_level: int = LEVEL_INFO,
                 max_bytes: int = 10 * 1024 * 1024,
                 backup_count: int = 5,
                 json_format: bool = True,
                 console_output: bool = False,
                 enabled: bool = True):
        """
        Initialize run logger

        Args:
            log_file: Path to log file
            log_level: Minimum log level
            max_bytes: Maximum log file size before rotation
            backup_count: Number of rotated files to keep
            json_format: JSON lines if True, human-readable otherwise
            console_output: Also write entries to stderr
            enabled: Write entries at all
        """
        self.log_file = log_file
        self.json_format = json_format

        self.logger = logging.getLogger(self.LOGGER_NAME)
        self.logger.setLevel(log_level)
        self.logger.propagate = False
        for handler in list(self.logger.handlers):
            handler.close()
        self.logger.handlers = []

        if enabled:
            log_dir = os.path.dirname(log_file)
            if log_dir and not os.path.exists(log_dir):
                os.makedirs(log_dir)
            file_handler = RotatingFileHandler(log_file, maxBytes=max_bytes, backupCount=backup_count)
            file_handler.setLevel(log_level)
            file_handler.setFormatter(self._formatter())
            self.logger.addHandler(file_handler)
            if console_output:
                console_handler = logging.StreamHandler()
                console_handler.setLevel(log_level)
                console_handler.setFormatter(self._formatter())
                self.logger.addHandler(console_handler)
        else:
            self.logger.addHandler(logging.NullHandler())

        self.reset_stats()

    def _formatter(self) -> logging.Formatter:
        if self.json_format:
            return logging.Formatter('%(message)s')
        return logging.Formatter('%(asctime)s - %(levelname)s - %(message)s',
                                 datefmt='%Y-%m-%d %H:%M:%S')

    # =========================================================================
    # Main Logging Methods
    # =========================================================================

    def log_request_attempt(self, command: str, request: Dict[str, Any]) -> int:
        """
        Log a run request before validation

        Returns:
            Run ID for tracking
        """
        self.stats['total_runs'] += 1
        run_id = self.stats['total_runs']
        self._log(logging.DEBUG, {
            'event': 'request_attempt',
            'run_id': run_id,
            'command': command,
            'family': request.get('family'),
            'order': request.get('order'),
            'alpha': request.get('alpha'),
            'nodes': len(request['x']) if isinstance(request.get('x'), list) else None,
        })
        return run_id

    def log_validation_failure(self, run_id: int, error_code: str,
                               error_message: str, field: Optional[str] = None):
        self.stats['validation_failures'] += 1
        self.stats['failed_runs'] += 1
        self._log(logging.WARNING, {
            'event': 'validation_failure',
            'run_id': run_id,
            'error_code': error_code,
            'error_message': error_message,
            'field': field,
        })

    def log_numerical_failure(self, run_id: int, error_code: str, error_message: str,
                              details: Optional[Dict[str, Any]] = None):
        self.stats['numerical_failures'] += 1
        self.stats['failed_runs'] += 1
        entry = {
            'event': 'numerical_failure',
            'run_id': run_id,
            'error_code': error_code,
            'error_message': error_message,
        }
        if details:
            entry['details'] = details
        self._log(logging.ERROR, entry)

    def log_fit_success(self, run_id: int, representation: str,
                        intervals: int, rows: int, latency_ms: float):
        self.stats['successful_runs'] += 1
        self.stats['total_latency_ms'] += latency_ms
        self._log(logging.INFO, {
            'event': 'fit_success',
            'run_id': run_id,
            'representation': representation,
            'intervals': intervals,
            'rows': rows,
            'latency_ms': round(latency_ms, 2),
        })

    def log_study_result(self, run_id: int, report: Dict[str, Any], latency_ms: float):
        self.stats['successful_runs'] += 1
        self.stats['total_latency_ms'] += latency_ms
        self._log(logging.INFO, {
            'event': 'study_result',
            'run_id': run_id,
            'label': report.get('label'),
            'summary_order': report.get('summary_order'),
            'target': report.get('target'),
            'pass': report.get('pass'),
            'latency_ms': round(latency_ms, 2),
        })

    def log_search_result(self, run_id: int, result: Dict[str, Any], latency_ms: float):
        if result.get('found'):
            self.stats['successful_runs'] += 1
        else:
            self.stats['search_failures'] += 1
            self.stats['failed_runs'] += 1
        self.stats['total_latency_ms'] += latency_ms
        self._log(logging.INFO if result.get('found') else logging.WARNING, {
            'event': 'search_result',
            'run_id': run_id,
            'found': result.get('found'),
            'alpha': result.get('alpha'),
            'halvings': result.get('halvings'),
            'latency_ms': round(latency_ms, 2),
        })

    def log_system_event(self, event_type: str, message: str,
                         details: Optional[Dict[str, Any]] = None,
                         level: int = LEVEL_INFO):
        entry = {'event': event_type, 'message': message}
        if details:
            entry['details'] = details
        self._log(level, entry)

    # =========================================================================
    # Internal Methods
    # =========================================================================

    def _log(self, level: int, entry: Dict[str, Any]):
        entry = {'timestamp': datetime.now().isoformat(), **entry}
        if self.json_format:
            message = json.dumps(entry)
        else:
            message = self._format_human_readable(entry)
        self.logger.log(level, message)

    @staticmethod
    def _format_human_readable(entry: Dict[str, Any]) -> str:
        event = entry.get('event', 'unknown')
        run_id = entry.get('run_id')

        if event == 'request_attempt':
            return f"[{run_id}] Attempt: {entry.get('command')} family={entry.get('family')} order={entry.get('order')} alpha={entry.get('alpha')}"
        elif event == 'validation_failure':
            return f"[{run_id}] Validation Failed: {entry.get('error_code')} {entry.get('field')}: {entry.get('error_message')}"
        elif event == 'numerical_failure':
            return f"[{run_id}] Numerical Failure: {entry.get('error_code')}: {entry.get('error_message')}"
        elif event == 'fit_success':
            return f"[{run_id}] Fit: {entry.get('representation')} N={entry.get('intervals')} - {entry.get('rows')} rows in {entry.get('latency_ms')}ms"
        elif event == 'study_result':
            return f"[{run_id}] Study: {entry.get('label')} order={entry.get('summary_order')} target={entry.get('target')} pass={entry.get('pass')}"
        elif event == 'search_result':
            return f"[{run_id}] Shape search: found={entry.get('found')} alpha={entry.get('alpha')} after {entry.get('halvings')} halvings"
        else:
            return f"{event}: {entry.get('message', json.dumps(entry))}"

    # =========================================================================
    # Statistics and Reporting
    # =========================================================================

    def get_stats(self) -> Dict[str, Any]:
        stats = self.stats.copy()
        if stats['successful_runs'] > 0:
            stats['avg_latency_ms'] = round(stats['total_latency_ms'] / stats['successful_runs'], 2)
        else:
            stats['avg_latency_ms'] = 0
        if stats['total_runs'] > 0:
            stats['success_rate'] = round(stats['successful_runs'] / stats['total_runs'] * 100, 2)
        else:
            stats['success_rate'] = 0
        return stats

    def reset_stats(self):
        self.stats = {
            'total_runs': 0,
            'successful_runs': 0,
            'failed_runs': 0,
            'validation_failures': 0,
            'numerical_failures': 0,
            'search_failures': 0,
            'total_latency_ms': 0.0,
        }

    def close(self):
        for handler in list(self.logger.handlers):
            handler.close()
            self.logger.removeHandler(handler)

    # =========================================================================
    # Context Manager Support
    # =========================================================================

    def __enter__(self):
        self.log_system_event('run_start', 'Run logging started')
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.log_system_event('run_stop', 'Run logging stopped', details=self.get_stats())
        self.close()
