"""
Analysis Logger - utils/analysis_logger.py
Named loggers for commands, analysis events and errors, with session statistics
"""

import json
import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import psutil


class AnalysisLogger:
    """Logger family for analyzer sessions"""

    def __init__(self, app_name: str = "syncshape", log_level: str = "INFO",
                 log_dir: Optional[str] = None, memory_monitoring: bool = False):
        self.app_name = app_name
        self.log_dir = log_dir
        self.memory_monitoring = memory_monitoring
        self.setup_loggers(log_level)

        self.stats = {
            'commands_executed': 0,
            'runs_executed': 0,
            'bundles_built': 0,
            'formulas_evaluated': 0,
            'violations_found': 0,
            'errors_encountered': 0,
            'session_start': datetime.now()
        }

    def setup_loggers(self, log_level: str):
        """Console handlers everywhere, file handlers when a log directory is set"""
        level = getattr(logging, log_level.upper(), logging.INFO)

        file_formatter = logging.Formatter(
            fmt='%(asctime)s | %(name)s | %(levelname)s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        console_formatter = logging.Formatter(
            fmt='%(asctime)s | %(levelname)s | %(message)s',
            datefmt='%H:%M:%S'
        )

        if self.log_dir:
            Path(self.log_dir).mkdir(parents=True, exist_ok=True)

        # === ANALYSIS LOGGER ===
        self.analysis_logger = self._make_logger('analysis', level, console_formatter,
                                                 file_formatter, 'analysis.log', console=True)
        # === COMMAND LOGGER ===
        self.command_logger = self._make_logger('commands', max(level, logging.INFO), console_formatter,
                                                file_formatter, 'commands.log', console=True)
        # === ERROR LOGGER ===
        self.error_logger = self._make_logger('errors', logging.WARNING, console_formatter,
                                              file_formatter, 'errors.log', console=True)

    def _make_logger(self, suffix: str, level: int, console_formatter: logging.Formatter,
                     file_formatter: logging.Formatter, filename: str, console: bool) -> logging.Logger:
        logger = logging.getLogger(f'{self.app_name}.{suffix}')
        logger.setLevel(level)
        logger.handlers.clear()
        logger.propagate = False

        if self.log_dir:
            try:
                file_handler = logging.FileHandler(os.path.join(self.log_dir, filename), encoding='utf-8')
                file_handler.setLevel(logging.DEBUG)
                file_handler.setFormatter(file_formatter)
                logger.addHandler(file_handler)
            except OSError as e:
                print(f"Warning: Could not create {filename}: {e}")

        if console:
            console_handler = logging.StreamHandler()
            console_handler.setLevel(level)
            console_handler.setFormatter(console_formatter)
            logger.addHandler(console_handler)
        return logger

    def safe_log(self, logger, level, message):
        """Never let a logging failure break an analysis"""
        try:
            if hasattr(logger, level):
                getattr(logger, level)(message)
            else:
                logger.info(message)
        except Exception as e:
            print(f"[LOGGING ERROR] {datetime.now()}: {message}")
            print(f"[LOGGING ERROR] Exception: {e}")

    def log_command_execution(self, command_name: str, args: Dict[str, Any] = None,
                              execution_time: float = None, exit_code: int = None):
        self.stats['commands_executed'] += 1
        self.safe_log(self.command_logger, 'info', f"⚡ COMMAND EXECUTED: {command_name}")
        if args:
            try:
                self.safe_log(self.command_logger, 'info', f"   📝 Args: {json.dumps(args, default=str)}")
            except (TypeError, ValueError):
                self.safe_log(self.command_logger, 'info', f"   📝 Args: {args}")
        if execution_time is not None:
            self.safe_log(self.command_logger, 'info', f"   ⏱️  Time: {round(execution_time * 1000, 2)}ms")
        if exit_code is not None:
            emoji = "✅" if exit_code == 0 else "⚠️" if exit_code == 1 else "❌"
            self.safe_log(self.command_logger, 'info', f"   {emoji} Exit code: {exit_code}")

    def log_analysis_event(self, event_name: str, data: Dict[str, Any] = None):
        if event_name in ('bundle_built', 'bundle_sampled'):
            self.stats['bundles_built'] += 1
        elif event_name == 'run_executed':
            self.stats['runs_executed'] += 1
        elif event_name == 'formula_evaluated':
            self.stats['formulas_evaluated'] += 1

        self.safe_log(self.analysis_logger, 'debug', f"📡 EVENT: {event_name}")
        if data:
            try:
                self.safe_log(self.analysis_logger, 'debug', f"   📋 Data: {json.dumps(data, default=str)}")
            except (TypeError, ValueError):
                self.safe_log(self.analysis_logger, 'debug', f"   📋 Data: {data}")

    def log_violation(self, suite: str, detail: str):
        self.stats['violations_found'] += 1
        self.safe_log(self.analysis_logger, 'warning', f"🚨 VIOLATION [{suite}]: {detail}")

    def log_error(self, error: Exception, context: str = None):
        self.stats['errors_encountered'] += 1
        self.safe_log(self.error_logger, 'error', f"💥 ERROR: {type(error).__name__}")
        self.safe_log(self.error_logger, 'error', f"   📝 Message: {error}")
        if context:
            self.safe_log(self.error_logger, 'error', f"   🔍 Context: {context}")

    def memory_usage_mb(self) -> float:
        try:
            return psutil.Process(os.getpid()).memory_info().rss / 1024 / 1024
        except psutil.Error:
            return 0.0

    def log_session_stats(self):
        duration = datetime.now() - self.stats['session_start']
        self.safe_log(self.analysis_logger, 'info', "📈 SESSION STATISTICS")
        self.safe_log(self.analysis_logger, 'info', f"   ⏰ Duration: {duration}")
        self.safe_log(self.analysis_logger, 'info', f"   ⚡ Commands: {self.stats['commands_executed']}")
        self.safe_log(self.analysis_logger, 'info', f"   🏃 Runs: {self.stats['runs_executed']}")
        self.safe_log(self.analysis_logger, 'info', f"   📦 Bundles: {self.stats['bundles_built']}")
        self.safe_log(self.analysis_logger, 'info', f"   🧠 Formulas: {self.stats['formulas_evaluated']}")
        self.safe_log(self.analysis_logger, 'info', f"   🚨 Violations: {self.stats['violations_found']}")
        self.safe_log(self.analysis_logger, 'info', f"   💥 Errors: {self.stats['errors_encountered']}")
        if self.memory_monitoring:
            self.safe_log(self.analysis_logger, 'info', f"   💾 Memory: {self.memory_usage_mb():.1f} MB")

    def debug_dump(self, data: Any, title: str = "DEBUG DUMP"):
        self.safe_log(self.analysis_logger, 'debug', f"🔧 {title}")
        try:
            self.safe_log(self.analysis_logger, 'debug', f"   {json.dumps(data, default=str, indent=2)}")
        except (TypeError, ValueError):
            self.safe_log(self.analysis_logger, 'debug', f"   {data}")


# Global logger instance
analysis_logger: Optional[AnalysisLogger] = None


def init_analysis_logger(app_name: str = "syncshape", log_level: str = "INFO", log_dir: Optional[str] = None,
                         memory_monitoring: bool = False) -> AnalysisLogger:
    """Initialize the global analysis logger"""
    global analysis_logger
    analysis_logger = AnalysisLogger(app_name, log_level, log_dir, memory_monitoring)
    return analysis_logger


def get_analysis_logger() -> Optional[AnalysisLogger]:
    return analysis_logger


# Convenience functions, no-ops before init_analysis_logger
def log_command(command_name: str, args: Dict[str, Any] = None, execution_time: float = None,
                exit_code: int = None):
    if analysis_logger:
        analysis_logger.log_command_execution(command_name, args, execution_time, exit_code)


def log_event(event_name: str, data: Dict[str, Any] = None):
    if analysis_logger:
        analysis_logger.log_analysis_event(event_name, data)


def log_violation(suite: str, detail: str):
    if analysis_logger:
        analysis_logger.log_violation(suite, detail)


def log_error(error: Exception, context: str = None):
    if analysis_logger:
        analysis_logger.log_error(error, context)


def debug_dump(data: Any, title: str = "DEBUG DUMP"):
    if analysis_logger:
        analysis_logger.debug_dump(data, title)
