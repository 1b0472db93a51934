#!/usr/bin/env python3
"""
Centralized logging utility for the Finsler weak-field lab
"""

import functools
import logging
import sys
from pathlib import Path

from config import config

DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
CONSOLE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'


def _level() -> int:
    return getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)


class FieldLogger:
    """Per-name loggers for the field lab; stdout is reserved for CSV/JSON artifacts"""

    _instances = {}

    @staticmethod
    def _console_handler() -> logging.Handler:
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(_level())
        handler.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt=DATE_FORMAT))
        return handler

    @staticmethod
    def _file_handler(path: str) -> logging.Handler:
        log_path = Path(path)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(log_path)
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
        return handler

    @classmethod
    def get_logger(cls, name: str = "fieldlab") -> logging.Logger:
        """Get or create logger instance"""
        if name in cls._instances:
            return cls._instances[name]

        logger = logging.getLogger(name)
        logger.propagate = False
        logger.handlers.clear()
        logger.addHandler(cls._console_handler())
        if config.LOG_FILE:
            logger.addHandler(cls._file_handler(config.LOG_FILE))
            logger.setLevel(logging.DEBUG)
        else:
            logger.setLevel(_level())

        cls._instances[name] = logger
        return logger


def log_execution(func):
    """Log start, completion and failure of a CLI command"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = FieldLogger.get_logger()
        logger.info(f"Executing {func.__name__}")
        try:
            result = func(*args, **kwargs)
            logger.info(f"Completed {func.__name__} (exit {result})")
            return result
        except Exception as e:
            logger.error(f"Error in {func.__name__}: {str(e)}", exc_info=True)
            raise
    return wrapper


def log_suite_result(suite: str, residual: float, threshold: float, passed: bool):
    """Log identity-suite results for the audit trail"""
    logger = FieldLogger.get_logger("verify")
    status = "PASS" if passed else "FAIL"
    logger.info(f"SUITE: {suite} residual={residual:.3e} threshold={threshold:.1e} {status}")


def log_artifact(path: str, size: int):
    """Log a written CSV/JSON artifact"""
    logger = FieldLogger.get_logger("artifacts")
    logger.info(f"ARTIFACT: {path} ({size} bytes)")


# Create default logger instance
logger = FieldLogger.get_logger()
