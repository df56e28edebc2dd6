"""
Logging helpers for training runs and experiment grids
"""

import logging
import sys
import time
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Mapping, Optional

from shotdp.config import SystemConfig

PACKAGE_LOGGER = "shotdp"

LOG_FILE_NAME = "shotdp.log"

# 10MB per file, 5 backups
_MAX_LOG_BYTES = 10 * 1024 * 1024
_LOG_BACKUPS = 5


def setup_logger(
    name: str = PACKAGE_LOGGER,
    level: str = "INFO",
    log_file: Optional[str] = None,
    format_str: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
) -> logging.Logger:
    """
    Configure a logger writing to stderr and, optionally, a rotating file

    Calling it again replaces the handlers instead of adding more.

    Args:
        name: Logger name (the package logger by default)
        level: Level name (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Log file path; parent directories are created
        format_str: Record format

    Returns:
        Configured logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(format_str)
    # stdout carries command output
    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setFormatter(formatter)
    logger.addHandler(stderr_handler)

    if log_file:
        try:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=_MAX_LOG_BYTES,
                backupCount=_LOG_BACKUPS,
                encoding="utf-8",
            )
        except OSError as e:
            logger.warning(f"Logging to console only, cannot open {log_file}: {e}")
        else:
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    return logger


def setup_system_logger(config: SystemConfig) -> logging.Logger:
    """
    Configure the package logger from system settings

    With ``enable_logging`` and no explicit ``log_file``, records also go to
    ``shotdp.log`` inside ``log_directory``.

    Args:
        config: System configuration

    Returns:
        The package logger
    """
    log_file = config.log_file
    if log_file is None and config.enable_logging:
        log_file = str(Path(config.log_directory) / LOG_FILE_NAME)
    return setup_logger(
        PACKAGE_LOGGER,
        level=config.log_level.value,
        log_file=log_file,
        format_str=config.log_format,
    )


def log_metrics(
    logger: logging.Logger, metrics: Mapping[str, Any], level: int = logging.DEBUG
) -> None:
    """
    Log one metrics row as ``key=value`` pairs, skipping unset values

    ``{"step": 3, "loss": 0.41, "sigma2": None}`` is logged as
    ``step=3 loss=0.41``.
    """
    if not logger.isEnabledFor(level):
        return
    text = " ".join(f"{k}={v}" for k, v in metrics.items() if v is not None)
    logger.log(level, text)


class LogContext:
    """
    Context manager reporting start, completion and failure of a unit of work

    The elapsed time stays available as ``duration`` after the block.

    Example:
        >>> with LogContext(logger, "cell bars_stripes_qshiftdp_eps1") as ctx:
        ...     run()
        >>> ctx.duration
    """

    def __init__(
        self,
        logger: logging.Logger,
        operation: str,
        start_level: int = logging.DEBUG,
        end_level: int = logging.INFO,
        error_level: int = logging.ERROR,
    ):
        self.logger = logger
        self.operation = operation
        self.start_level = start_level
        self.end_level = end_level
        self.error_level = error_level
        self.duration: Optional[float] = None
        self._started: Optional[float] = None

    def __enter__(self) -> "LogContext":
        self._started = time.perf_counter()
        self.logger.log(self.start_level, f"Starting: {self.operation}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> bool:
        self.duration = time.perf_counter() - self._started
        if exc_type is None:
            self.logger.log(
                self.end_level, f"Completed: {self.operation} in {self.duration:.2f}s"
            )
        else:
            self.logger.log(
                self.error_level,
                f"Failed: {self.operation} after {self.duration:.2f}s ({exc_val})",
            )
        return False
