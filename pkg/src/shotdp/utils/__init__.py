"""
Logging and serialization helpers
"""

from shotdp.utils import serialization
from shotdp.utils.logger import (
    LogContext,
    log_metrics,
    setup_logger,
    setup_system_logger,
)

__all__ = [
    "serialization",
    "LogContext",
    "log_metrics",
    "setup_logger",
    "setup_system_logger",
]
