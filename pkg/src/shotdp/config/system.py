"""
Process-wide settings: logging, result output and parallelism
"""

import os
from dataclasses import dataclass, fields
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

from dotenv import load_dotenv

ENV_PREFIX = "SHOTDP_"


class LogLevel(Enum):
    """Logging levels"""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


def _parse_bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def _parse_level(text: str) -> LogLevel:
    return LogLevel(text.strip().upper())


# field name -> parser of the SHOTDP_<FIELD> variable
_ENV_PARSERS: Tuple[Tuple[str, Callable[[str], Any]], ...] = (
    ("log_level", _parse_level),
    ("log_format", str),
    ("log_file", str),
    ("enable_logging", _parse_bool),
    ("log_directory", str),
    ("output_directory", str),
    ("significant_digits", int),
    ("workers", int),
)


@dataclass
class SystemConfig:
    """
    Process-wide settings of shotdp

    Experiment settings live in ``ExperimentConfig``; this class only covers
    logging, output location and parallelism.

    Example:
    >>> from shotdp.config import SystemConfig

    >>> config = SystemConfig(workers=4)

    >>> # SHOTDP_* variables, also read from a .env file
    >>> config = SystemConfig.from_env()
    """

    log_level: LogLevel = LogLevel.INFO
    """Level of the package logger"""

    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    """Logging format string"""

    log_file: Optional[str] = None
    """Explicit log file (stderr only when None and file logging is off)"""

    enable_logging: bool = False
    """Write ``shotdp.log`` into ``log_directory``"""

    log_directory: str = "./logs"
    """Directory for the log file"""

    output_directory: str = "./results"
    """Default directory for metrics and summaries"""

    significant_digits: int = 17
    """Significant digits of floats in written results"""

    workers: int = 1
    """Worker processes for experiment grids"""

    @classmethod
    def from_env(cls) -> "SystemConfig":
        """
        Read ``SHOTDP_<FIELD>`` environment variables

        A ``.env`` file in the working directory is loaded first. Values that
        do not parse leave the default in place.

        Returns:
            SystemConfig instance
        """
        load_dotenv()
        config = cls()
        for name, parse in _ENV_PARSERS:
            raw = os.getenv(f"{ENV_PREFIX}{name.upper()}")
            if not raw:
                continue
            try:
                setattr(config, name, parse(raw))
            except ValueError:
                continue
        return config

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SystemConfig":
        """
        Create a SystemConfig from a dictionary

        Unknown keys and unknown log levels are ignored.

        Args:
            data: Field values; ``log_level`` may be a level name

        Returns:
            SystemConfig instance
        """
        known = {f.name for f in fields(cls)}
        config = cls()
        for key, value in data.items():
            if key not in known:
                continue
            if key == "log_level" and isinstance(value, str):
                try:
                    value = _parse_level(value)
                except ValueError:
                    continue
            setattr(config, key, value)
        return config

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary format, log level as its name"""
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["log_level"] = self.log_level.value
        return data

    def validate(self) -> Dict[str, List[str]]:
        """
        Validate the configuration

        Returns:
            Mapping of field name to error messages (empty if valid)
        """
        errors: Dict[str, List[str]] = {}

        def fail(name: str, message: str) -> None:
            errors.setdefault(name, []).append(message)

        if not isinstance(self.log_level, LogLevel):
            fail("log_level", "Must be a LogLevel enum")
        if self.workers < 1:
            fail("workers", "Must be positive")
        if not 1 <= self.significant_digits <= 17:
            fail("significant_digits", "Must be between 1 and 17")
        if not self.output_directory:
            fail("output_directory", "Cannot be empty")
        return errors

    def is_valid(self) -> bool:
        """Check if the configuration is valid"""
        return not self.validate()
