"""
Configuration module for shotdp
"""

from shotdp.config.system import LogLevel, SystemConfig

__all__ = [
    "LogLevel",
    "SystemConfig",
]
