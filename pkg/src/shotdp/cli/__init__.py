"""
Command-line interface module
"""

from shotdp.cli.main import cli

__all__ = [
    "cli",
]
