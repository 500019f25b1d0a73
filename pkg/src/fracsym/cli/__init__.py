"""Command-line interface and run configuration."""

from __future__ import annotations

from fracsym.cli.app import main, run
from fracsym.cli.config import RunConfig, parse_config

__all__ = ["RunConfig", "main", "parse_config", "run"]
