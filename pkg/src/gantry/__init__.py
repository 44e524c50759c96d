"""Desk-scale cluster manager simulation.

Importing the package wires every operation handler into the job registry.
"""

from . import lifecycle, membership, simops  # noqa: F401  (op registration)
from .engine import Engine
from .testbed import build_engine, default_lab

__all__ = ["Engine", "build_engine", "default_lab"]
__version__ = "0.1.0"
