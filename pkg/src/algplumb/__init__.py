"""Algebraic plumbing graphs: exact invariants, reduction and equivalence tests."""

from .graph import PlumbingGraph, UVertex, parse, serialize
from .invariants import InvariantSystem, constants, invariant_system

__all__ = ["PlumbingGraph", "UVertex", "parse", "serialize", "InvariantSystem", "constants", "invariant_system"]
__version__ = "0.1.0"
