"""Exact Vinberg-algorithm and chirality computations for even hyperbolic lattices."""
from .lattice import Lattice, build_lattice, parse_preset
from .vinberg import vinberg_run
from .chirality import classify_chirality

__all__ = ["Lattice", "build_lattice", "parse_preset", "vinberg_run", "classify_chirality"]
__version__ = "0.1.0"
