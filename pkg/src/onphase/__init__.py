"""Phase-transition analysis of text generation via a spin-model energy.

The package computes a pairwise token-embedding energy over generation
temperature sweeps, fits the two-branch critical law to extract exponents
and an internal dimension, and validates the fitting machinery against a
first-principles lattice Monte Carlo simulator with exact small-lattice
oracles.
"""

__version__ = "0.1.0"

from . import energy, errors, graphs, ingest, lattice, runs, scaling, sweep

__all__ = [
    "energy",
    "errors",
    "graphs",
    "ingest",
    "lattice",
    "runs",
    "scaling",
    "sweep",
    "__version__",
]
