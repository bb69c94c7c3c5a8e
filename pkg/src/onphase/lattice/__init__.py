"""Lattice spin-model Monte Carlo with exact small-lattice oracles.

Hot update loops live in a compiled extension (:mod:`._kernels`, built from
Cython) with a pure-numpy fallback (:mod:`._pure`); the backend is selected
at import time, see :mod:`.kernels`.
"""

from .exact import enumerate_exact, onsager_energy
from .kernels import active_backend
from .model import (
    CouplingTensors,
    PottsBasis,
    SpinLattice,
    cold_lattice,
    coupling_tensors,
    hot_lattice,
    lattice_energy,
    potts_basis,
)
from .observables import (
    correlation_function,
    fit_correlation_length,
    fit_nu,
    fluctuation_specific_heat,
    susceptibility,
)
from .sampler import ObservableSeries, chain_rng, metropolis_sweep, run_simulation, wolff_update

__all__ = [
    "CouplingTensors",
    "ObservableSeries",
    "PottsBasis",
    "SpinLattice",
    "active_backend",
    "chain_rng",
    "cold_lattice",
    "correlation_function",
    "coupling_tensors",
    "enumerate_exact",
    "fit_correlation_length",
    "fit_nu",
    "fluctuation_specific_heat",
    "hot_lattice",
    "lattice_energy",
    "metropolis_sweep",
    "onsager_energy",
    "potts_basis",
    "run_simulation",
    "susceptibility",
    "wolff_update",
]
