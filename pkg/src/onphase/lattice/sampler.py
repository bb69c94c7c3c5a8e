"""Markov-chain drivers: single updates and full measurement runs.

A single chain is strictly sequential; independent chains (different
temperature or seed) may run in parallel. Per-chain generators derive from
``SeedSequence((master_seed, chain_index))`` so results do not depend on
scheduling order, see :func:`chain_rng`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CapacityError, ValidationError
from .kernels import metropolis_sweep_kernel, wolff_update_kernel
from .model import SpinLattice, cold_lattice, hot_lattice, lattice_energy

DEFAULT_SITE_CAP = 1 << 20
_BOOKKEEPING_TOL = 1e-8

# adaptive cone width for N>=2 Metropolis proposals, tuned toward 40-60%
# acceptance during thermalization and frozen afterwards
_SIGMA_INITIAL = 1.0
_SIGMA_MIN, _SIGMA_MAX = 1e-3, 1e3
_ACCEPT_LOW, _ACCEPT_HIGH = 0.4, 0.6


@dataclass
class ObservableSeries:
    """Per-measurement energy and magnetization samples from one chain."""

    temperature: float
    energies: np.ndarray  # total energy, one entry per measurement sweep
    magnetizations: np.ndarray  # (measurements, N) mean spin vector
    thermalization_sweeps: int
    measurement_sweeps: int
    seed: int
    d: int = 0
    side: int = 0
    N: int = 1
    coupling: float = 1.0
    sampler: str = "metropolis"

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=np.float64)
        self.magnetizations = np.atleast_2d(np.asarray(self.magnetizations, dtype=np.float64))
        if self.energies.size < 1:
            raise ValidationError("a series needs at least one measurement")
        if not (np.isfinite(self.energies).all() and np.isfinite(self.magnetizations).all()):
            raise ValidationError("series samples must be finite")

    @property
    def volume(self) -> int:
        return self.side**self.d


def metropolis_sweep(lat: SpinLattice, T: float, rng, cone_sigma: float = _SIGMA_INITIAL) -> SpinLattice:
    """One attempted single-site update per site; mutates and returns ``lat``."""
    if T <= 0:
        raise ValidationError("temperature must be positive")
    metropolis_sweep_kernel(lat.spins, lat.geometry, lat.coupling, T, cone_sigma, rng)
    return lat


def wolff_update(lat: SpinLattice, T: float, rng) -> SpinLattice:
    """One cluster reflection move; mutates and returns ``lat``."""
    if T <= 0:
        raise ValidationError("temperature must be positive")
    wolff_update_kernel(lat.spins, lat.geometry, lat.coupling, T, rng)
    return lat


def chain_rng(master_seed: int, chain_index: int) -> np.random.Generator:
    """Generator for chain ``chain_index`` of a run seeded by ``master_seed``."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, chain_index)))


def run_simulation(
    d: int,
    side: int,
    N: int,
    T: float,
    thermalization_sweeps: int,
    measurement_sweeps: int,
    sampler: str = "metropolis",
    seed: int = 0,
    start: str = "hot",
    coupling: float = 1.0,
    site_cap: int = DEFAULT_SITE_CAP,
    check_interval: int = 64,
) -> ObservableSeries:
    """Thermalize, then record total energy and mean spin once per sweep.

    For ``sampler="wolff"`` one sweep is one cluster update. The energy is
    tracked incrementally from the kernels' delta-E reports and verified
    against a from-scratch recomputation every ``check_interval`` sweeps.
    """
    if side**d > site_cap:
        raise CapacityError(f"{side}^{d} sites exceed the configured cap of {site_cap}")
    if T <= 0:
        raise ValidationError("temperature must be positive")
    if thermalization_sweeps < 0 or measurement_sweeps < 1:
        raise ValidationError("need thermalization >= 0 and measurements >= 1")
    if sampler not in ("metropolis", "wolff"):
        raise ValidationError(f"unknown sampler {sampler!r}")
    if start not in ("hot", "cold"):
        raise ValidationError(f"unknown start {start!r}")

    rng = np.random.default_rng(seed)
    if start == "cold":
        lat = cold_lattice(d, side, N, coupling)
    else:
        lat = hot_lattice(d, side, N, rng, coupling)
    geom = lat.geometry
    n_sites = geom.n_sites

    energy = lattice_energy(lat)
    sigma = _SIGMA_INITIAL

    def step(adapting: bool):
        nonlocal energy, sigma
        if sampler == "metropolis":
            accepted, de = metropolis_sweep_kernel(lat.spins, geom, coupling, T, sigma, rng)
            if adapting and N >= 2:
                rate = accepted / n_sites
                if rate > _ACCEPT_HIGH:
                    sigma = min(sigma * 1.05, _SIGMA_MAX)
                elif rate < _ACCEPT_LOW:
                    sigma = max(sigma * 0.95, _SIGMA_MIN)
        else:
            _, de = wolff_update_kernel(lat.spins, geom, coupling, T, rng)
        energy += de

    def resync(sweep_index: int):
        nonlocal energy
        recomputed = lattice_energy(lat)
        if abs(energy - recomputed) > _BOOKKEEPING_TOL:
            raise RuntimeError(
                f"energy bookkeeping drifted to {abs(energy - recomputed):.3e} "
                f"at sweep {sweep_index}"
            )
        if N >= 2:
            lat.renormalize()
            recomputed = lattice_energy(lat)
        energy = recomputed

    for sweep in range(thermalization_sweeps):
        step(adapting=True)
        if (sweep + 1) % check_interval == 0:
            resync(sweep)

    energies = np.empty(measurement_sweeps)
    mags = np.empty((measurement_sweeps, N))
    for sweep in range(measurement_sweeps):
        step(adapting=False)
        if (sweep + 1) % check_interval == 0:
            resync(sweep)
        energies[sweep] = energy
        mags[sweep] = lat.spins.mean(axis=0)

    return ObservableSeries(
        temperature=float(T),
        energies=energies,
        magnetizations=mags,
        thermalization_sweeps=thermalization_sweeps,
        measurement_sweeps=measurement_sweeps,
        seed=seed,
        d=d,
        side=side,
        N=N,
        coupling=coupling,
        sampler=sampler,
    )
