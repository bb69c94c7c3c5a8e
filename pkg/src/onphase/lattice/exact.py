"""Exact small-lattice Ising results: brute-force enumeration and Onsager.

Enumeration works through the density of states: every configuration of an
n-site lattice is an n-bit integer, the number of antialigned bonds is
counted with vectorized bit operations, and thermal averages at any
temperature reduce to sums over the (few) distinct energy levels. The cap is
2^24 configurations.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import ellipk

from ..errors import CapacityError
from .geometry import geometry

ENUMERATION_CAP_SITES = 24
_CHUNK = 1 << 20


@lru_cache(maxsize=16)
def _density_of_states(d: int, side: int):
    """Counts of configurations per number of antialigned bonds."""
    n = side**d
    if n > ENUMERATION_CAP_SITES:
        raise CapacityError(
            f"{side}^{d} = {n} sites exceeds the enumeration cap of {ENUMERATION_CAP_SITES}"
        )
    targets = geometry(d, side).bond_targets
    bonds = [(s, int(targets[s, a])) for s in range(n) for a in range(d)]
    n_bonds = len(bonds)
    dos = np.zeros(n_bonds + 1, dtype=np.int64)
    total = 1 << n
    for start in range(0, total, _CHUNK):
        configs = np.arange(start, min(start + _CHUNK, total), dtype=np.uint32)
        anti = np.zeros(configs.shape, dtype=np.uint16)
        for i, j in bonds:
            anti += ((configs >> np.uint32(i)) ^ (configs >> np.uint32(j))).astype(np.uint16) & 1
        dos += np.bincount(anti, minlength=n_bonds + 1)
    return dos, n_bonds


def enumerate_exact(d: int, side: int, T: float, coupling: float = 1.0):
    """Exact (mean energy per site, specific heat per site) for Ising N=1.

    Sums over all 2^(side**d) configurations of the Boltzmann distribution;
    raises :class:`CapacityError` above 24 sites.
    """
    if T <= 0:
        raise ValueError("temperature must be positive")
    dos, n_bonds = _density_of_states(d, side)
    n = side**d
    # energy level with k antialigned bonds: E_k = -J*(n_bonds - 2k)
    energies = -coupling * (n_bonds - 2.0 * np.arange(n_bonds + 1))
    active = dos > 0
    e = energies[active]
    log_w = np.log(dos[active].astype(np.float64)) - (e - e.min()) / T
    w = np.exp(log_w - log_w.max())
    z = w.sum()
    e_mean = float((e * w).sum() / z)
    e2_mean = float((e**2 * w).sum() / z)
    heat = (e2_mean - e_mean**2) / (T**2 * n)
    return e_mean / n, heat


def onsager_energy(T: float, coupling: float = 1.0) -> float:
    """Onsager's thermodynamic-limit energy per site of the 2D Ising model.

    u = -J*coth(2bJ) * [1 + (2/pi)*(2*tanh^2(2bJ) - 1)*K(k)] with
    k = 2*sinh(2bJ)/cosh^2(2bJ). At criticality the bracket coefficient
    vanishes and u = -sqrt(2)*J.
    """
    if T <= 0:
        raise ValueError("temperature must be positive")
    b2 = 2.0 * coupling / T
    coth = np.cosh(b2) / np.sinh(b2)
    coeff = 2.0 * np.tanh(b2) ** 2 - 1.0
    modulus = 2.0 * np.sinh(b2) / np.cosh(b2) ** 2
    if abs(coeff) < 1e-15:
        bracket = 1.0  # K(k) diverges only logarithmically; coeff*K -> 0
    else:
        bracket = 1.0 + (2.0 / np.pi) * coeff * ellipk(modulus**2)
    return float(-coupling * coth * bracket)


CRITICAL_TEMPERATURE_2D = 2.0 / np.log(1.0 + np.sqrt(2.0))
