"""Periodic hypercubic lattice geometry: neighbor tables and parity classes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class LatticeGeometry:
    """Precomputed site adjacency for a periodic hypercubic lattice.

    ``neighbors[s, 2*a]`` and ``neighbors[s, 2*a + 1]`` are the +axis and
    -axis neighbors of site ``s`` along axis ``a``. ``parity`` splits sites
    into the two checkerboard classes (only a proper 2-coloring when the side
    length is even). ``bond_targets`` lists, per site, the +axis neighbor for
    each axis; enumerating (site, bond_targets[site, a]) over all sites and
    axes yields each bond exactly once (side=2 wraparound contributes its
    doubled bonds, as the periodic Hamiltonian requires).
    """

    d: int
    side: int
    neighbors: np.ndarray  # (n_sites, 2d) int64
    parity: tuple  # (even site indices, odd site indices)

    @property
    def n_sites(self) -> int:
        return self.side**self.d

    @property
    def bond_targets(self) -> np.ndarray:
        return self.neighbors[:, 0::2]


@lru_cache(maxsize=32)
def geometry(d: int, side: int) -> LatticeGeometry:
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    if side < 2:
        raise ValidationError(f"side must be >= 2, got {side}")
    n = side**d
    sites = np.arange(n)
    # coordinates in row-major order: axis 0 is the slowest-varying index
    coords = np.empty((n, d), dtype=np.int64)
    rem = sites.copy()
    for a in range(d - 1, -1, -1):
        coords[:, a] = rem % side
        rem //= side
    strides = side ** np.arange(d - 1, -1, -1, dtype=np.int64)
    nbr = np.empty((n, 2 * d), dtype=np.int64)
    for a in range(d):
        up = coords.copy()
        up[:, a] = (up[:, a] + 1) % side
        dn = coords.copy()
        dn[:, a] = (dn[:, a] - 1) % side
        nbr[:, 2 * a] = up @ strides
        nbr[:, 2 * a + 1] = dn @ strides
    color = coords.sum(axis=1) % 2
    parity = (np.flatnonzero(color == 0), np.flatnonzero(color == 1))
    nbr.setflags(write=False)
    for p in parity:
        p.setflags(write=False)
    return LatticeGeometry(d=d, side=side, neighbors=nbr, parity=parity)
