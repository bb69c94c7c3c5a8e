"""Spin lattices, the simplex state basis, and interaction coupling tensors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .geometry import LatticeGeometry, geometry

UNIT_NORM_TOL = 1e-12


@dataclass
class SpinLattice:
    """d-dimensional periodic hypercubic lattice of N-component unit spins.

    ``spins`` has shape (side**d, N); every row is unit length. The coupling
    J > 0 makes the aligned configuration the ground state of
    H = -J * sum_bonds s_i . s_j. Temperatures are in units of J (k_B = 1).
    """

    d: int
    side: int
    N: int
    spins: np.ndarray
    coupling: float = 1.0
    boundary: str = "periodic"

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError(f"spin components must be >= 1, got {self.N}")
        if self.boundary != "periodic":
            raise ValidationError("only periodic boundaries are supported")
        geom = self.geometry  # validates d and side
        spins = np.ascontiguousarray(self.spins, dtype=np.float64)
        if spins.shape != (geom.n_sites, self.N):
            raise ValidationError(
                f"spins must have shape {(geom.n_sites, self.N)}, got {spins.shape}"
            )
        norms = np.linalg.norm(spins, axis=1)
        if np.max(np.abs(norms - 1.0)) > UNIT_NORM_TOL:
            raise ValidationError("every spin must have unit norm to 1e-12")
        self.spins = spins

    @property
    def geometry(self) -> LatticeGeometry:
        return geometry(self.d, self.side)

    @property
    def site_count(self) -> int:
        return self.side**self.d

    def copy(self) -> "SpinLattice":
        return SpinLattice(
            d=self.d,
            side=self.side,
            N=self.N,
            spins=self.spins.copy(),
            coupling=self.coupling,
        )

    def renormalize(self) -> None:
        """Defensive renormalization; floating-point drift stays below 1e-9."""
        self.spins /= np.linalg.norm(self.spins, axis=1)[:, None]


def random_unit_spins(n: int, N: int, rng) -> np.ndarray:
    """Uniform unit vectors; for N=1 this is a fair +-1 coin per site."""
    if N == 1:
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)[:, None]
    v = rng.standard_normal((n, N))
    return v / np.linalg.norm(v, axis=1)[:, None]


def cold_lattice(d: int, side: int, N: int, coupling: float = 1.0) -> SpinLattice:
    """Fully aligned start: every spin along the first component axis."""
    spins = np.zeros((side**d, N))
    spins[:, 0] = 1.0
    return SpinLattice(d=d, side=side, N=N, spins=spins, coupling=coupling)


def hot_lattice(d: int, side: int, N: int, rng, coupling: float = 1.0) -> SpinLattice:
    """Independent uniform spins at every site."""
    return SpinLattice(
        d=d, side=side, N=N, spins=random_unit_spins(side**d, N, rng), coupling=coupling
    )


def lattice_energy(lat: SpinLattice) -> float:
    """H = -J * sum over nearest-neighbor bonds of s_i . s_j.

    Each bond is the (site, +axis neighbor) pair, periodic wraparound
    included, so an aligned d-dimensional lattice has energy -J*d per site.
    """
    targets = lat.geometry.bond_targets
    total = 0.0
    for a in range(lat.d):
        total += float(np.einsum("ij,ij->", lat.spins, lat.spins[targets[:, a]]))
    return -lat.coupling * total


@dataclass(frozen=True)
class PottsBasis:
    """N+1 regular-simplex unit vectors in R^N representing N+1 spin states.

    They satisfy sum_i e_i^a e_i^b = (N+1)/N * delta^{ab} - 1/N: unit length,
    pairwise inner product -1/N.
    """

    N: int
    vectors: np.ndarray  # (N+1, N)


def potts_basis(N: int) -> PottsBasis:
    if N < 1:
        raise ValidationError(f"need N >= 1, got {N}")
    # Centered standard basis of R^{N+1} lives in the hyperplane orthogonal
    # to (1,...,1); expressed in an orthonormal basis of that hyperplane the
    # N+1 vertices are the regular simplex, then each is normalized.
    ones = np.ones(N + 1)
    centered = np.eye(N + 1) - ones / (N + 1)
    # orthonormal basis of the hyperplane: last N columns of the Householder
    # reflector mapping e_1 to ones/sqrt(N+1)
    q, _ = np.linalg.qr(np.column_stack([ones, np.eye(N + 1)[:, :N]]))
    basis = q[:, 1 : N + 1]
    vecs = centered @ basis
    vecs /= np.linalg.norm(vecs, axis=1)[:, None]
    return PottsBasis(N=N, vectors=vecs)


@dataclass(frozen=True)
class CouplingTensors:
    """Cubic and quartic interaction tensors built from a simplex basis.

    Q_ijk and F_ijkl sum the outer products of the basis vectors over states;
    S_ijkl is the fully symmetrized product of Kronecker deltas and does not
    depend on the basis.
    """

    Q: np.ndarray
    F: np.ndarray
    S: np.ndarray


def coupling_tensors(basis: PottsBasis) -> CouplingTensors:
    e = basis.vectors
    Q = np.einsum("ai,aj,ak->ijk", e, e, e)
    F = np.einsum("ai,aj,ak,al->ijkl", e, e, e, e)
    eye = np.eye(basis.N)
    S = (
        np.einsum("ij,kl->ijkl", eye, eye)
        + np.einsum("ik,jl->ijkl", eye, eye)
        + np.einsum("il,jk->ijkl", eye, eye)
    ) / 3.0
    return CouplingTensors(Q=Q, F=F, S=S)
