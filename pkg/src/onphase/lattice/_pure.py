"""Pure-numpy update kernels; the fallback when the compiled extension is absent.

Metropolis uses vectorized checkerboard half-sweeps on even side lengths
(sequential site order otherwise, since odd periodic lattices are not
bipartite). Wolff grows one cluster per call via the reflection construction.
Both mutate the spin array in place and return (accepted_or_size, delta_E).
"""

from __future__ import annotations

import numpy as np


def _checkerboard_possible(geom) -> bool:
    return geom.side % 2 == 0


def metropolis_sweep(spins, geom, J, T, sigma, rng):
    if spins.shape[1] == 1:
        if _checkerboard_possible(geom):
            return _ising_checkerboard(spins, geom, J, T, rng)
        return _ising_sequential(spins, geom, J, T, rng)
    if _checkerboard_possible(geom):
        return _vector_checkerboard(spins, geom, J, T, sigma, rng)
    return _vector_sequential(spins, geom, J, T, sigma, rng)


def _ising_checkerboard(spins, geom, J, T, rng):
    s = spins[:, 0]
    accepted = 0
    de_total = 0.0
    for idx in geom.parity:
        nsum = s[geom.neighbors[idx]].sum(axis=1)
        de = 2.0 * J * s[idx] * nsum
        prob = np.exp(-np.clip(de, 0.0, None) / T)
        accept = rng.random(idx.size) < prob  # prob is 1 wherever de <= 0
        s[idx[accept]] *= -1.0
        accepted += int(accept.sum())
        de_total += float(de[accept].sum())
    return accepted, de_total


def _ising_sequential(spins, geom, J, T, rng):
    s = spins[:, 0]
    nbr = geom.neighbors
    accepted = 0
    de_total = 0.0
    for i in range(s.shape[0]):
        de = 2.0 * J * s[i] * s[nbr[i]].sum()
        if de <= 0.0 or rng.random() < np.exp(-de / T):
            s[i] = -s[i]
            accepted += 1
            de_total += de
    return accepted, de_total


def _vector_checkerboard(spins, geom, J, T, sigma, rng):
    accepted = 0
    de_total = 0.0
    for idx in geom.parity:
        current = spins[idx]
        proposal = current + sigma * rng.standard_normal(current.shape)
        proposal /= np.linalg.norm(proposal, axis=1)[:, None]
        nsum = spins[geom.neighbors[idx]].sum(axis=1)
        de = -J * np.einsum("ij,ij->i", proposal - current, nsum)
        prob = np.exp(-np.clip(de, 0.0, None) / T)
        accept = rng.random(idx.size) < prob
        spins[idx[accept]] = proposal[accept]
        accepted += int(accept.sum())
        de_total += float(de[accept].sum())
    return accepted, de_total


def _vector_sequential(spins, geom, J, T, sigma, rng):
    nbr = geom.neighbors
    accepted = 0
    de_total = 0.0
    for i in range(spins.shape[0]):
        proposal = spins[i] + sigma * rng.standard_normal(spins.shape[1])
        proposal /= np.linalg.norm(proposal)
        de = -J * float((proposal - spins[i]) @ spins[nbr[i]].sum(axis=0))
        if de <= 0.0 or rng.random() < np.exp(-de / T):
            spins[i] = proposal
            accepted += 1
            de_total += de
    return accepted, de_total


def wolff_update(spins, geom, J, T, rng):
    """One reflection-cluster update; reduces to the spin-flip cluster for N=1."""
    n, N = spins.shape
    if N == 1:
        reflection = None
        proj = spins[:, 0].copy()
    else:
        reflection = rng.standard_normal(N)
        reflection /= np.linalg.norm(reflection)
        proj = spins @ reflection

    seed = min(int(rng.random() * n), n - 1)
    in_cluster = np.zeros(n, dtype=bool)
    in_cluster[seed] = True
    stack = [seed]
    members = [seed]
    nbr = geom.neighbors
    two_over_t = 2.0 * J / T
    while stack:
        i = stack.pop()
        pi = proj[i]
        for j in nbr[i]:
            j = int(j)
            if in_cluster[j]:
                continue
            arg = -two_over_t * pi * proj[j]
            if arg < 0.0 and rng.random() < 1.0 - np.exp(arg):
                in_cluster[j] = True
                stack.append(j)
                members.append(j)

    members = np.array(members, dtype=np.int64)
    # energy change comes only from bonds crossing the cluster boundary
    boundary = ~in_cluster[nbr[members]]
    de = float(
        2.0 * J * np.sum(proj[members][:, None] * proj[nbr[members]] * boundary)
    )
    if N == 1:
        spins[members, 0] *= -1.0
    else:
        spins[members] -= 2.0 * proj[members][:, None] * reflection[None, :]
    return int(members.size), de
