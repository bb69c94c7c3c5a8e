# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled update kernels: sequential Metropolis and Wolff cluster moves.

Uniform deviates come straight from the numpy bit generator backing the
caller's Generator, so trajectories are reproducible per seed. Spins are
mutated in place; every entry point returns (accepted_or_cluster_size,
delta_E) like the pure-python backend.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport cos, exp, log, sin, sqrt
from numpy.random cimport bitgen_t

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925287

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef bitgen_t *_bitgen(object rng) except NULL:
    bg = getattr(rng, "bit_generator", rng)
    return <bitgen_t *> PyCapsule_GetPointer(bg.capsule, CAPSULE_NAME)


cdef inline double _uniform(bitgen_t *bg) noexcept:
    return bg.next_double(bg.state)


cdef inline double _gauss(bitgen_t *bg, double *spare, bint *have_spare) noexcept:
    cdef double u1, u2, radius
    if have_spare[0]:
        have_spare[0] = False
        return spare[0]
    u1 = 1.0 - _uniform(bg)  # (0, 1]: keeps log() finite
    u2 = _uniform(bg)
    radius = sqrt(-2.0 * log(u1))
    spare[0] = radius * sin(TWO_PI * u2)
    have_spare[0] = True
    return radius * cos(TWO_PI * u2)


def metropolis_sweep(double[:, ::1] spins, const cnp.int64_t[:, ::1] neighbors,
                     double J, double T, double sigma, object rng):
    """One attempted update per site, sequential site order."""
    cdef bitgen_t *bg = _bitgen(rng)
    if spins.shape[1] == 1:
        return _ising_sweep(spins, neighbors, J, T, bg)
    return _vector_sweep(spins, neighbors, J, T, sigma, bg)


cdef tuple _ising_sweep(double[:, ::1] spins, const cnp.int64_t[:, ::1] neighbors,
                        double J, double T, bitgen_t *bg):
    cdef Py_ssize_t n = spins.shape[0]
    cdef Py_ssize_t slots = neighbors.shape[1]
    cdef Py_ssize_t i, k
    cdef double nsum, de, de_total = 0.0
    cdef long accepted = 0
    for i in range(n):
        nsum = 0.0
        for k in range(slots):
            nsum += spins[neighbors[i, k], 0]
        de = 2.0 * J * spins[i, 0] * nsum
        if de <= 0.0 or _uniform(bg) < exp(-de / T):
            spins[i, 0] = -spins[i, 0]
            accepted += 1
            de_total += de
    return accepted, de_total


cdef tuple _vector_sweep(double[:, ::1] spins, const cnp.int64_t[:, ::1] neighbors,
                         double J, double T, double sigma, bitgen_t *bg):
    cdef Py_ssize_t n = spins.shape[0]
    cdef Py_ssize_t ncomp = spins.shape[1]
    cdef Py_ssize_t slots = neighbors.shape[1]
    cdef Py_ssize_t i, k, c
    cdef double de, norm, dot, de_total = 0.0
    cdef long accepted = 0
    cdef double spare = 0.0
    cdef bint have_spare = False
    cdef double[::1] prop = np.empty(ncomp)
    cdef double[::1] nsum = np.empty(ncomp)
    for i in range(n):
        norm = 0.0
        for c in range(ncomp):
            prop[c] = spins[i, c] + sigma * _gauss(bg, &spare, &have_spare)
            norm += prop[c] * prop[c]
        norm = sqrt(norm)
        for c in range(ncomp):
            prop[c] /= norm
        for c in range(ncomp):
            nsum[c] = 0.0
        for k in range(slots):
            for c in range(ncomp):
                nsum[c] += spins[neighbors[i, k], c]
        de = 0.0
        for c in range(ncomp):
            de += (prop[c] - spins[i, c]) * nsum[c]
        de = -J * de
        if de <= 0.0 or _uniform(bg) < exp(-de / T):
            for c in range(ncomp):
                spins[i, c] = prop[c]
            accepted += 1
            de_total += de
    return accepted, de_total


def wolff_update(double[:, ::1] spins, const cnp.int64_t[:, ::1] neighbors,
                 double J, double T, object rng):
    """One reflection-cluster update; spin-flip cluster for one component."""
    cdef bitgen_t *bg = _bitgen(rng)
    cdef Py_ssize_t n = spins.shape[0]
    cdef Py_ssize_t ncomp = spins.shape[1]
    cdef Py_ssize_t slots = neighbors.shape[1]
    cdef Py_ssize_t i, k, c, top, count
    cdef cnp.int64_t j
    cdef double arg, norm, de = 0.0
    cdef double two_over_t = 2.0 * J / T
    cdef double spare = 0.0
    cdef bint have_spare = False

    cdef double[::1] reflection = np.empty(ncomp)
    cdef double[::1] proj = np.empty(n)
    cdef cnp.int64_t[::1] stack = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] members = np.empty(n, dtype=np.int64)
    cdef cnp.uint8_t[::1] in_cluster = np.zeros(n, dtype=np.uint8)

    if ncomp == 1:
        for i in range(n):
            proj[i] = spins[i, 0]
    else:
        norm = 0.0
        for c in range(ncomp):
            reflection[c] = _gauss(bg, &spare, &have_spare)
            norm += reflection[c] * reflection[c]
        norm = sqrt(norm)
        for c in range(ncomp):
            reflection[c] /= norm
        for i in range(n):
            proj[i] = 0.0
            for c in range(ncomp):
                proj[i] += spins[i, c] * reflection[c]

    cdef Py_ssize_t seed = <Py_ssize_t> (_uniform(bg) * n)
    if seed >= n:
        seed = n - 1
    in_cluster[seed] = 1
    stack[0] = seed
    members[0] = seed
    top = 1
    count = 1
    while top > 0:
        top -= 1
        i = stack[top]
        for k in range(slots):
            j = neighbors[i, k]
            if in_cluster[j]:
                continue
            arg = -two_over_t * proj[i] * proj[j]
            if arg < 0.0 and _uniform(bg) < 1.0 - exp(arg):
                in_cluster[j] = 1
                stack[top] = j
                top += 1
                members[count] = j
                count += 1

    # boundary bonds are the only energy change under a whole-cluster move
    for k in range(count):
        i = members[k]
        for c in range(slots):
            j = neighbors[i, c]
            if not in_cluster[j]:
                de += 2.0 * J * proj[i] * proj[j]

    if ncomp == 1:
        for k in range(count):
            spins[members[k], 0] = -spins[members[k], 0]
    else:
        for k in range(count):
            i = members[k]
            for c in range(ncomp):
                spins[i, c] -= 2.0 * proj[i] * reflection[c]
    return count, de
