"""Thermodynamic observables from measurement series and configurations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientDataError, SignalTooWeakError, ValidationError
from ..scaling import fit_power_law
from .sampler import ObservableSeries


def fluctuation_specific_heat(series: ObservableSeries, volume: int) -> float:
    """Per-site specific heat from the energy variance: (<E^2>-<E>^2)/(T^2 V)."""
    if series.energies.size < 2:
        raise InsufficientDataError("specific heat needs at least 2 measurements")
    return float(series.energies.var() / (series.temperature**2 * volume))


def susceptibility(series: ObservableSeries, volume: int) -> float:
    """chi = V*(<m^2> - <|m|>^2)/T with m the per-measurement mean-spin magnitude."""
    if series.energies.size < 2:
        raise InsufficientDataError("susceptibility needs at least 2 measurements")
    m = np.linalg.norm(series.magnetizations, axis=1)
    return float(volume * (np.mean(m**2) - np.mean(m) ** 2) / series.temperature)


def blocked_standard_error(samples, n_blocks: int = 32) -> float:
    """Standard error of the mean from block averages (handles autocorrelation)."""
    samples = np.asarray(samples, dtype=np.float64)
    n_blocks = min(n_blocks, samples.size)
    if n_blocks < 2:
        return 0.0
    usable = samples.size - samples.size % n_blocks
    blocks = samples[:usable].reshape(n_blocks, -1).mean(axis=1)
    return float(blocks.std(ddof=1) / math.sqrt(n_blocks))


def correlation_function(lattices) -> list:
    """Connected two-point function G(r) for r = 1 .. side//2.

    Averages s(x).s(x + r*e_a) over configurations, sites and axes, then
    subtracts the squared magnitude of the ensemble-mean spin vector.
    """
    lattices = list(lattices)
    if not lattices:
        raise InsufficientDataError("need at least one configuration")
    first = lattices[0]
    d, side, N = first.d, first.side, first.N
    if any((lat.d, lat.side, lat.N) != (d, side, N) for lat in lattices):
        raise ValidationError("all configurations must share one lattice shape")
    r_max = side // 2
    corr = np.zeros(r_max)
    mean_spin = np.zeros(N)
    shape = (side,) * d + (N,)
    for lat in lattices:
        grid = lat.spins.reshape(shape)
        mean_spin += lat.spins.mean(axis=0)
        for axis in range(d):
            for r in range(1, r_max + 1):
                shifted = np.roll(grid, -r, axis=axis)
                corr[r - 1] += float(np.mean(np.sum(grid * shifted, axis=-1)))
    corr /= len(lattices) * d
    mean_spin /= len(lattices)
    connected = corr - float(mean_spin @ mean_spin)
    return [(r, float(g)) for r, g in zip(range(1, r_max + 1), connected)]


def fit_correlation_length(corr) -> float:
    """Correlation length from the slope of ln G(r) vs r over positive G."""
    corr = list(corr)
    radii = np.array([r for r, _ in corr], dtype=np.float64)
    values = np.array([g for _, g in corr], dtype=np.float64)
    positive = values > 0
    if (~positive).sum() > len(corr) / 2:
        raise SignalTooWeakError(
            f"{int((~positive).sum())} of {len(corr)} radii have nonpositive G(r)"
        )
    if positive.sum() < 3:
        raise SignalTooWeakError("fewer than 3 radii with positive G(r)")
    slope, _ = np.polyfit(radii[positive], np.log(values[positive]), 1)
    if slope >= 0:
        raise SignalTooWeakError("correlation function does not decay")
    return float(-1.0 / slope)


@dataclass(frozen=True)
class NuFit:
    """Correlation-length exponents fitted above and below the transition."""

    above: float | None
    below: float | None


def fit_nu(xi_by_T, T_c: float) -> NuFit:
    """Power-law fit of xi against |T - T_c| on each side of the transition.

    A side with no points yields None; a side with 1-2 points (too few to
    fit) is an error.
    """
    above = [(abs(t - T_c), xi) for t, xi in xi_by_T if t > T_c]
    below = [(abs(t - T_c), xi) for t, xi in xi_by_T if t < T_c]
    if not above and not below:
        raise InsufficientDataError("no points on either side of T_c")

    def side_fit(points, label):
        if not points:
            return None
        if len(points) < 3:
            raise InsufficientDataError(f"need >= 3 points {label} T_c, got {len(points)}")
        xs = np.array([p[0] for p in points])
        ys = np.array([p[1] for p in points])
        return -fit_power_law(xs, ys).exponent

    return NuFit(above=side_fit(above, "above"), below=side_fit(below, "below"))
