"""Markov-chain correctness: exact-distribution checks, determinism, bookkeeping."""

import numpy as np
import pytest

from onphase.errors import CapacityError, ValidationError
from onphase.lattice import (
    cold_lattice,
    enumerate_exact,
    hot_lattice,
    lattice_energy,
    metropolis_sweep,
    run_simulation,
    wolff_update,
)
from onphase.lattice.geometry import geometry
from onphase.lattice.kernels import (
    available_backends,
    backend_context,
    wolff_update_kernel,
)
from onphase.lattice.observables import blocked_standard_error

BACKENDS = available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    with backend_context(request.param):
        yield request.param


def test_compiled_backend_is_available():
    # the package ships the extension; the pure path stays tested via the fixture
    assert "compiled" in BACKENDS


def test_identical_seeds_identical_series(backend):
    kwargs = dict(d=2, side=6, N=1, T=2.4, thermalization_sweeps=50, measurement_sweeps=100)
    for sampler in ("metropolis", "wolff"):
        a = run_simulation(**kwargs, sampler=sampler, seed=123)
        b = run_simulation(**kwargs, sampler=sampler, seed=123)
        assert np.array_equal(a.energies, b.energies)
        assert np.array_equal(a.magnetizations, b.magnetizations)
        c = run_simulation(**kwargs, sampler=sampler, seed=124)
        assert not np.array_equal(a.energies, c.energies)


def test_cold_lattice_frozen_at_low_temperature(backend):
    rng = np.random.default_rng(0)
    lat = cold_lattice(2, 4, 1)
    initial = lattice_energy(lat)
    for _ in range(100):
        metropolis_sweep(lat, 0.01, rng)
    assert lattice_energy(lat) == initial  # flip acceptance is ~exp(-800)


def test_two_site_chain_matches_boltzmann(backend):
    # 1D periodic chain of 2 sites has states {++, +-, -+, --} with energies
    # {-2, +2, +2, -2} (doubled bond); at T=1 p(aligned) = e^2/(e^2 + e^-2)
    p_aligned_exact = np.exp(2.0) / (np.exp(2.0) + np.exp(-2.0))
    rng = np.random.default_rng(42)
    lat = hot_lattice(1, 2, 1, rng)
    aligned = []
    for _ in range(200):
        metropolis_sweep(lat, 1.0, rng)
    for _ in range(30000):
        metropolis_sweep(lat, 1.0, rng)
        aligned.append(1.0 if lat.spins[0, 0] == lat.spins[1, 0] else 0.0)
    aligned = np.array(aligned)
    stderr = blocked_standard_error(aligned, n_blocks=50)
    assert abs(aligned.mean() - p_aligned_exact) <= 3 * stderr


def test_wolff_cluster_size_at_infinite_temperature(backend):
    rng = np.random.default_rng(1)
    lat = hot_lattice(2, 8, 1, rng)
    sizes = [
        wolff_update_kernel(lat.spins, lat.geometry, 1.0, 1e6, rng)[0] for _ in range(300)
    ]
    assert np.mean(sizes) <= 1.05  # bond probability ~2e-6


def test_wolff_matches_metropolis_ising_critical(backend):
    if backend == "python":
        pytest.skip("cross-sampler statistics are exercised on the compiled backend")
    kwargs = dict(d=2, side=16, N=1, T=2.269, thermalization_sweeps=2000)
    metro = run_simulation(**kwargs, measurement_sweeps=20000, sampler="metropolis", seed=7)
    wolff = run_simulation(**kwargs, measurement_sweeps=20000, sampler="wolff", seed=8)
    for series_stat in (
        lambda s: np.abs(np.linalg.norm(s.magnetizations, axis=1)),
        lambda s: s.energies / 256,
    ):
        a, b = series_stat(metro), series_stat(wolff)
        err = np.hypot(blocked_standard_error(a), blocked_standard_error(b))
        assert abs(a.mean() - b.mean()) <= 3 * err


def test_vector_model_sampler_agreement(backend):
    if backend == "python":
        pytest.skip("cross-sampler statistics are exercised on the compiled backend")
    kwargs = dict(d=3, side=4, N=3, T=1.5, thermalization_sweeps=3000)
    metro = run_simulation(**kwargs, measurement_sweeps=12000, sampler="metropolis", seed=42)
    wolff = run_simulation(**kwargs, measurement_sweeps=12000, sampler="wolff", seed=43)
    a, b = metro.energies / 64, wolff.energies / 64
    err = np.hypot(blocked_standard_error(a), blocked_standard_error(b))
    assert abs(a.mean() - b.mean()) <= 3 * err


def test_backends_agree_statistically():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend unavailable")
    results = {}
    for name in BACKENDS:
        with backend_context(name):
            series = run_simulation(
                2, 8, 1, 2.5, 500, 6000, sampler="metropolis", seed=5
            )
            results[name] = (
                series.energies.mean() / 64,
                blocked_standard_error(series.energies / 64),
            )
    (ea, sa), (eb, sb) = results.values()
    assert abs(ea - eb) <= 3 * np.hypot(sa, sb)


def test_simulation_matches_exact_enumeration(backend):
    measurements = 20000 if backend == "compiled" else 6000
    series = run_simulation(
        2, 4, 1, 2.5, 1000, measurements, sampler="metropolis", seed=11
    )
    exact_energy, _ = enumerate_exact(2, 4, 2.5)
    per_site = series.energies / 16
    stderr = blocked_standard_error(per_site)
    assert abs(per_site.mean() - exact_energy) <= 3 * stderr


def test_cold_start_ground_state_dominance(backend):
    series = run_simulation(
        2, 6, 1, 0.1, 200, 500, sampler="metropolis", seed=3, start="cold"
    )
    assert series.energies.mean() / 36 == pytest.approx(-2.0, rel=0.01)


def test_hot_and_cold_starts_converge(backend):
    if backend == "python":
        pytest.skip("start-independence statistics are exercised on the compiled backend")
    exact_energy, _ = enumerate_exact(2, 4, 2.5)
    for start in ("hot", "cold"):
        series = run_simulation(
            2, 4, 1, 2.5, 2000, 15000, sampler="wolff", seed=19, start=start
        )
        per_site = series.energies / 16
        assert abs(per_site.mean() - exact_energy) <= 3 * blocked_standard_error(per_site)


def test_unit_norms_preserved_after_many_updates(backend):
    rng = np.random.default_rng(14)
    lat = hot_lattice(2, 6, 3, rng)
    for _ in range(200):
        metropolis_sweep(lat, 0.8, rng)
        wolff_update(lat, 0.8, rng)
    assert np.abs(np.linalg.norm(lat.spins, axis=1) - 1.0).max() <= 1e-9


def test_energy_bookkeeping_against_recompute(backend):
    # check_interval=1 re-verifies the incremental energy after every sweep
    run_simulation(
        2, 6, 3, 1.2, 100, 200, sampler="metropolis", seed=21, check_interval=1
    )
    run_simulation(
        2, 6, 3, 1.2, 100, 200, sampler="wolff", seed=22, check_interval=1
    )
    run_simulation(
        2, 6, 1, 2.3, 100, 200, sampler="wolff", seed=23, check_interval=1
    )


def test_kernel_delta_energy_matches_recompute(backend):
    from onphase.lattice.kernels import metropolis_sweep_kernel, wolff_update_kernel

    rng = np.random.default_rng(31)
    lat = hot_lattice(2, 6, 2, rng)
    geom = lat.geometry
    energy = lattice_energy(lat)
    for _ in range(20):
        _, de = metropolis_sweep_kernel(lat.spins, geom, 1.0, 1.1, 0.8, rng)
        energy += de
        _, de = wolff_update_kernel(lat.spins, geom, 1.0, 1.1, rng)
        energy += de
    assert energy == pytest.approx(lattice_energy(lat), abs=1e-9)


def test_capacity_cap():
    with pytest.raises(CapacityError):
        run_simulation(2, 64, 1, 2.0, 10, 10, site_cap=1000)


def test_run_simulation_validates_inputs():
    with pytest.raises(ValidationError):
        run_simulation(2, 4, 1, -1.0, 10, 10)
    with pytest.raises(ValidationError):
        run_simulation(2, 4, 1, 1.0, 10, 0)
    with pytest.raises(ValidationError):
        run_simulation(2, 4, 1, 1.0, 10, 10, sampler="glauber")


def test_odd_side_sequential_fallback(backend):
    # odd periodic lattices are not bipartite; both backends must still sample
    series = run_simulation(2, 5, 1, 2.5, 500, 4000, sampler="metropolis", seed=9)
    assert np.isfinite(series.energies).all()
    geom = geometry(2, 5)
    assert geom.n_sites == 25
