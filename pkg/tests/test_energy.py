"""Energy observable against a brute-force double-loop oracle, plus curves."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onphase.energy import (
    DEFAULT_CONVENTION,
    LITERAL_CONVENTION,
    CurvePoint,
    EnergyConvention,
    EnergyCurve,
    EnergySample,
    Verdict,
    diagnose_capacity,
    energy_curve,
    read_curve_csv,
    sequence_energy,
    specific_heat_curve,
    transition_gap,
    write_curve_csv,
)
from onphase.errors import (
    DegenerateInputError,
    InsufficientDataError,
    RangeError,
    ValidationError,
)
from onphase.ingest import EmbeddingSequence


def brute_force_energy(vectors, conv):
    """Independent O(L^2) double-loop evaluation of the pairwise energy."""
    vecs = np.asarray(vectors, dtype=np.float64)
    if conv.row_normalize:
        vecs = vecs / np.linalg.norm(vecs, axis=1)[:, None]
    total = 0.0
    for a in range(len(vecs)):
        for b in range(len(vecs)):
            if conv.diagonal == "exclude" and a == b:
                continue
            total += float(vecs[a] @ vecs[b])
    if conv.sign == "hamiltonian":
        total = -total
    return total / len(vecs)


def seq(vectors, temperature=1.0):
    return EmbeddingSequence(vectors=np.asarray(vectors, dtype=float), temperature=temperature)


def test_identical_tokens_literal():
    assert sequence_energy(seq([[1, 0], [1, 0]]), LITERAL_CONVENTION) == pytest.approx(2.0)


def test_orthogonal_tokens_literal():
    assert sequence_energy(seq([[1, 0], [0, 1]]), LITERAL_CONVENTION) == pytest.approx(1.0)


def test_identical_tokens_hamiltonian():
    conv = EnergyConvention(sign="hamiltonian", diagonal="exclude", row_normalize=False)
    assert sequence_energy(seq([[1, 0], [1, 0]]), conv) == pytest.approx(-1.0)


@pytest.mark.parametrize("sign", ["as-written", "hamiltonian"])
@pytest.mark.parametrize("diagonal", ["include", "exclude"])
@pytest.mark.parametrize("row_normalize", [False, True])
def test_matches_double_loop_oracle(sign, diagonal, row_normalize):
    rng = np.random.default_rng(11)
    conv = EnergyConvention(sign=sign, diagonal=diagonal, row_normalize=row_normalize)
    for _ in range(5):
        vecs = rng.standard_normal((int(rng.integers(1, 9)), 4))
        assert sequence_energy(seq(vecs), conv) == pytest.approx(
            brute_force_energy(vecs, conv), abs=1e-12
        )


def test_three_random_unit_vectors_oracle():
    rng = np.random.default_rng(5)
    vecs = rng.standard_normal((3, 6))
    vecs /= np.linalg.norm(vecs, axis=1)[:, None]
    assert sequence_energy(seq(vecs), LITERAL_CONVENTION) == pytest.approx(
        brute_force_energy(vecs, LITERAL_CONVENTION), abs=1e-12
    )


def test_literal_form_is_nonnegative_and_equals_norm_identity():
    rng = np.random.default_rng(12)
    for _ in range(20):
        vecs = rng.standard_normal((int(rng.integers(1, 12)), 5))
        e = sequence_energy(seq(vecs), LITERAL_CONVENTION)
        identity = float(vecs.sum(axis=0) @ vecs.sum(axis=0)) / len(vecs)
        assert e >= 0
        assert e == pytest.approx(identity, abs=1e-12)
        assert e == pytest.approx(brute_force_energy(vecs, LITERAL_CONVENTION), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=2**31))
def test_permutation_invariance(length, seed_val):
    rng = np.random.default_rng(seed_val)
    vecs = rng.standard_normal((length, 3))
    perm = rng.permutation(length)
    for conv in (DEFAULT_CONVENTION, LITERAL_CONVENTION):
        assert sequence_energy(seq(vecs), conv) == pytest.approx(
            sequence_energy(seq(vecs[perm]), conv), abs=1e-10
        )


def test_scaling_behavior():
    rng = np.random.default_rng(13)
    vecs = rng.standard_normal((5, 4))
    raw = EnergyConvention(sign="as-written", diagonal="include", row_normalize=False)
    normalized = EnergyConvention(sign="as-written", diagonal="include", row_normalize=True)
    assert sequence_energy(seq(3.0 * vecs), raw) == pytest.approx(
        9.0 * sequence_energy(seq(vecs), raw), rel=1e-12
    )
    scales = rng.uniform(0.5, 4.0, 5)[:, None]
    assert sequence_energy(seq(scales * vecs), normalized) == pytest.approx(
        sequence_energy(seq(vecs), normalized), rel=1e-12
    )


def test_zero_norm_vector_rejected_under_normalization():
    with pytest.raises(DegenerateInputError):
        sequence_energy(seq([[0.0, 0.0], [1.0, 0.0]]), DEFAULT_CONVENTION)


def test_energy_curve_aggregation():
    curve = energy_curve(
        [EnergySample(1.0, 2.0, 10), EnergySample(1.0, 4.0, 10)]
    )
    (point,) = curve.points
    assert point == CurvePoint(1.0, 3.0, 1.0, 2)  # stddev sqrt(2), /sqrt(2) = 1


def test_energy_curve_single_sample():
    curve = energy_curve([EnergySample(0.5, -1.0, 3)])
    assert curve.points == (CurvePoint(0.5, -1.0, 0.0, 1),)


def test_energy_curve_sorts_and_is_order_invariant():
    rng = np.random.default_rng(2)
    samples = [
        EnergySample(float(t), float(e), 5)
        for t, e in zip(rng.uniform(0, 2, 20), rng.standard_normal(20))
    ]
    a = energy_curve(samples)
    b = energy_curve(list(reversed(samples)))
    assert a == b
    temps = a.temperatures
    assert np.all(np.diff(temps) > 0)


def test_energy_curve_constant_mean():
    curve = energy_curve([EnergySample(1.0, 7.0, 2) for _ in range(5)])
    assert curve.points[0].mean_energy == 7.0
    assert curve.points[0].stderr == 0.0


def test_energy_curve_empty():
    with pytest.raises(InsufficientDataError):
        energy_curve([])


def _curve(temps, energies):
    return EnergyCurve(
        points=tuple(CurvePoint(float(t), float(e), 0.0, 1) for t, e in zip(temps, energies))
    )


def test_specific_heat_linear():
    heat = specific_heat_curve(_curve([0, 1, 2], [0, 1, 2]))
    assert heat == [(1.0, 1.0)]


def test_specific_heat_constant():
    heat = specific_heat_curve(_curve([0, 1, 2, 3], [5, 5, 5, 5]))
    assert all(c == 0 for _, c in heat)


def test_specific_heat_quadratic_hand_value():
    # E(T)=T^2 on {0,1,2}: central difference (4-0)/(2-0) = 2 at T=1
    heat = specific_heat_curve(_curve([0, 1, 2], [0, 1, 4]))
    assert heat == [(1.0, 2.0)]


def test_specific_heat_needs_three_points():
    with pytest.raises(InsufficientDataError):
        specific_heat_curve(_curve([0, 1], [0, 1]))


def test_transition_gap_flat_curve_is_exactly_zero():
    curve = _curve(np.linspace(0, 2, 10), [-4.0] * 10)
    assert transition_gap(curve, 1.0, 0.2) == 0.0


def test_transition_gap_small_model_shape():
    # E(T_c) = -4 at T_c=2; tail (last 2 of 10 points) sits at -6
    temps = np.arange(10, dtype=float)
    energies = np.array([-4.0] * 8 + [-6.0, -6.0])
    assert transition_gap(_curve(temps, energies), 2.0, 0.2) == pytest.approx(2.0)


def test_transition_gap_large_model_shape():
    temps = np.arange(10, dtype=float)
    energies = np.array([-6.0] * 8 + [-4.0, -4.0])
    assert transition_gap(_curve(temps, energies), 2.0, 0.2) == pytest.approx(-2.0)


def test_transition_gap_interpolates():
    curve = _curve([0.0, 1.0, 2.0, 3.0, 4.0], [0.0, 1.0, 2.0, 3.0, 4.0])
    # E(1.5) = 1.5 by linear interpolation; tail = E(4) = 4
    assert transition_gap(curve, 1.5, 0.2) == pytest.approx(-2.5)


def test_transition_gap_range_errors():
    curve = _curve([0.0, 1.0, 2.0], [0.0, 0.0, 0.0])
    with pytest.raises(RangeError):
        transition_gap(curve, 2.0, 0.5)  # nothing strictly above T_c
    with pytest.raises(RangeError):
        transition_gap(curve, 5.0, 0.5)


def test_diagnose_capacity():
    assert diagnose_capacity(2.0, 0.1) is Verdict.INCREASE_PARAMETERS
    assert diagnose_capacity(-2.0, 0.1) is Verdict.CLEAN_DATA
    assert diagnose_capacity(0.0, 0.1) is Verdict.CLEAN_DATA
    with pytest.raises(ValidationError):
        diagnose_capacity(float("nan"), 0.1)


def test_curve_csv_roundtrip(tmp_path):
    curve = energy_curve(
        [EnergySample(t, e, 4) for t, e in [(0.5, -1.0), (1.0, -2.0), (1.0, -2.5)]]
    )
    path = write_curve_csv(curve, tmp_path / "curve.csv")
    assert read_curve_csv(path) == curve
