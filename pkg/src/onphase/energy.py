"""Per-sequence energy observable and energy-temperature curve machinery.

The observable treats the tokens of one generation as interacting spins: the
raw form sums all pairwise inner products of the token vectors and divides by
the sequence length. Two conventions are supported:

* ``as-written`` / ``include``: E = (1/L) * sum_{s,t} t_s . t_t, which equals
  ||sum_s t_s||^2 / L and is therefore nonnegative.
* ``hamiltonian`` / ``exclude``: E = -(1/L) * sum_{s != t} t_s . t_t, the
  ferromagnetic-sign form whose ordered (low-temperature) phase sits at
  negative energy, matching the lattice simulator in :mod:`onphase.lattice`.

The default convention is hamiltonian/exclude with per-vector normalization.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateInputError,
    InsufficientDataError,
    ParseError,
    RangeError,
    ValidationError,
)
from .ingest import EmbeddingSequence


@dataclass(frozen=True)
class EnergyConvention:
    """Sign/diagonal/normalization choices for the pairwise energy."""

    sign: str = "hamiltonian"  # "as-written" | "hamiltonian"
    diagonal: str = "exclude"  # "include" | "exclude"
    row_normalize: bool = True

    def __post_init__(self):
        if self.sign not in ("as-written", "hamiltonian"):
            raise ValidationError(f"unknown sign convention {self.sign!r}")
        if self.diagonal not in ("include", "exclude"):
            raise ValidationError(f"unknown diagonal convention {self.diagonal!r}")


DEFAULT_CONVENTION = EnergyConvention()
LITERAL_CONVENTION = EnergyConvention(sign="as-written", diagonal="include", row_normalize=False)


class Verdict(str, Enum):
    INCREASE_PARAMETERS = "IncreaseParameters"
    CLEAN_DATA = "CleanData"


@dataclass(frozen=True)
class EnergySample:
    """Energy of one generation at one temperature."""

    temperature: float
    energy: float
    length: int
    prompt_id: str = ""

    def __post_init__(self):
        if not math.isfinite(self.energy):
            raise ValidationError("energy sample must be finite")
        if self.length < 1:
            raise ValidationError("sample length must be >= 1")


@dataclass(frozen=True)
class CurvePoint:
    temperature: float
    mean_energy: float
    stderr: float
    count: int


@dataclass(frozen=True)
class EnergyCurve:
    """Mean energy vs. temperature, strictly increasing in temperature."""

    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        temps = [p.temperature for p in pts]
        if any(t2 <= t1 for t1, t2 in zip(temps, temps[1:])):
            raise ValidationError("curve temperatures must be strictly increasing")
        if any(p.count < 1 or p.stderr < 0 for p in pts):
            raise ValidationError("curve points need count >= 1 and stderr >= 0")
        object.__setattr__(self, "points", pts)

    @property
    def temperatures(self) -> np.ndarray:
        return np.array([p.temperature for p in self.points])

    @property
    def mean_energies(self) -> np.ndarray:
        return np.array([p.mean_energy for p in self.points])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([p.stderr for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


def sequence_energy(seq: EmbeddingSequence, conv: EnergyConvention = DEFAULT_CONVENTION) -> float:
    """Pairwise-interaction energy of one embedded generation.

    Uses the identity sum_{s,t} t_s . t_t = ||sum_s t_s||^2, so the cost is
    O(L*N) rather than O(L^2*N).
    """
    vecs = seq.vectors
    if conv.row_normalize:
        norms = np.linalg.norm(vecs, axis=1)
        if np.any(norms == 0):
            bad = int(np.argwhere(norms == 0)[0, 0])
            raise DegenerateInputError(f"zero-norm vector at position {bad}")
        vecs = vecs / norms[:, None]
    length = vecs.shape[0]
    total = float(vecs.sum(axis=0) @ vecs.sum(axis=0))
    diag = float(np.einsum("ij,ij->", vecs, vecs))
    summed = total if conv.diagonal == "include" else total - diag
    signed = summed if conv.sign == "as-written" else -summed
    return signed / length


def energy_curve(samples) -> EnergyCurve:
    """Group samples by exact temperature; mean, standard error and count per group."""
    samples = list(samples)
    if not samples:
        raise InsufficientDataError("no energy samples to aggregate")
    groups: dict[float, list[float]] = {}
    for s in samples:
        groups.setdefault(float(s.temperature), []).append(float(s.energy))
    points = []
    for temp in sorted(groups):
        es = np.array(groups[temp])
        n = len(es)
        stderr = float(es.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        points.append(CurvePoint(temp, float(es.mean()), stderr, n))
    return EnergyCurve(points=tuple(points))


def specific_heat_curve(curve: EnergyCurve) -> list[tuple[float, float]]:
    """Central-difference dE/dT at interior points; endpoints omitted."""
    if len(curve) < 3:
        raise InsufficientDataError("specific heat needs at least 3 curve points")
    T = curve.temperatures
    E = curve.mean_energies
    out = []
    for i in range(1, len(T) - 1):
        out.append((float(T[i]), float((E[i + 1] - E[i - 1]) / (T[i + 1] - T[i - 1]))))
    return out


def transition_gap(curve: EnergyCurve, T_c: float, tail_fraction: float = 0.2) -> float:
    """E(T_c) - E(infinity), the post-transition energy drop.

    E(T_c) is linearly interpolated on the curve; E(infinity) is the mean
    energy of the highest ceil(tail_fraction * n) temperature points.
    """
    if not 0 < tail_fraction <= 1:
        raise ValidationError("tail_fraction must be in (0, 1]")
    T = curve.temperatures
    E = curve.mean_energies
    if T_c < T[0] or T_c > T[-1]:
        raise RangeError(f"T_c={T_c} outside curve range [{T[0]}, {T[-1]}]")
    if not np.any(T > T_c):
        raise RangeError("no curve points above T_c")
    e_at_tc = float(np.interp(T_c, T, E))
    k = math.ceil(tail_fraction * len(T))
    e_inf = float(E[-k:].mean())
    return e_at_tc - e_inf


def diagnose_capacity(gap: float, tolerance: float = 0.0) -> Verdict:
    """Training diagnostic: a positive gap means energy drops past the transition."""
    if not math.isfinite(gap):
        raise ValidationError("gap must be finite")
    if not math.isfinite(tolerance) or tolerance < 0:
        raise ValidationError("tolerance must be finite and >= 0")
    return Verdict.INCREASE_PARAMETERS if gap > tolerance else Verdict.CLEAN_DATA


def write_curve_csv(curve: EnergyCurve, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["temperature", "mean_energy", "stderr", "count"])
        for p in curve.points:
            writer.writerow([repr(p.temperature), repr(p.mean_energy), repr(p.stderr), p.count])
    return path


def read_curve_csv(path) -> EnergyCurve:
    """Read a curve CSV; accepts the simulator's per-site column names too."""
    path = Path(path)
    points = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            energy = row.get("mean_energy", row.get("mean_energy_per_site"))
            if energy is None:
                raise ParseError(f"{path}: no energy column found")
            points.append(
                CurvePoint(
                    temperature=float(row["temperature"]),
                    mean_energy=float(energy),
                    stderr=float(row.get("stderr", 0.0) or 0.0),
                    count=int(row.get("count", 1) or 1),
                )
            )
    points.sort(key=lambda p: p.temperature)
    return EnergyCurve(points=tuple(points))


def write_diagnostic_report(path, gap, T_c, tail_fraction, verdict) -> Path:
    """Structured-text gap/diagnostic record (fields may be absent on fit failure)."""
    path = Path(path)
    payload = {
        "gap": gap,
        "T_c": T_c,
        "tail_fraction": tail_fraction,
        "verdict": verdict.value if isinstance(verdict, Verdict) else verdict,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
