"""Sweep driver and analysis orchestration.

``run_sweep`` drives an OpenAI-style completions endpoint over a temperature
grid with bounded parallelism and per-cell retry, producing a
:class:`~onphase.runs.RunManifest`. ``analyze_run`` turns a persisted run
plus an embedding table into an :class:`AnalysisReport` (energy curve,
critical fit, internal dimension, capacity gap and verdict);
``render_report`` writes the report as deterministic CSV/JSON files.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import requests

from .energy import (
    DEFAULT_CONVENTION,
    CurvePoint,
    EnergyConvention,
    EnergyCurve,
    EnergySample,
    Verdict,
    diagnose_capacity,
    energy_curve,
    sequence_energy,
    transition_gap,
    write_curve_csv,
    write_diagnostic_report,
)
from .errors import (
    ConvergenceError,
    DegenerateInputError,
    DependencyError,
    EndpointError,
    InsufficientDataError,
    OnphaseError,
    RangeError,
)
from .graphs import twonn_dimension
from .ingest import EmbeddingTable, TokenSequence, lookup_embeddings
from .runs import GenerationRecord, RunManifest, SweepConfig, load_run
from .scaling import CriticalFit, critical_energy_curve, fit_critical, write_fit_report

API_KEY_ENV = "ONPHASE_API_KEY"
MAX_ATTEMPTS = 3
RETRY_BACKOFF_SECONDS = 0.25
REQUEST_TIMEOUT_SECONDS = 120.0


@dataclass(frozen=True)
class AnalysisReport:
    """Everything the sweep analysis derives from one run."""

    curve: EnergyCurve
    fit: CriticalFit | None
    gap: float | None
    verdict: Verdict | None
    intrinsic_dimension_at_T1: float | None
    convention: EnergyConvention
    tail_fraction: float = 0.2
    warnings: tuple = ()


def _completions_url(endpoint_url: str) -> str:
    base = endpoint_url.rstrip("/")
    if base.endswith("/completions"):
        return base
    return base + "/v1/completions"


def _auth_headers() -> dict:
    headers = {"Content-Type": "application/json"}
    key = os.environ.get(API_KEY_ENV)
    if key:
        headers["Authorization"] = f"Bearer {key}"
    return headers


def _one_request(session, url, headers, config, prompt_id, prompt_text, temperature, replicate):
    request_id = f"{prompt_id}:{temperature:g}:{replicate}"
    body = {
        "model": config.model_id,
        "prompt": prompt_text,
        "temperature": temperature,
        "max_tokens": config.max_tokens,
        "seed": config.seed + replicate,
        "logprobs": 0,  # ask for token-level detail where supported
    }
    last_error = "no attempt made"
    for attempt in range(MAX_ATTEMPTS):
        try:
            resp = session.post(url, json=body, headers=headers, timeout=REQUEST_TIMEOUT_SECONDS)
        except requests.RequestException as exc:
            last_error = f"transport error: {exc}"
        else:
            if resp.status_code == 200:
                try:
                    choice = resp.json()["choices"][0]
                except (ValueError, KeyError, IndexError) as exc:
                    last_error = f"malformed response body: {exc}"
                else:
                    token_ids = choice.get("token_ids")
                    text = choice.get("text")
                    return GenerationRecord(
                        prompt_id=prompt_id,
                        temperature=temperature,
                        replicate=replicate,
                        status="ok",
                        token_ids=tuple(token_ids) if token_ids is not None else None,
                        text=text,
                        needs_tokenization=token_ids is None,
                        request_id=request_id,
                    )
            else:
                last_error = f"HTTP {resp.status_code}"
        if attempt + 1 < MAX_ATTEMPTS:
            time.sleep(RETRY_BACKOFF_SECONDS * 2**attempt)
    return GenerationRecord(
        prompt_id=prompt_id,
        temperature=temperature,
        replicate=replicate,
        status="error",
        error=last_error,
        request_id=request_id,
    )


def run_sweep(config: SweepConfig) -> RunManifest:
    """Issue one completion per (prompt, temperature, replicate) cell.

    Partial failures become per-cell error records after bounded retries;
    the run continues. In-flight requests never exceed
    ``config.request_parallelism``.
    """
    url = _completions_url(config.endpoint_url)
    try:
        requests.get(config.endpoint_url, timeout=10.0)
    except requests.RequestException as exc:
        raise EndpointError(f"endpoint {config.endpoint_url} unreachable: {exc}") from exc

    started = datetime.now(timezone.utc).isoformat()
    headers = _auth_headers()
    cells = [
        (pid, text, temp, rep)
        for pid, text in config.prompts
        for temp in config.temperatures
        for rep in range(config.generations_per_cell)
    ]
    session = requests.Session()
    with ThreadPoolExecutor(max_workers=config.request_parallelism) as pool:
        records = list(
            pool.map(
                lambda cell: _one_request(session, url, headers, config, cell[0], cell[1], cell[2], cell[3]),
                cells,
            )
        )
    records.sort(key=lambda r: r.cell_key)
    return RunManifest(
        config=config,
        started=started,
        finished=datetime.now(timezone.utc).isoformat(),
        records=tuple(records),
    )


def analyze_run(
    run_dir,
    table: EmbeddingTable,
    conv: EnergyConvention = DEFAULT_CONVENTION,
    tail_fraction: float = 0.2,
    gap_tolerance: float = 0.0,
    T_c_grid=None,
) -> AnalysisReport:
    """Full offline analysis of a persisted run.

    Energies are averaged per (temperature, prompt) cell first and the cell
    means feed the curve, so each prompt carries equal weight. The intrinsic
    dimension is estimated from the token vectors of generations at the grid
    temperature nearest 1.0 when that estimate is well posed.
    """
    manifest = load_run(run_dir)
    warnings = []
    completed = manifest.completed_records()
    if not completed:
        raise DependencyError(f"{run_dir} has no completed generations to analyze")

    cell_energies: dict = {}
    vectors_by_temp: dict = {}
    for record in completed:
        if record.token_ids is None:
            raise DependencyError(
                f"record {record.request_id!r} holds raw text only; run the model-adapter "
                "tokenize step to produce token ids before analysis"
            )
        seq = TokenSequence(
            token_ids=record.token_ids,
            temperature=record.temperature,
            prompt_id=record.prompt_id,
            model_id=manifest.config.model_id,
        )
        try:
            emb = lookup_embeddings(table, seq)
        except RangeError as exc:
            raise DependencyError(
                f"record {record.request_id!r} has token ids outside the embedding table; "
                f"re-extract embeddings for {manifest.config.model_id!r} ({exc})"
            ) from exc
        energy = sequence_energy(emb, conv)
        key = (record.temperature, record.prompt_id)
        cell_energies.setdefault(key, []).append((energy, len(seq)))
        vectors_by_temp.setdefault(record.temperature, []).append(emb.vectors)

    samples = []
    for (temp, prompt_id), pairs in sorted(cell_energies.items()):
        energies = [e for e, _ in pairs]
        mean_len = int(round(float(np.mean([l for _, l in pairs]))))
        samples.append(
            EnergySample(
                temperature=temp,
                energy=float(np.mean(energies)),
                length=max(mean_len, 1),
                prompt_id=prompt_id,
            )
        )
    curve = energy_curve(samples)

    fit = None
    gap = None
    verdict = None
    try:
        fit = fit_critical(curve, T_c_grid)
    except (InsufficientDataError, ConvergenceError) as exc:
        warnings.append(f"critical fit unavailable: {exc}")
    if fit is not None:
        try:
            gap = transition_gap(curve, fit.T_c, tail_fraction)
            verdict = diagnose_capacity(gap, gap_tolerance)
        except OnphaseError as exc:
            warnings.append(f"gap diagnostic unavailable: {exc}")

    intrinsic = None
    if vectors_by_temp:
        nearest = min(vectors_by_temp, key=lambda t: abs(t - 1.0))
        cloud = np.vstack(vectors_by_temp[nearest])
        try:
            intrinsic = twonn_dimension(cloud)
        except (InsufficientDataError, DegenerateInputError) as exc:
            warnings.append(f"intrinsic dimension at T={nearest:g} unavailable: {exc}")

    return AnalysisReport(
        curve=curve,
        fit=fit,
        gap=gap,
        verdict=verdict,
        intrinsic_dimension_at_T1=intrinsic,
        convention=conv,
        tail_fraction=tail_fraction,
        warnings=tuple(warnings),
    )


def report_to_dict(report: AnalysisReport) -> dict:
    return {
        "curve": [
            {
                "temperature": p.temperature,
                "mean_energy": p.mean_energy,
                "stderr": p.stderr,
                "count": p.count,
            }
            for p in report.curve.points
        ],
        "fit": None
        if report.fit is None
        else {
            "T_c": report.fit.T_c,
            "E_c": report.fit.E_c,
            "A_plus": report.fit.A_plus,
            "A_minus": report.fit.A_minus,
            "alpha": report.fit.alpha,
            "alpha_prime": report.fit.alpha_prime,
            "residual_sse": report.fit.residual_sse,
            "d_internal": report.fit.d_internal,
        },
        "gap": report.gap,
        "verdict": report.verdict.value if report.verdict is not None else None,
        "intrinsic_dimension_at_T1": report.intrinsic_dimension_at_T1,
        "convention": {
            "sign": report.convention.sign,
            "diagonal": report.convention.diagonal,
            "row_normalize": report.convention.row_normalize,
        },
        "tail_fraction": report.tail_fraction,
        "warnings": list(report.warnings),
    }


def report_from_dict(payload: dict) -> AnalysisReport:
    curve = EnergyCurve(
        points=tuple(
            CurvePoint(p["temperature"], p["mean_energy"], p["stderr"], p["count"])
            for p in payload["curve"]
        )
    )
    fit = None
    if payload.get("fit") is not None:
        fit = CriticalFit(**payload["fit"])
    verdict = Verdict(payload["verdict"]) if payload.get("verdict") else None
    conv = payload.get("convention", {})
    return AnalysisReport(
        curve=curve,
        fit=fit,
        gap=payload.get("gap"),
        verdict=verdict,
        intrinsic_dimension_at_T1=payload.get("intrinsic_dimension_at_T1"),
        convention=EnergyConvention(
            sign=conv.get("sign", "hamiltonian"),
            diagonal=conv.get("diagonal", "exclude"),
            row_normalize=bool(conv.get("row_normalize", True)),
        ),
        tail_fraction=float(payload.get("tail_fraction", 0.2)),
        warnings=tuple(payload.get("warnings", ())),
    )


def save_report(report: AnalysisReport, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n")
    return path


def load_report(path) -> AnalysisReport:
    return report_from_dict(json.loads(Path(path).read_text()))


def render_report(report: AnalysisReport, out_dir) -> list:
    """Write the report artifacts; byte-identical across re-renders.

    Always: ``curve.csv`` and ``diagnostic.json``. With a fit present:
    ``fit.json`` and ``plot_data.csv`` (dense fitted branches over the
    measured points). Warnings, if any, land in ``warnings.txt``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    written.append(write_curve_csv(report.curve, out_dir / "curve.csv"))

    written.append(
        write_diagnostic_report(
            out_dir / "diagnostic.json",
            gap=report.gap,
            T_c=report.fit.T_c if report.fit is not None else None,
            tail_fraction=report.tail_fraction,
            verdict=report.verdict,
        )
    )

    if report.fit is not None:
        written.append(write_fit_report(report.fit, report.curve, out_dir / "fit.json"))
        T = report.curve.temperatures
        dense = np.linspace(T[0], T[-1], 200)
        model = critical_energy_curve(
            dense,
            report.fit.T_c,
            report.fit.E_c,
            report.fit.A_plus,
            report.fit.A_minus,
            report.fit.alpha,
            report.fit.alpha_prime,
        )
        lines = ["kind,temperature,energy,stderr"]
        for p in report.curve.points:
            lines.append(f"point,{p.temperature!r},{p.mean_energy!r},{p.stderr!r}")
        for t, e in zip(dense, model):
            lines.append(f"fit,{t!r},{e!r},")
        plot_path = out_dir / "plot_data.csv"
        plot_path.write_text("\n".join(lines) + "\n")
        written.append(plot_path)

    if report.warnings:
        warn_path = out_dir / "warnings.txt"
        warn_path.write_text("\n".join(report.warnings) + "\n")
        written.append(warn_path)
    return written
