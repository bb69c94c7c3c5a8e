"""Run-directory interchange: sweep configs, generation records, manifests.

A persisted run is a directory holding ``manifest.json`` (config, timestamps,
record index) and one JSON record file per (prompt, temperature, replicate)
cell under ``generations/``. Generation and analysis communicate only through
this layout, so analysis can rerun offline.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DependencyError, ValidationError

_MANIFEST_NAME = "manifest.json"
_GENERATIONS_DIR = "generations"


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition for one temperature sweep against an endpoint."""

    endpoint_url: str
    model_id: str
    temperatures: tuple
    prompts: tuple  # ((prompt_id, text), ...)
    max_tokens: int = 1024
    generations_per_cell: int = 1
    request_parallelism: int = 4
    seed: int = 0

    def __post_init__(self):
        temps = tuple(float(t) for t in self.temperatures)
        if not temps:
            raise ValidationError("temperature grid must be nonempty")
        if any(t < 0 or not np.isfinite(t) for t in temps):
            raise ValidationError("temperatures must be finite and >= 0")
        if any(t2 <= t1 for t1, t2 in zip(temps, temps[1:])):
            raise ValidationError("temperatures must be sorted strictly ascending")
        prompts = tuple((str(pid), str(text)) for pid, text in self.prompts)
        if not prompts:
            raise ValidationError("need at least one prompt")
        if len({pid for pid, _ in prompts}) != len(prompts):
            raise ValidationError("prompt ids must be unique")
        if self.max_tokens < 1 or self.generations_per_cell < 1 or self.request_parallelism < 1:
            raise ValidationError("max_tokens, generations_per_cell and parallelism must be >= 1")
        object.__setattr__(self, "temperatures", temps)
        object.__setattr__(self, "prompts", prompts)

    def to_dict(self) -> dict:
        return {
            "endpoint_url": self.endpoint_url,
            "model_id": self.model_id,
            "temperatures": list(self.temperatures),
            "prompts": [list(p) for p in self.prompts],
            "max_tokens": self.max_tokens,
            "generations_per_cell": self.generations_per_cell,
            "request_parallelism": self.request_parallelism,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SweepConfig":
        return cls(
            endpoint_url=payload["endpoint_url"],
            model_id=payload["model_id"],
            temperatures=tuple(payload["temperatures"]),
            prompts=tuple((p[0], p[1]) for p in payload["prompts"]),
            max_tokens=int(payload.get("max_tokens", 1024)),
            generations_per_cell=int(payload.get("generations_per_cell", 1)),
            request_parallelism=int(payload.get("request_parallelism", 4)),
            seed=int(payload.get("seed", 0)),
        )


@dataclass(frozen=True)
class GenerationRecord:
    """Outcome of one completion request."""

    prompt_id: str
    temperature: float
    replicate: int
    status: str  # "ok" | "error"
    token_ids: tuple | None = None
    text: str | None = None
    needs_tokenization: bool = False
    error: str | None = None
    request_id: str = ""

    def __post_init__(self):
        if self.status not in ("ok", "error"):
            raise ValidationError(f"unknown record status {self.status!r}")
        if self.status == "ok" and self.token_ids is None and self.text is None:
            raise ValidationError("a completed record needs token ids or text")
        if self.token_ids is not None:
            object.__setattr__(self, "token_ids", tuple(int(t) for t in self.token_ids))

    @property
    def cell_key(self):
        return (self.prompt_id, self.temperature, self.replicate)

    def to_dict(self) -> dict:
        return {
            "prompt_id": self.prompt_id,
            "temperature": self.temperature,
            "replicate": self.replicate,
            "status": self.status,
            "token_ids": list(self.token_ids) if self.token_ids is not None else None,
            "text": self.text,
            "needs_tokenization": self.needs_tokenization,
            "error": self.error,
            "request_id": self.request_id,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "GenerationRecord":
        ids = payload.get("token_ids")
        return cls(
            prompt_id=payload["prompt_id"],
            temperature=float(payload["temperature"]),
            replicate=int(payload["replicate"]),
            status=payload["status"],
            token_ids=tuple(ids) if ids is not None else None,
            text=payload.get("text"),
            needs_tokenization=bool(payload.get("needs_tokenization", False)),
            error=payload.get("error"),
            request_id=str(payload.get("request_id", "")),
        )


@dataclass(frozen=True)
class RunManifest:
    """One sweep's config, timestamps and per-cell generation records."""

    config: SweepConfig
    started: str = ""
    finished: str = ""
    records: tuple = ()

    def __post_init__(self):
        records = tuple(self.records)
        keys = [r.cell_key for r in records]
        if len(set(keys)) != len(keys):
            raise ValidationError("duplicate (prompt, temperature, replicate) record")
        object.__setattr__(self, "records", records)

    def validate_complete(self) -> None:
        """Every (prompt, temperature) cell has all replicates, ok or error."""
        want = self.config.generations_per_cell
        for pid, _ in self.config.prompts:
            for temp in self.config.temperatures:
                have = sum(
                    1 for r in self.records if r.prompt_id == pid and r.temperature == temp
                )
                if have != want:
                    raise ValidationError(
                        f"cell ({pid!r}, T={temp}) has {have} records, expected {want}"
                    )

    def completed_records(self) -> list:
        return [r for r in self.records if r.status == "ok"]


def _sanitize(token: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", token) or "_"


def record_filename(record: GenerationRecord) -> str:
    return f"{_sanitize(record.prompt_id)}__T{record.temperature:g}__r{record.replicate}.json"


def save_run(manifest: RunManifest, root) -> Path:
    """Persist the manifest layout under ``root``; returns the run directory."""
    root = Path(root)
    manifest.validate_complete()
    root.mkdir(parents=True, exist_ok=True)
    gen_dir = root / _GENERATIONS_DIR
    gen_dir.mkdir(exist_ok=True)
    index = []
    for record in sorted(manifest.records, key=lambda r: r.cell_key):
        name = record_filename(record)
        (gen_dir / name).write_text(json.dumps(record.to_dict(), indent=2, sort_keys=True))
        index.append(name)
    payload = {
        "config": manifest.config.to_dict(),
        "started": manifest.started,
        "finished": manifest.finished,
        "generation_files": index,
    }
    (root / _MANIFEST_NAME).write_text(json.dumps(payload, indent=2, sort_keys=True))
    return root


def load_run(run_dir) -> RunManifest:
    """Load a persisted run; inverse of :func:`save_run` field-for-field."""
    run_dir = Path(run_dir)
    manifest_path = run_dir / _MANIFEST_NAME
    if not manifest_path.exists():
        raise DependencyError(
            f"{run_dir} has no {_MANIFEST_NAME}; generate a run first (onphase sweep)"
        )
    payload = json.loads(manifest_path.read_text())
    records = []
    for name in payload["generation_files"]:
        rec_payload = json.loads((run_dir / _GENERATIONS_DIR / name).read_text())
        records.append(GenerationRecord.from_dict(rec_payload))
    return RunManifest(
        config=SweepConfig.from_dict(payload["config"]),
        started=payload.get("started", ""),
        finished=payload.get("finished", ""),
        records=tuple(records),
    )
