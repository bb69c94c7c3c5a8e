"""Run-directory persistence: config validation, manifest roundtrip, layout."""

import numpy as np
import pytest

from onphase.errors import DependencyError, ValidationError
from onphase.runs import (
    GenerationRecord,
    RunManifest,
    SweepConfig,
    load_run,
    record_filename,
    save_run,
)


def make_config(**overrides):
    base = dict(
        endpoint_url="http://localhost:1",
        model_id="m",
        temperatures=(0.5, 1.0),
        prompts=(("p1", "hello"),),
        max_tokens=8,
        generations_per_cell=1,
        request_parallelism=2,
        seed=0,
    )
    base.update(overrides)
    return SweepConfig(**base)


def make_manifest(config=None):
    config = config or make_config()
    records = []
    for pid, _ in config.prompts:
        for temp in config.temperatures:
            for rep in range(config.generations_per_cell):
                records.append(
                    GenerationRecord(
                        prompt_id=pid,
                        temperature=temp,
                        replicate=rep,
                        status="ok",
                        token_ids=(1, 2, 3),
                        request_id=f"{pid}:{temp:g}:{rep}",
                    )
                )
    return RunManifest(config=config, started="t0", finished="t1", records=tuple(records))


def test_config_validation():
    with pytest.raises(ValidationError):
        make_config(temperatures=())
    with pytest.raises(ValidationError):
        make_config(temperatures=(-1.0,))
    with pytest.raises(ValidationError):
        make_config(temperatures=(1.0, 0.5))
    with pytest.raises(ValidationError):
        make_config(prompts=())
    with pytest.raises(ValidationError):
        make_config(max_tokens=0)


def test_config_json_roundtrip():
    config = make_config()
    assert SweepConfig.from_dict(config.to_dict()) == config


def test_save_and_load_roundtrip(tmp_path):
    manifest = make_manifest()
    run_dir = save_run(manifest, tmp_path / "run")
    assert load_run(run_dir) == manifest


def test_layout_one_file_per_cell(tmp_path):
    manifest = make_manifest(make_config(temperatures=(0.5, 1.0), generations_per_cell=2))
    run_dir = save_run(manifest, tmp_path / "run")
    gen_files = sorted(p.name for p in (run_dir / "generations").iterdir())
    assert len(gen_files) == 4
    assert (run_dir / "manifest.json").exists()
    assert record_filename(manifest.records[0]) in gen_files


def test_save_rejects_incomplete_manifest(tmp_path):
    manifest = make_manifest()
    incomplete = RunManifest(
        config=manifest.config,
        started="t0",
        finished="t1",
        records=manifest.records[:1],
    )
    with pytest.raises(ValidationError):
        save_run(incomplete, tmp_path / "run")


def test_error_records_count_toward_completeness(tmp_path):
    config = make_config(temperatures=(0.5,))
    records = (
        GenerationRecord(
            prompt_id="p1", temperature=0.5, replicate=0, status="error", error="HTTP 500"
        ),
    )
    manifest = RunManifest(config=config, records=records)
    run_dir = save_run(manifest, tmp_path / "run")
    assert load_run(run_dir).records[0].error == "HTTP 500"


def test_save_to_regular_file_errors(tmp_path):
    target = tmp_path / "not_a_dir"
    target.write_text("occupied")
    with pytest.raises(OSError):
        save_run(make_manifest(), target)


def test_load_missing_manifest(tmp_path):
    with pytest.raises(DependencyError):
        load_run(tmp_path)


def test_duplicate_cell_records_rejected():
    config = make_config(temperatures=(0.5,))
    record = GenerationRecord(
        prompt_id="p1", temperature=0.5, replicate=0, status="ok", token_ids=(1,)
    )
    with pytest.raises(ValidationError):
        RunManifest(config=config, records=(record, record))


def test_record_requires_payload():
    with pytest.raises(ValidationError):
        GenerationRecord(prompt_id="p", temperature=1.0, replicate=0, status="ok")
