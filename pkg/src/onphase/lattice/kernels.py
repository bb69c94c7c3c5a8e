"""Backend selection for the hot update loops.

The compiled Cython extension is preferred when importable; setting the
environment variable ``ONPHASE_PURE_PYTHON=1`` before import forces the
numpy fallback. :func:`set_backend` / :func:`backend_context` switch at
runtime (used by the benchmark and the test suite).
"""

from __future__ import annotations

import os
from contextlib import contextmanager

from ..errors import ValidationError
from . import _pure

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = "python"
if _compiled is not None and os.environ.get("ONPHASE_PURE_PYTHON", "") != "1":
    _active = "compiled"


def available_backends() -> tuple:
    return ("compiled", "python") if _compiled is not None else ("python",)


def active_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in available_backends():
        raise ValidationError(f"backend {name!r} not available; have {available_backends()}")
    _active = name


@contextmanager
def backend_context(name: str):
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def metropolis_sweep_kernel(spins, geom, J, T, sigma, rng):
    if _active == "compiled":
        return _compiled.metropolis_sweep(spins, geom.neighbors, J, T, sigma, rng)
    return _pure.metropolis_sweep(spins, geom, J, T, sigma, rng)


def wolff_update_kernel(spins, geom, J, T, rng):
    if _active == "compiled":
        return _compiled.wolff_update(spins, geom.neighbors, J, T, rng)
    return _pure.wolff_update(spins, geom, J, T, rng)
