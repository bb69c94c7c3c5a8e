"""Shared fixtures: a mock completions endpoint and planted-physics tables."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from onphase.ingest import EmbeddingTable
from onphase.scaling import critical_energy_curve


class MockCompletionsServer:
    """Minimal OpenAI-style completions endpoint for tests.

    ``responder`` maps a parsed request body to (status_code, payload_dict).
    The server counts in-flight requests so tests can assert the client's
    parallelism bound.
    """

    def __init__(self, responder):
        self.responder = responder
        self._lock = threading.Lock()
        self.inflight = 0
        self.max_inflight = 0
        self.request_count = 0
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):  # reachability probe
                self.send_response(200)
                self.end_headers()
                self.wfile.write(b"ok")

            def do_POST(self):
                with outer._lock:
                    outer.inflight += 1
                    outer.request_count += 1
                    outer.max_inflight = max(outer.max_inflight, outer.inflight)
                try:
                    length = int(self.headers.get("Content-Length", 0))
                    body = json.loads(self.rfile.read(length) or b"{}")
                    status, payload = outer.responder(body)
                    data = json.dumps(payload).encode()
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                finally:
                    with outer._lock:
                        outer.inflight -= 1

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def mock_server():
    def factory(responder):
        return MockCompletionsServer(responder)

    return factory


class PlantedWorld:
    """Embedding table plus token streams whose energies follow a planted law.

    The vocabulary is organized in one band per grid temperature: the L
    tokens of band k share a hidden direction with weight c_k, so a
    generation made of band k's distinct tokens has pairwise cosines exactly
    c_k and hamiltonian/exclude energy -(L-1)*c_k. Choosing
    c_k = -E_target(T_k)/(L-1) plants any nonpositive energy profile.
    """

    def __init__(self, temperatures, energy_of_temp, tokens_per_band=64, model_id="planted"):
        self.temperatures = [float(t) for t in temperatures]
        self.L = tokens_per_band
        bands = len(self.temperatures)
        self.targets = np.array([energy_of_temp(t) for t in self.temperatures])
        c = -self.targets / (self.L - 1)
        if np.any(c < 0) or np.any(c >= 1):
            raise ValueError(f"planted energies out of representable range: {self.targets}")
        dim = self.L + bands
        rows = np.zeros((bands * self.L, dim), dtype=np.float32)
        for k, ck in enumerate(c):
            for i in range(self.L):
                rows[k * self.L + i, i] = np.sqrt(1.0 - ck)
                rows[k * self.L + i, self.L + k] = np.sqrt(ck)
        self.table = EmbeddingTable(rows=rows, model_id=model_id)

    def band_index(self, temperature: float) -> int:
        return int(np.argmin([abs(temperature - t) for t in self.temperatures]))

    def token_ids(self, temperature: float) -> list:
        k = self.band_index(temperature)
        return list(range(k * self.L, (k + 1) * self.L))

    def responder(self, body: dict):
        ids = self.token_ids(float(body["temperature"]))
        return 200, {"choices": [{"token_ids": ids, "text": None}]}


def planted_critical_world(
    temperatures,
    T_c=1.2,
    E_c=-4.0,
    A_plus=2.0,
    A_minus=2.0,
    alpha=0.3,
    alpha_prime=0.5,
    tokens_per_band=64,
):
    """World whose energy-temperature profile is the two-branch critical law."""

    def law(t):
        return float(
            critical_energy_curve(
                np.array([t]), T_c, E_c, A_plus, A_minus, alpha, alpha_prime
            )[0]
        )

    return PlantedWorld(temperatures, law, tokens_per_band)


def planted_drop_world(temperatures, T_c=1.2, E_c=-4.0, A_minus=2.0, drop=2.0,
                       alpha_prime=0.5, tokens_per_band=64):
    """Small-model shape: energy keeps falling past the transition."""

    def law(t):
        if t <= T_c:
            return E_c - A_minus * (T_c - t) ** (1.0 - alpha_prime)
        return E_c - drop * (t - T_c) ** 0.7

    return PlantedWorld(temperatures, law, tokens_per_band)
