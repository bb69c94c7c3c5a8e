"""Dominant-interaction graph over tokens and intrinsic-dimension estimation.

Two unit-normalized token vectors are considered strongly interacting when
the magnitude of their inner product exceeds a threshold of the form
k/sqrt(N); for random unit vectors in R^N the squared inner product averages
1/N, so inner products of order 1/sqrt(N) and above stand out.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import DegenerateInputError, InsufficientDataError, RangeError, ValidationError


@dataclass(frozen=True)
class AttentionGraph:
    """Undirected graph on token positions; edges are strong interactions."""

    node_count: int
    edges: frozenset
    threshold: float

    def __post_init__(self):
        for a, b in self.edges:
            if a == b:
                raise ValidationError("self-loops are not allowed")
            if not (0 <= a < self.node_count and 0 <= b < self.node_count):
                raise RangeError(f"edge ({a}, {b}) outside [0, {self.node_count})")


@dataclass(frozen=True)
class GraphStats:
    mean_degree: float
    component_count: int
    clustering_coefficient: float


def dominance_threshold(N: int, k: float = 1.0) -> float:
    """Threshold k/sqrt(N) separating dominant interactions from background."""
    if N < 1:
        raise ValidationError(f"dimension must be >= 1, got {N}")
    if k <= 0:
        raise ValidationError(f"threshold multiplier must be > 0, got {k}")
    return k / np.sqrt(N)


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0):
        bad = int(np.argwhere(norms == 0)[0, 0])
        raise DegenerateInputError(f"zero-norm vector at position {bad}")
    return vectors / norms[:, None]


def build_interaction_graph(seq, threshold: float) -> AttentionGraph:
    """Edges between positions whose |cosine| exceeds ``threshold``.

    ``seq`` may be an EmbeddingSequence or a plain (L, N) array.
    """
    vectors = getattr(seq, "vectors", seq)
    unit = _unit_rows(vectors)
    cos = unit @ unit.T
    upper = np.triu(np.abs(cos) > threshold, k=1)
    edges = frozenset((int(a), int(b)) for a, b in np.argwhere(upper))
    return AttentionGraph(node_count=unit.shape[0], edges=edges, threshold=float(threshold))


def mean_sq_random_inner(N: int, trials: int, seed=None) -> float:
    """Monte Carlo estimate of E[(u.v)^2] for independent uniform unit vectors."""
    if N < 1:
        raise ValidationError("dimension must be >= 1")
    if trials < 1:
        raise ValidationError("need at least one trial")
    rng = np.random.default_rng(seed)
    u = _unit_rows(rng.standard_normal((trials, N)))
    v = _unit_rows(rng.standard_normal((trials, N)))
    return float(np.mean(np.einsum("ij,ij->i", u, v) ** 2))


def twonn_dimension(points) -> float:
    """Two-nearest-neighbor intrinsic dimension, maximum-likelihood form.

    For each point take the ratio mu = r2/r1 of its second and first nearest
    neighbor distances; the estimate is n / sum(log mu). Exact duplicates are
    removed first.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValidationError("points must be a 2-d array")
    pts = np.unique(pts, axis=0)
    n = pts.shape[0]
    if n < 10:
        raise InsufficientDataError(f"need >= 10 distinct points, got {n}")
    dists, _ = cKDTree(pts).query(pts, k=3)
    r1, r2 = dists[:, 1], dists[:, 2]
    if np.any(r1 == 0):
        raise DegenerateInputError("coincident points survived deduplication")
    log_mu_sum = float(np.sum(np.log(r2 / r1)))
    if log_mu_sum <= 0:
        raise DegenerateInputError("no distance contrast between first and second neighbors")
    return n / log_mu_sum


def graph_stats(g: AttentionGraph) -> GraphStats:
    """Mean degree, connected components and global clustering coefficient."""
    n = g.node_count
    adj = np.zeros((n, n), dtype=np.int64)
    for a, b in g.edges:
        adj[a, b] = adj[b, a] = 1
    n_components, _ = connected_components(csr_matrix(adj), directed=False)
    degrees = adj.sum(axis=1)
    triangles = np.trace(adj @ adj @ adj) / 6
    triads = float(np.sum(degrees * (degrees - 1)) / 2)
    clustering = float(3 * triangles / triads) if triads > 0 else 0.0
    return GraphStats(
        mean_degree=float(2 * len(g.edges) / n) if n else 0.0,
        component_count=int(n_components),
        clustering_coefficient=clustering,
    )


def write_edge_list(g: AttentionGraph, path) -> Path:
    """Edge-list export: header with node count and threshold, then one edge per line."""
    path = Path(path)
    lines = [f"# nodes={g.node_count} threshold={g.threshold!r}"]
    for a, b in sorted(g.edges):
        lines.append(f"{a} {b}")
    path.write_text("\n".join(lines) + "\n")
    return path
