"""Token graph construction and the biased fixed-point ranking.

The ranker implements one update rule

    v_i <- bias_i * (1 - d) + d * sum_j (e_ij / colsum_j) * v_j

covering all graph modes: bias == 1 gives the classic unbiased ranking,
bias = similarity-to-input gives the self-biased variant, and
bias = self * category over the augmented graph gives the full engine.
Updates are synchronous (Jacobi-style) so results never depend on vertex
order; scores start at 1.0 and the affine map has a unique fixed point
for d < 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import WordVectors, cosine, embed_phrase
from .textprep import ORIGIN_RANK, CandidateTerm


@dataclass
class RankConfig:
    damping: float = 0.8
    iterations: int = 80
    edge_threshold: float = 0.9
    convergence_epsilon: float = 1e-6

    def __post_init__(self) -> None:
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must be in (0, 1), got {self.damping}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class TokenGraph:
    """Vertices plus a symmetric nonnegative weight matrix (zero diagonal)."""

    vertices: list[CandidateTerm]
    weights: np.ndarray
    augmented: bool = False

    def __len__(self) -> int:
        return len(self.vertices)

    def index_of(self, term: str) -> int | None:
        for i, v in enumerate(self.vertices):
            if v.term == term:
                return i
        return None


@dataclass
class RankScores:
    values: np.ndarray
    iterations_run: int
    converged: bool


def _pairwise_edges(vectors: list[np.ndarray | None], threshold: float) -> np.ndarray:
    """Symmetric cosine matrix, zeroed below threshold and on the diagonal.
    Vertices without a vector stay isolated (zero row/column).
    """
    n = len(vectors)
    weights = np.zeros((n, n), dtype=np.float64)
    norms = [None if v is None else float(np.linalg.norm(v)) for v in vectors]
    for i in range(n):
        vi, ni = vectors[i], norms[i]
        if vi is None or ni == 0.0:
            continue
        for j in range(i + 1, n):
            vj, nj = vectors[j], norms[j]
            if vj is None or nj == 0.0:
                continue
            sim = float(np.dot(vi, vj)) / (ni * nj)
            if sim >= threshold:
                # a nonpositive threshold can let negative cosines through;
                # edge weights must stay nonnegative
                w = max(sim, 0.0)
                weights[i, j] = w
                weights[j, i] = w
    return weights


def build_token_graph(
    candidates: list[CandidateTerm],
    store: WordVectors,
    threshold: float = 0.9,
) -> TokenGraph:
    """Graph over candidate terms with cosine-thresholded edges."""
    if not candidates:
        raise ValueError("empty graph: no candidate terms")
    vectors = [embed_phrase(store, c.term) for c in candidates]
    return TokenGraph(
        vertices=list(candidates),
        weights=_pairwise_edges(vectors, threshold),
        augmented=False,
    )


def self_bias(
    candidates: list[CandidateTerm],
    ad_vector: np.ndarray,
    store: WordVectors,
) -> np.ndarray:
    """Per-vertex similarity to the whole input text, clamped at zero."""
    bias = np.zeros(len(candidates), dtype=np.float64)
    for i, cand in enumerate(candidates):
        vec = embed_phrase(store, cand.term)
        if vec is None:
            continue
        bias[i] = max(0.0, cosine(ad_vector, vec))
    return bias


def rank(graph: TokenGraph, config: RankConfig, bias: np.ndarray) -> RankScores:
    """Iterate the biased update until convergence or the iteration budget.

    Columns are normalized by their weight sum; a vertex with no neighbors
    has a zero column and simply contributes nothing. Early stop when the
    max per-vertex change drops below ``convergence_epsilon``.
    """
    n = len(graph)
    bias = np.asarray(bias, dtype=np.float64)
    if bias.shape != (n,):
        raise ValueError(f"bias length {bias.shape} != vertex count {n}")
    colsum = graph.weights.sum(axis=0)
    safe = np.where(colsum > 0.0, colsum, 1.0)
    transfer = graph.weights / safe  # column j scaled by 1/colsum_j
    d = config.damping
    restart = (1.0 - d) * bias
    values = np.ones(n, dtype=np.float64)
    iterations_run = 0
    converged = False
    for _ in range(config.iterations):
        updated = restart + d * (transfer @ values)
        delta = float(np.max(np.abs(updated - values))) if n else 0.0
        values = updated
        iterations_run += 1
        if delta < config.convergence_epsilon:
            converged = True
            break
    return RankScores(values=values, iterations_run=iterations_run, converged=converged)


def select_keyword(graph: TokenGraph, scores: RankScores) -> CandidateTerm:
    """Highest-scored vertex; ties prefer input-text origin, then earliest
    position, then lexicographic term order.
    """
    if not graph.vertices:
        raise ValueError("empty graph: nothing to select")
    best = min(
        range(len(graph)),
        key=lambda i: (
            -scores.values[i],
            ORIGIN_RANK[graph.vertices[i].origin],
            graph.vertices[i].position,
            graph.vertices[i].term,
        ),
    )
    return graph.vertices[best]


def top_k(graph: TokenGraph, scores: RankScores, k: int) -> list[tuple[CandidateTerm, float]]:
    """Best-k vertices under the same ordering select_keyword uses."""
    order = sorted(
        range(len(graph)),
        key=lambda i: (
            -scores.values[i],
            ORIGIN_RANK[graph.vertices[i].origin],
            graph.vertices[i].position,
            graph.vertices[i].term,
        ),
    )
    return [(graph.vertices[i], float(scores.values[i])) for i in order[:k]]
