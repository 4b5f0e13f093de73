import math

import numpy as np
import pytest

from imagequery.graph import (
    RankConfig,
    RankScores,
    TokenGraph,
    build_token_graph,
    rank,
    select_keyword,
    self_bias,
)
from imagequery.textprep import (
    NOUN,
    ORIGIN_AD_TEXT,
    ORIGIN_NEIGHBOR_TAG,
    CandidateTerm,
)

from conftest import store_from


def terms(*names, origin=ORIGIN_AD_TEXT):
    return [CandidateTerm(term=n, pos=NOUN, position=i, origin=origin) for i, n in enumerate(names)]


def fixed_point_oracle(weights: np.ndarray, bias: np.ndarray, d: float) -> np.ndarray:
    """Direct linear solve of v = (1-d) b + d W~ v with column-normalized W~."""
    colsum = weights.sum(axis=0)
    wt = weights / np.where(colsum > 0.0, colsum, 1.0)
    n = len(bias)
    return np.linalg.solve(np.eye(n) - d * wt, (1.0 - d) * bias)


def random_graph(rng: np.random.RandomState, max_n: int = 6) -> np.ndarray:
    n = rng.randint(1, max_n + 1)
    w = rng.rand(n, n) * (rng.rand(n, n) < 0.6)
    w = np.triu(w, k=1)
    return w + w.T


TIGHT = RankConfig(iterations=2000, convergence_epsilon=1e-14)


class TestBuildGraph:
    def test_edge_above_threshold(self):
        second = math.sqrt(1 - 0.95**2)
        store = store_from({"sofa": [1.0, 0.0], "couch": [0.95, second]})
        g = build_token_graph(terms("sofa", "couch"), store, threshold=0.9)
        assert g.weights[0, 1] == pytest.approx(0.95, abs=1e-12)
        assert g.weights[1, 0] == g.weights[0, 1]

    def test_no_edge_below_threshold(self):
        store = store_from({"sofa": [1.0, 0.0], "tax": [0.3, math.sqrt(1 - 0.09)]})
        g = build_token_graph(terms("sofa", "tax"), store, threshold=0.9)
        assert not g.weights.any()

    def test_edges_match_pairwise_cosines(self):
        # oracle: explicit cosine of every pair
        rng = np.random.RandomState(5)
        vecs = {f"w{i}": rng.randn(8) for i in range(4)}
        store = store_from({k: list(v) for k, v in vecs.items()})
        threshold = 0.2
        g = build_token_graph(terms(*vecs), store, threshold)
        names = list(vecs)
        for i in range(4):
            for j in range(4):
                vi, vj = vecs[names[i]], vecs[names[j]]
                cos = vi @ vj / (np.linalg.norm(vi) * np.linalg.norm(vj))
                expected = cos if (i != j and cos >= threshold) else 0.0
                assert g.weights[i, j] == pytest.approx(expected, abs=1e-12)

    def test_empty_candidates_rejected(self):
        store = store_from({"a": [1.0]})
        with pytest.raises(ValueError, match="empty graph"):
            build_token_graph([], store)

    def test_oov_candidate_is_isolated(self):
        store = store_from({"sofa": [1.0, 0.0]})
        g = build_token_graph(terms("sofa", "zzz"), store, threshold=0.0)
        assert not g.weights[1].any()

    def test_diagonal_zero_and_symmetric(self):
        rng = np.random.RandomState(9)
        store = store_from({f"w{i}": list(rng.randn(5)) for i in range(6)})
        g = build_token_graph(terms(*store.vectors), store, threshold=0.1)
        assert np.array_equal(g.weights, g.weights.T)
        assert not np.diag(g.weights).any()

    def test_nonpositive_threshold_clamps_weights(self):
        store = store_from({"a": [1.0, 0.0], "b": [-1.0, 0.0]})
        g = build_token_graph(terms("a", "b"), store, threshold=-1.0)
        assert (g.weights >= 0.0).all()


class TestSelfBias:
    def test_identity_gives_one(self):
        store = store_from({"a": [2.0, 0.0]})
        bias = self_bias(terms("a"), np.array([4.0, 0.0]), store)
        assert bias[0] == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_gives_zero(self):
        store = store_from({"a": [0.0, 1.0]})
        bias = self_bias(terms("a"), np.array([1.0, 0.0]), store)
        assert bias[0] == 0.0

    def test_negative_cosine_clamped(self):
        store = store_from({"a": [-0.2, math.sqrt(1 - 0.04)]})
        bias = self_bias(terms("a"), np.array([1.0, 0.0]), store)
        assert bias[0] == 0.0

    def test_oov_gets_zero(self):
        store = store_from({"a": [1.0, 0.0]})
        bias = self_bias(terms("a", "missing"), np.array([1.0, 0.0]), store)
        assert bias[1] == 0.0


class TestRank:
    def test_symmetric_pair_equal_scores(self):
        g = TokenGraph(terms("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]))
        scores = rank(g, RankConfig(), np.ones(2))
        assert scores.values[0] == scores.values[1]

    def test_isolated_vertex_closed_form(self):
        g = TokenGraph(terms("a"), np.zeros((1, 1)))
        scores = rank(g, RankConfig(damping=0.8), np.array([0.5]))
        assert scores.values[0] == (1.0 - 0.8) * 0.5
        assert scores.values[0] == pytest.approx(0.1, abs=1e-12)
        assert scores.converged

    def test_three_vertex_matches_linear_solve(self):
        rng = np.random.RandomState(17)
        w = np.triu(rng.rand(3, 3), k=1)
        w = w + w.T
        bias = rng.rand(3)
        g = TokenGraph(terms("a", "b", "c"), w)
        scores = rank(g, TIGHT, bias)
        expected = fixed_point_oracle(w, bias, TIGHT.damping)
        assert np.max(np.abs(scores.values - expected)) < 1e-6

    def test_unbiased_equals_oracle_with_ones(self):
        rng = np.random.RandomState(23)
        for _ in range(25):
            w = random_graph(rng)
            n = len(w)
            g = TokenGraph(terms(*[f"w{i}" for i in range(n)]), w)
            scores = rank(g, TIGHT, np.ones(n))
            expected = fixed_point_oracle(w, np.ones(n), TIGHT.damping)
            assert np.max(np.abs(scores.values - expected)) < 1e-6

    def test_bias_length_checked(self):
        g = TokenGraph(terms("a", "b"), np.zeros((2, 2)))
        with pytest.raises(ValueError):
            rank(g, RankConfig(), np.ones(3))

    def test_deterministic_bitwise(self):
        rng = np.random.RandomState(31)
        w = random_graph(rng)
        n = len(w)
        g = TokenGraph(terms(*[f"w{i}" for i in range(n)]), w)
        bias = rng.rand(n)
        a = rank(g, RankConfig(), bias)
        b = rank(g, RankConfig(), bias)
        assert np.array_equal(a.values, b.values)
        assert a.iterations_run == b.iterations_run

    def test_bias_scaling_never_changes_argmax(self):
        rng = np.random.RandomState(37)
        for _ in range(30):
            w = random_graph(rng)
            n = len(w)
            g = TokenGraph(terms(*[f"w{i}" for i in range(n)]), w)
            bias = rng.rand(n)
            base = select_keyword(g, rank(g, TIGHT, bias)).term
            for alpha in (0.25, 3.0):
                scaled = select_keyword(g, rank(g, TIGHT, alpha * bias)).term
                assert scaled == base

    def test_isolated_bias_monotone(self):
        g = TokenGraph(terms("a"), np.zeros((1, 1)))
        lo = rank(g, RankConfig(), np.array([0.2])).values[0]
        hi = rank(g, RankConfig(), np.array([0.7])).values[0]
        assert hi > lo

    def test_l1_delta_contracts(self):
        # the affine map contracts in L1 (columns of W~ sum to <= 1); the
        # per-vertex max delta can transiently grow on hub graphs
        rng = np.random.RandomState(41)
        star = np.zeros((5, 5))
        star[0, 1:] = star[1:, 0] = 1.0
        path = np.diag(np.ones(2), k=1)
        path = path + path.T
        graphs = [star, path] + [random_graph(rng) for _ in range(20)]
        d = 0.8
        for w in graphs:
            n = len(w)
            colsum = w.sum(axis=0)
            wt = w / np.where(colsum > 0.0, colsum, 1.0)
            bias = rng.rand(n)
            v = np.ones(n)
            prev_delta = None
            for _ in range(60):
                nxt = (1 - d) * bias + d * (wt @ v)
                delta = float(np.abs(nxt - v).sum())
                if prev_delta is not None:
                    assert delta <= prev_delta + 1e-12
                prev_delta = delta
                v = nxt
            assert prev_delta < 1e-3  # and it actually converges


class TestSelectKeyword:
    def test_argmax(self):
        g = TokenGraph(terms("a", "b"), np.zeros((2, 2)))
        scores = RankScores(np.array([0.9, 0.3]), 1, True)
        assert select_keyword(g, scores).term == "a"

    def test_tie_prefers_ad_text_origin(self):
        vs = [
            CandidateTerm("zeta", NOUN, 0, ORIGIN_NEIGHBOR_TAG),
            CandidateTerm("alpha", NOUN, 1, ORIGIN_AD_TEXT),
        ]
        g = TokenGraph(vs, np.zeros((2, 2)))
        scores = RankScores(np.array([0.5, 0.5]), 1, True)
        assert select_keyword(g, scores).term == "alpha"

    def test_tie_prefers_smaller_position(self):
        vs = [
            CandidateTerm("b", NOUN, 5, ORIGIN_AD_TEXT),
            CandidateTerm("a", NOUN, 2, ORIGIN_AD_TEXT),
        ]
        g = TokenGraph(vs, np.zeros((2, 2)))
        scores = RankScores(np.array([0.5, 0.5]), 1, True)
        assert select_keyword(g, scores).term == "a"

    def test_tie_lexicographic_last(self):
        vs = [
            CandidateTerm("beta", NOUN, 1, ORIGIN_AD_TEXT),
            CandidateTerm("alpha", NOUN, 1, ORIGIN_AD_TEXT),
        ]
        g = TokenGraph(vs, np.zeros((2, 2)))
        scores = RankScores(np.array([0.5, 0.5]), 1, True)
        assert select_keyword(g, scores).term == "alpha"

    def test_empty_graph_rejected(self):
        g = TokenGraph([], np.zeros((0, 0)))
        with pytest.raises(ValueError):
            select_keyword(g, RankScores(np.array([]), 1, True))
