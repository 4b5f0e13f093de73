"""End-to-end extraction: ad text in, one image-search keyword out.

The mode ladder mirrors the ablation variants the engine supports:

  UNBIASED          uniform restart mass over the input-text graph
  SELF_BIASED       restart mass from similarity to the whole ad text
  SELF_CAT_BIASED   self bias multiplied by closest-category bias
  VISUAL_TEXT_RANK  self*category bias over the neighbor-augmented graph
  TFIDF_BASELINE    tf-idf comparator, no graph at all
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .categories import (
    DEFAULT_CATEGORY_FLOOR,
    CategorySet,
    category_bias,
    infer_category,
    load_categories,
)
from .embeddings import (
    SentenceVectors,
    WordVectors,
    embed_tokens,
    load_sentence_vectors,
    load_word_vectors,
)
from .graph import (
    RankConfig,
    RankScores,
    TokenGraph,
    build_token_graph,
    rank,
    select_keyword,
    self_bias,
    top_k,
)
from .pool import (
    AdPoolIndex,
    AugmentationConfig,
    augment_graph,
    build_index,
    relevance,
    retrieve_similar,
    select_tags,
    select_words,
)
from .textprep import LexiconTagger, extract_candidates, tokenize
from .tfidf import DocumentFrequencies, tfidf_scores

MODE_UNBIASED = "UNBIASED"
MODE_SELF_BIASED = "SELF_BIASED"
MODE_SELF_CAT_BIASED = "SELF_CAT_BIASED"
MODE_VISUAL_TEXT_RANK = "VISUAL_TEXT_RANK"
MODE_TFIDF_BASELINE = "TFIDF_BASELINE"

MODES = (
    MODE_UNBIASED,
    MODE_SELF_BIASED,
    MODE_SELF_CAT_BIASED,
    MODE_VISUAL_TEXT_RANK,
    MODE_TFIDF_BASELINE,
)


class NoKeywordError(ValueError):
    """Raised when the input yields no extractable keyword."""


class ConfigError(ValueError):
    """Raised for invalid or incomplete engine configuration."""


@dataclass
class EngineConfig:
    mode: str = MODE_SELF_BIASED
    word_vectors: str | None = None
    sentence_vectors: str | None = None
    pool: str | None = None
    categories: str | None = None
    category_vectors: str | None = None  # sidecar phrase embeddings
    df_stats: str | None = None
    lexicon: str | None = None
    rank: RankConfig = field(default_factory=RankConfig)
    augment: AugmentationConfig = field(default_factory=AugmentationConfig)
    category_floor: float = DEFAULT_CATEGORY_FLOOR
    soft_threshold: float = 0.8
    metric_vectors: str | None = None

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; pick one of {', '.join(MODES)}")
        if self.mode != MODE_TFIDF_BASELINE and not self.word_vectors:
            raise ConfigError(f"mode {self.mode} requires --word-vectors")
        if self.mode in (MODE_SELF_CAT_BIASED, MODE_VISUAL_TEXT_RANK) and not self.categories:
            raise ConfigError(f"mode {self.mode} requires --categories")
        if self.mode == MODE_VISUAL_TEXT_RANK and not self.pool:
            raise ConfigError(f"mode {self.mode} requires --pool")
        if self.mode == MODE_TFIDF_BASELINE and not self.df_stats:
            raise ConfigError(f"mode {self.mode} requires --df-stats")
        if not 0.0 <= self.category_floor <= 1.0:
            raise ConfigError("category floor must be in [0, 1]")


@dataclass
class ExtractionResult:
    keyword: str
    mode: str
    graph: TokenGraph | None = None
    scores: RankScores | None = None
    self_bias: np.ndarray | None = None
    category_bias: np.ndarray | None = None
    bias: np.ndarray | None = None
    category: tuple[str, float] | None = None
    neighbors: list[tuple[str, float]] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    words: list[str] = field(default_factory=list)
    ranking: list[tuple[str, float]] = field(default_factory=list)

    def top(self, k: int) -> list[tuple[str, float]]:
        return self.ranking[:k]


class Engine:
    """Loads all stores once; extraction itself is pure and thread-safe."""

    def __init__(self, config: EngineConfig):
        config.validate()
        self.config = config
        self.tagger = (
            LexiconTagger.from_file(config.lexicon) if config.lexicon else LexiconTagger.bundled()
        )
        self.word_store: WordVectors | None = (
            load_word_vectors(config.word_vectors) if config.word_vectors else None
        )
        self.sentence_store: SentenceVectors | None = (
            load_sentence_vectors(config.sentence_vectors) if config.sentence_vectors else None
        )
        self.categories: CategorySet | None = None
        self._category_bias_vectors: dict[str, np.ndarray] = {}
        if config.categories:
            phrase_store = (
                load_sentence_vectors(config.category_vectors)
                if config.category_vectors
                else self.sentence_store
            )
            self.categories = load_categories(
                config.categories, self.word_store, phrase_store
            )
            self._prepare_category_bias_vectors()
        self.pool_index: AdPoolIndex | None = None
        if config.pool:
            self.pool_index = build_index(
                config.pool, self.word_store, self.sentence_store, self.tagger
            )
        self.df_stats: DocumentFrequencies | None = (
            DocumentFrequencies.load(config.df_stats) if config.df_stats else None
        )

    def _prepare_category_bias_vectors(self) -> None:
        """Category vectors for the bias term must live in the word space;
        reuse the inference vector when dimensions agree, else word-mean.
        """
        assert self.categories is not None and self.word_store is not None
        from .embeddings import embed_phrase

        for phrase, vec in zip(self.categories.phrases, self.categories.vectors):
            if vec.size == self.word_store.dim:
                self._category_bias_vectors[phrase] = vec
            else:
                fallback = embed_phrase(self.word_store, phrase)
                if fallback is None:
                    raise ConfigError(
                        f"category {phrase!r} has no vector in the word space"
                    )
                self._category_bias_vectors[phrase] = fallback

    def _ad_vectors(self, text: str) -> tuple[np.ndarray, np.ndarray]:
        """(general, word-space) vectors for the ad text. The general vector
        prefers a precomputed sentence vector; the word-space one is used
        wherever it meets token vectors (biases, word selection).
        """
        assert self.word_store is not None
        tokens = [t.normalized for t in tokenize(text)]
        general = None
        if self.sentence_store is not None:
            general = self.sentence_store.get(text)
        word_space = None
        if general is not None and general.size == self.word_store.dim:
            word_space = general
        if word_space is None:
            word_space = embed_tokens(self.word_store, tokens)
        if general is None:
            general = word_space
        return general, word_space

    def _match_dim(self, dim: int, general: np.ndarray, word_space: np.ndarray, what: str) -> np.ndarray:
        if general.size == dim:
            return general
        if word_space.size == dim:
            return word_space
        raise ConfigError(f"ad vector dimension matches neither store for {what}")

    def extract(self, ad_text: str) -> ExtractionResult:
        if not ad_text.strip():
            raise NoKeywordError("no extractable keyword: empty ad text")
        if self.config.mode == MODE_TFIDF_BASELINE:
            return self._extract_tfidf(ad_text)

        assert self.word_store is not None
        candidates = extract_candidates(ad_text, self.tagger)
        if not candidates:
            raise NoKeywordError("no extractable keyword: no valid candidates")
        graph = build_token_graph(candidates, self.word_store, self.config.rank.edge_threshold)
        general_vec, word_vec = self._ad_vectors(ad_text)

        result = ExtractionResult(keyword="", mode=self.config.mode)
        mode = self.config.mode

        if mode == MODE_VISUAL_TEXT_RANK:
            graph, result = self._augment(graph, general_vec, word_vec, result)

        if mode == MODE_UNBIASED:
            bias = np.ones(len(graph), dtype=np.float64)
        else:
            sbias = self_bias(graph.vertices, word_vec, self.word_store)
            result.self_bias = sbias
            bias = sbias
            if mode in (MODE_SELF_CAT_BIASED, MODE_VISUAL_TEXT_RANK):
                assert self.categories is not None
                cat_query = self._match_dim(
                    self.categories.vectors[0].size, general_vec, word_vec, "category inference"
                )
                phrase, score = infer_category(cat_query, self.categories)
                result.category = (phrase, score)
                cbias = category_bias(
                    self._category_bias_vectors[phrase],
                    graph.vertices,
                    self.word_store,
                    self.config.category_floor,
                )
                result.category_bias = cbias
                bias = sbias * cbias

        scores = rank(graph, self.config.rank, bias)
        keyword = select_keyword(graph, scores)
        result.keyword = keyword.term
        result.graph = graph
        result.scores = scores
        result.bias = bias
        result.ranking = [(c.term, s) for c, s in top_k(graph, scores, len(graph))]
        return result

    def _augment(
        self,
        graph: TokenGraph,
        general_vec: np.ndarray,
        word_vec: np.ndarray,
        result: ExtractionResult,
    ) -> tuple[TokenGraph, ExtractionResult]:
        assert self.pool_index is not None and self.word_store is not None
        retrieval_vec = self._match_dim(self.pool_index.dim, general_vec, word_vec, "pool retrieval")
        neighbors = retrieve_similar(self.pool_index, retrieval_vec, self.config.augment.m)
        result.neighbors = [(ad.id, relevance(ad, retrieval_vec)) for ad in neighbors]
        existing = frozenset(v.term for v in graph.vertices)
        tags = select_tags(
            neighbors,
            self.word_store,
            self.config.augment.min_tag_sim,
            self.config.augment.max_tags,
            existing,
        )
        words = select_words(
            neighbors,
            word_vec,
            self.word_store,
            self.config.augment.min_word_sim,
            self.config.augment.max_words,
            existing,
        )
        result.tags = tags
        result.words = words
        graph = augment_graph(
            graph,
            tags,
            words,
            self.word_store,
            self.config.rank.edge_threshold,
            pos_lookup=lambda term: self.tagger.tag_word(term, term),
        )
        return graph, result

    def _extract_tfidf(self, ad_text: str) -> ExtractionResult:
        assert self.df_stats is not None
        scored = tfidf_scores(ad_text, self.df_stats, self.tagger)
        if not scored:
            raise NoKeywordError("no extractable keyword: no valid candidates")
        ordered = sorted(scored, key=lambda cs: (-cs[1], cs[0].position))
        return ExtractionResult(
            keyword=ordered[0][0].term,
            mode=MODE_TFIDF_BASELINE,
            ranking=[(c.term, s) for c, s in ordered],
        )


def graph_report(result: ExtractionResult) -> dict:
    """JSON-ready dump of the ranked graph for the inspect command."""
    if result.graph is None or result.scores is None:
        return {"mode": result.mode, "keyword": result.keyword, "vertices": [], "edges": []}
    vertices = []
    for i, v in enumerate(result.graph.vertices):
        vertices.append(
            {
                "term": v.term,
                "pos": v.pos,
                "origin": v.origin,
                "position": v.position,
                "self_bias": None if result.self_bias is None else float(result.self_bias[i]),
                "category_bias": None
                if result.category_bias is None
                else float(result.category_bias[i]),
                "bias": None if result.bias is None else float(result.bias[i]),
                "score": float(result.scores.values[i]),
            }
        )
    edges = []
    n = len(result.graph)
    for i in range(n):
        for j in range(i + 1, n):
            w = float(result.graph.weights[i, j])
            if w > 0.0:
                edges.append({"i": i, "j": j, "weight": w})
    return {
        "mode": result.mode,
        "keyword": result.keyword,
        "augmented": result.graph.augmented,
        "category": None
        if result.category is None
        else {"phrase": result.category[0], "score": result.category[1]},
        "neighbors": [{"id": nid, "relevance": rel} for nid, rel in result.neighbors],
        "tags": result.tags,
        "words": result.words,
        "iterations_run": result.scores.iterations_run,
        "converged": result.scores.converged,
        "vertices": vertices,
        "edges": edges,
    }
