"""Ad text to stock-image search keyword, via biased graph ranking."""

from .embeddings import (
    SentenceVectors,
    WordVectors,
    cosine,
    embed_text,
    embed_tokens,
    load_sentence_vectors,
    load_word_vectors,
    save_word_vectors,
)
from .engine import (
    MODE_SELF_BIASED,
    MODE_SELF_CAT_BIASED,
    MODE_TFIDF_BASELINE,
    MODE_UNBIASED,
    MODE_VISUAL_TEXT_RANK,
    MODES,
    ConfigError,
    Engine,
    EngineConfig,
    ExtractionResult,
    NoKeywordError,
)
from .graph import RankConfig, RankScores, TokenGraph, build_token_graph, rank, select_keyword, self_bias
from .categories import CategorySet, category_bias, infer_category, load_categories
from .pool import AdPoolIndex, AugmentationConfig, PooledAd, augment_graph, build_index, retrieve_similar, select_tags, select_words
from .evaluation import EvalSample, MetricConfig, MetricReport, evaluate, hard_accuracy, load_eval_dataset, soft_accuracy, w2v_similarity
from .textprep import CandidateTerm, LexiconTagger, TaggedToken, candidate_filter, extract_candidates, tag_pos, tokenize

__version__ = "0.1.0"
