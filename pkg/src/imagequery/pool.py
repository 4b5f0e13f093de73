"""Pool of existing ads: exact-scan retrieval and graph augmentation.

Augmentation walks the retrieved neighbors most-relevant first. Tags are
taken in detector-confidence order and must be close to some word of their
own ad's text; neighbor words are taken in occurrence order and must be
close enough to the input ad. Terms already present in the graph are
skipped without spending the budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import (
    SentenceVectors,
    WordVectors,
    cosine,
    embed_phrase,
    embed_text,
    normalize_text_key,
)
from .graph import TokenGraph, _pairwise_edges
from .textprep import (
    NOUN,
    ORIGIN_NEIGHBOR_TAG,
    ORIGIN_NEIGHBOR_TEXT,
    CandidateTerm,
    LexiconTagger,
    candidate_filter,
    tag_pos,
    tokenize,
)


@dataclass
class AugmentationConfig:
    m: int = 1                  # neighbors to retrieve
    max_tags: int = 1
    min_tag_sim: float = 0.7    # <= -1 accepts every tag (non-filtered variant)
    max_words: int = 1
    min_word_sim: float = 0.0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.max_tags < 0 or self.max_words < 0:
            raise ValueError("tag/word budgets must be >= 0")
        for name, value in (("min_tag_sim", self.min_tag_sim), ("min_word_sim", self.min_word_sim)):
            if not -1.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [-1, 1], got {value}")


class PooledAd:
    """One pool ad. The token stream and POS-filtered candidates are
    computed lazily on first access (only retrieved neighbors ever need
    them); the computation is idempotent, so concurrent readers are safe.
    """

    __slots__ = ("id", "text", "image_tags", "text_vector", "_tagger", "_words", "_candidates")

    def __init__(
        self,
        id: str,
        text: str,
        image_tags: list[tuple[str, float]],  # sorted by descending confidence
        text_vector: np.ndarray,
        tagger: LexiconTagger | None = None,
        words: list[str] | None = None,
        candidate_terms: list[tuple[str, str]] | None = None,
    ):
        self.id = id
        self.text = text
        self.image_tags = image_tags
        self.text_vector = text_vector
        self._tagger = tagger
        self._words = words
        self._candidates = candidate_terms

    def _tokenize(self) -> None:
        tagged = tag_pos(tokenize(self.text), self._tagger)
        self._candidates = [(c.term, c.pos) for c in candidate_filter(tagged)]
        self._words = [t.normalized for t in tagged]

    @property
    def words(self) -> list[str]:
        """Normalized token stream of the ad text."""
        if self._words is None:
            self._tokenize()
        return self._words

    @property
    def candidate_terms(self) -> list[tuple[str, str]]:
        """POS-filtered (term, pos) pairs in occurrence order."""
        if self._candidates is None:
            self._tokenize()
        return self._candidates


@dataclass
class AdPoolIndex:
    ads: list[PooledAd]
    dim: int
    matrix: np.ndarray  # stacked text vectors, shape (len(ads), dim)
    skipped: int = 0


def _parse_pool_line(obj: dict, lineno: int, path: Path) -> tuple[str, str, list[tuple[str, float]], list | None]:
    try:
        ad_id = str(obj["id"])
        text = str(obj["text"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}:{lineno}: pool ad needs 'id' and 'text'") from exc
    tags: list[tuple[str, float]] = []
    for entry in obj.get("image_tags", []):
        try:
            tag = str(entry["tag"])
            conf = float(entry["confidence"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: bad image_tags entry") from exc
        if not 0.0 <= conf <= 1.0:
            raise ValueError(f"{path}:{lineno}: confidence {conf} outside [0, 1]")
        tags.append((tag, conf))
    tags.sort(key=lambda tc: -tc[1])  # stable: file order kept on ties
    return ad_id, text, tags, obj.get("vector")


def build_index(
    pool_path: str | Path,
    word_store: WordVectors | None,
    sentence_store: SentenceVectors | None,
    tagger: LexiconTagger,
) -> AdPoolIndex:
    """Parse the pool JSONL and embed every ad text. Ads that cannot be
    embedded are skipped and counted; malformed lines abort with the line number.
    """
    path = Path(pool_path)
    ads: list[PooledAd] = []
    skipped = 0
    dim = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: bad JSON") from exc
            ad_id, text, tags, inline_vec = _parse_pool_line(obj, lineno, path)
            if inline_vec is not None:
                vec = np.asarray(inline_vec, dtype=np.float64)
                if vec.ndim != 1 or vec.size == 0:
                    raise ValueError(f"{path}:{lineno}: bad inline vector")
            else:
                try:
                    vec = embed_text(text, word_store, sentence_store)
                except ValueError:
                    skipped += 1
                    continue
            if dim == 0:
                dim = vec.size
            elif vec.size != dim:
                raise ValueError(f"{path}:{lineno}: vector dim {vec.size} != {dim}")
            ads.append(PooledAd(id=ad_id, text=text, image_tags=tags,
                                text_vector=vec, tagger=tagger))
    if not ads:
        raise ValueError(f"{path}: no usable ads in pool")
    matrix = np.stack([ad.text_vector for ad in ads])
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{path}: non-finite vector values in pool")
    return AdPoolIndex(ads=ads, dim=dim, matrix=matrix, skipped=skipped)


def save_index(index: AdPoolIndex, out_path: str | Path) -> None:
    """Serialize back to pool JSONL with vectors materialized; rebuilding
    from this output reproduces it byte for byte.
    """
    with Path(out_path).open("w", encoding="utf-8") as fh:
        for ad in index.ads:
            obj = {
                "id": ad.id,
                "text": ad.text,
                "image_tags": [{"tag": t, "confidence": c} for t, c in ad.image_tags],
                "vector": [float(x) for x in ad.text_vector],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def retrieve_similar(index: AdPoolIndex, ad_vector: np.ndarray, m: int) -> list[PooledAd]:
    """Top-m pool ads by cosine to the input ad; exact linear scan,
    ties broken by ad id.
    """
    if not index.ads:
        raise ValueError("empty pool index")
    ad_vector = np.asarray(ad_vector, dtype=np.float64)
    if ad_vector.shape != (index.dim,):
        raise ValueError(f"query dim {ad_vector.shape} != pool dim {index.dim}")
    norms = np.linalg.norm(index.matrix, axis=1) * float(np.linalg.norm(ad_vector))
    sims = (index.matrix @ ad_vector) / np.where(norms > 0.0, norms, 1.0)
    order = sorted(range(len(index.ads)), key=lambda i: (-sims[i], index.ads[i].id))
    return [index.ads[i] for i in order[:m]]


def relevance(ad: PooledAd, ad_vector: np.ndarray) -> float:
    return cosine(ad.text_vector, ad_vector)


def select_tags(
    similar: list[PooledAd],
    word_store: WordVectors,
    min_tag_sim: float = 0.7,
    max_tags: int = 1,
    existing_terms: frozenset[str] | set[str] = frozenset(),
) -> list[str]:
    """Pick up to ``max_tags`` image tags from the neighbors, most relevant
    ad first, highest-confidence tag first. A tag qualifies when its best
    cosine against a word of its own ad's text meets ``min_tag_sim``
    (``min_tag_sim <= -1`` accepts everything). Tags already present in the
    graph, or already chosen, are skipped without consuming budget.
    """
    chosen: list[str] = []
    if max_tags == 0:
        return chosen
    for ad in similar:
        for tag, _conf in ad.image_tags:
            key = normalize_text_key(tag).lower()
            if not key or key in existing_terms or key in chosen:
                continue
            if min_tag_sim > -1.0:
                tag_vec = embed_phrase(word_store, key)
                if tag_vec is None:
                    continue
                best = -np.inf
                for word in ad.words:
                    wv = word_store.get(word)
                    if wv is None:
                        continue
                    best = max(best, cosine(tag_vec, wv))
                if best < min_tag_sim:
                    continue
            chosen.append(key)
            if len(chosen) == max_tags:
                return chosen
    return chosen


def select_words(
    similar: list[PooledAd],
    input_ad_vector: np.ndarray,
    word_store: WordVectors,
    min_word_sim: float = 0.0,
    max_words: int = 1,
    existing_terms: frozenset[str] | set[str] = frozenset(),
) -> list[str]:
    """Pick up to ``max_words`` POS-filtered neighbor-text words, most
    relevant ad first, occurrence order within an ad. A word qualifies when
    its cosine to the input ad vector meets ``min_word_sim``. Words already
    in the graph, or already chosen, are skipped without consuming budget.
    """
    chosen: list[str] = []
    if max_words == 0:
        return chosen
    for ad in similar:
        for term, _pos in ad.candidate_terms:
            if term in existing_terms or term in chosen:
                continue
            vec = word_store.get(term)
            if vec is None:
                continue
            if cosine(input_ad_vector, vec) >= min_word_sim:
                chosen.append(term)
                if len(chosen) == max_words:
                    return chosen
    return chosen


def augment_graph(
    graph: TokenGraph,
    tags: list[str],
    words: list[str],
    word_store: WordVectors,
    edge_threshold: float = 0.9,
    pos_lookup=None,
) -> TokenGraph:
    """Append tag and word vertices to the graph and wire old-new and
    new-new edges with the same cosine-threshold rule. Existing vertices
    and edges are untouched; duplicates (against the graph or between the
    two lists) are dropped.
    """
    present = {v.term for v in graph.vertices}
    next_pos = max((v.position for v in graph.vertices), default=-1) + 1
    new_vertices: list[CandidateTerm] = []
    for term, origin in [(t, ORIGIN_NEIGHBOR_TAG) for t in tags] + [
        (w, ORIGIN_NEIGHBOR_TEXT) for w in words
    ]:
        if term in present:
            continue
        present.add(term)
        pos = pos_lookup(term) if pos_lookup is not None else NOUN
        new_vertices.append(CandidateTerm(term=term, pos=pos, position=next_pos, origin=origin))
        next_pos += 1

    vertices = list(graph.vertices) + new_vertices
    vectors = [embed_phrase(word_store, v.term) for v in vertices]
    full = _pairwise_edges(vectors, edge_threshold)
    n_old = len(graph.vertices)
    full[:n_old, :n_old] = graph.weights  # pre-existing edges stay exactly as built
    return TokenGraph(vertices=vertices, weights=full, augmented=True)
