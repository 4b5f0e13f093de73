"""Closest-category inference over a flattened taxonomy and the category bias.

Category bias values below the floor are zeroed outright (default 0.4), so a
vertex unrelated to the inferred category keeps only its self bias and
whatever mass its neighbors pass along.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import SentenceVectors, WordVectors, cosine, embed_phrase
from .textprep import CandidateTerm

DEFAULT_CATEGORY_FLOOR = 0.4


@dataclass
class CategorySet:
    phrases: list[str]
    vectors: list[np.ndarray]

    def __len__(self) -> int:
        return len(self.phrases)


def load_categories(
    path: str | Path,
    word_store: WordVectors | None = None,
    sentence_store: SentenceVectors | None = None,
) -> CategorySet:
    """One phrase per line (``#`` comments allowed); each phrase embeds via
    the sentence sidecar when present, else mean-of-words.
    """
    path = Path(path)
    phrases: list[str] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key = " ".join(line.lower().split())
            if key in seen:
                continue
            seen.add(key)
            phrases.append(key)
    if not phrases:
        raise ValueError(f"{path}: no category phrases")
    vectors: list[np.ndarray] = []
    for phrase in phrases:
        vec = sentence_store.get(phrase) if sentence_store is not None else None
        if vec is None and word_store is not None:
            vec = embed_phrase(word_store, phrase)
        if vec is None:
            raise ValueError(f"category {phrase!r} has no embedding")
        vectors.append(vec)
    return CategorySet(phrases=phrases, vectors=vectors)


def infer_category(ad_vector: np.ndarray, cats: CategorySet) -> tuple[str, float]:
    """argmax cosine over the category set; ties by lexicographic phrase."""
    if len(cats) == 0:
        raise ValueError("empty category set")
    best = min(
        range(len(cats)),
        key=lambda i: (-cosine(cats.vectors[i], ad_vector), cats.phrases[i]),
    )
    return cats.phrases[best], cosine(cats.vectors[best], ad_vector)


def category_bias(
    category_vector: np.ndarray,
    vertices: list[CandidateTerm],
    store: WordVectors,
    floor: float = DEFAULT_CATEGORY_FLOOR,
) -> np.ndarray:
    """Per-vertex similarity to the inferred category, floored to exact zero
    below ``floor``; OOV vertices get zero.
    """
    bias = np.zeros(len(vertices), dtype=np.float64)
    for i, cand in enumerate(vertices):
        vec = embed_phrase(store, cand.term)
        if vec is None:
            continue
        value = max(0.0, cosine(category_vector, vec))
        bias[i] = value if value >= floor else 0.0
    return bias
