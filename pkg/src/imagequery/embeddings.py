"""Dense vector stores and cosine similarity.

Two kinds of stores back the engine: word vectors keyed by lowercase
token, and sentence vectors keyed by whitespace-normalized text. Both are
immutable after load and safe to share across concurrent extractions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def normalize_token(token: str) -> str:
    return token.lower()


def normalize_text_key(text: str) -> str:
    """Collapse runs of whitespace to single spaces and trim."""
    return " ".join(text.split())


def _check_vector(values: np.ndarray, where: str) -> np.ndarray:
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError(f"{where}: vector must be a nonempty 1-D array")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{where}: vector has non-finite entries")
    if not np.any(vec):
        raise ValueError(f"{where}: zero vector rejected")
    return vec


@dataclass
class WordVectors:
    """Token -> vector map with case-normalized lookup."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    name: str = ""

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(normalize_token(token))

    def __contains__(self, token: str) -> bool:
        return normalize_token(token) in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class SentenceVectors:
    """Exact-text -> vector map; keys are whitespace-normalized."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def get(self, text: str) -> np.ndarray | None:
        return self.vectors.get(normalize_text_key(text))

    def __len__(self) -> int:
        return len(self.vectors)


def load_word_vectors(path: str | Path, name: str = "") -> WordVectors:
    """Parse the plain-text vector format: optional ``COUNT DIM`` header,
    then one ``token f1 f2 ... fD`` row per line. Later duplicate tokens win.
    """
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    dim = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                    continue  # header line, values are advisory only
                except ValueError:
                    pass
            token, fields = parts[0], parts[1:]
            if not fields:
                raise ValueError(f"{path}:{lineno}: row has no vector values")
            try:
                vec = np.array([float(x) for x in fields], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad float in row") from exc
            if dim == 0:
                dim = vec.size
            elif vec.size != dim:
                raise ValueError(
                    f"{path}:{lineno}: dimension {vec.size} != expected {dim}"
                )
            vec = _check_vector(vec, f"{path}:{lineno}")
            vec.flags.writeable = False
            entries[normalize_token(token)] = vec
    if not entries:
        raise ValueError(f"{path}: no vector rows found")
    return WordVectors(dim=dim, vectors=entries, name=name or path.name)


def save_word_vectors(store: WordVectors, path: str | Path) -> None:
    """Write the text format with a COUNT DIM header; round-trips exactly."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"{len(store.vectors)} {store.dim}\n")
        for token in sorted(store.vectors):
            row = " ".join(repr(float(v)) for v in store.vectors[token])
            fh.write(f"{token} {row}\n")


def load_sentence_vectors(path: str | Path) -> SentenceVectors:
    """Parse JSON Lines of ``{"key": ..., "vector": [...]}`` objects."""
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    dim = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                key = obj["key"]
                values = obj["vector"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad JSONL row") from exc
            vec = _check_vector(np.asarray(values, dtype=np.float64), f"{path}:{lineno}")
            if dim == 0:
                dim = vec.size
            elif vec.size != dim:
                raise ValueError(
                    f"{path}:{lineno}: dimension {vec.size} != expected {dim}"
                )
            vec.flags.writeable = False
            entries[normalize_text_key(key)] = vec
    if not entries:
        raise ValueError(f"{path}: no vector rows found")
    return SentenceVectors(dim=dim, vectors=entries)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of two nonzero vectors of equal dimension."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


def embed_tokens(store: WordVectors, tokens: list[str]) -> np.ndarray:
    """Mean of the in-vocabulary token vectors; OOV tokens are skipped."""
    if not tokens:
        raise ValueError("no tokens to embed")
    found = [store.get(tok) for tok in tokens]
    found = [v for v in found if v is not None]
    if not found:
        raise ValueError("no embeddable tokens")
    return np.mean(found, axis=0)


def embed_text(
    text: str,
    word_store: WordVectors | None,
    sentence_store: SentenceVectors | None = None,
    tokens: list[str] | None = None,
) -> np.ndarray:
    """Vector for a whole text: precomputed sentence vector when one exists
    for the (normalized) text key, otherwise the word-mean fallback.
    """
    if sentence_store is not None:
        vec = sentence_store.get(text)
        if vec is not None:
            return vec
    if word_store is None:
        raise ValueError(f"no sentence vector and no word store for: {text!r}")
    if tokens is None:
        tokens = [t for t in text.split() if t]
    return embed_tokens(word_store, [normalize_token(t) for t in tokens])


def embed_phrase(store: WordVectors, phrase: str) -> np.ndarray | None:
    """Word-mean embedding of a (possibly multi-word) phrase; None if fully OOV."""
    tokens = [normalize_token(t) for t in phrase.split() if t]
    found = [store.get(t) for t in tokens]
    found = [v for v in found if v is not None]
    if not found:
        return None
    return np.mean(found, axis=0)


def unit(values) -> np.ndarray:
    """Normalize to unit length (fixture-building helper)."""
    vec = np.asarray(values, dtype=np.float64)
    return vec / math.sqrt(float(np.dot(vec, vec)))
