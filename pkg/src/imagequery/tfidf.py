"""TF-IDF comparator: the simplest keyword baseline the engine ships.

Scores each POS-filtered candidate by tf * log(N / df) against a
precomputed document-frequency table; ties go to the earliest position.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .textprep import CandidateTerm, LexiconTagger, candidate_filter, tag_pos, tokenize


@dataclass
class DocumentFrequencies:
    total_docs: int
    df: dict[str, int]

    @classmethod
    def load(cls, path: str | Path) -> "DocumentFrequencies":
        with Path(path).open(encoding="utf-8") as fh:
            obj = json.load(fh)
        try:
            total = int(obj["total_docs"])
            df = {str(k).lower(): int(v) for k, v in obj["df"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: expected {{'total_docs': N, 'df': {{...}}}}") from exc
        if total < 1:
            raise ValueError(f"{path}: total_docs must be >= 1")
        return cls(total_docs=total, df=df)

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(
                {"total_docs": self.total_docs, "df": dict(sorted(self.df.items()))},
                fh,
                ensure_ascii=False,
                sort_keys=True,
            )
            fh.write("\n")


def tfidf_scores(text: str, stats: DocumentFrequencies, tagger: LexiconTagger) -> list[tuple[CandidateTerm, float]]:
    tagged = tag_pos(tokenize(text), tagger)
    counts: dict[str, int] = {}
    for tok in tagged:
        counts[tok.normalized] = counts.get(tok.normalized, 0) + 1
    scored = []
    for cand in candidate_filter(tagged):
        df = max(1, stats.df.get(cand.term, 1))  # unseen terms treated as rare
        idf = math.log(stats.total_docs / df)
        scored.append((cand, counts[cand.term] * idf))
    return scored


def tfidf_keyword(text: str, stats: DocumentFrequencies, tagger: LexiconTagger) -> CandidateTerm:
    scored = tfidf_scores(text, stats, tagger)
    if not scored:
        raise ValueError("no extractable keyword")
    best = min(scored, key=lambda cs: (-cs[1], cs[0].position))
    return best[0]
