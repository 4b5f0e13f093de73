"""Offline metrics over golden-query datasets.

Three per-sample metrics, each precision@1 since the engine emits exactly
one keyword: hard accuracy (exact membership in the golden set), soft
accuracy (best metric-space cosine against the golden set meets a
threshold, default 0.8), and the best cosine itself. The metric store is
deliberately separate from the ranking stores so the ranker cannot game
the measurement.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .embeddings import WordVectors, cosine, embed_phrase


@dataclass
class EvalSample:
    id: str
    ad_text: str
    golden_queries: list[str]

    def __post_init__(self) -> None:
        self.golden_queries = [" ".join(q.lower().split()) for q in self.golden_queries]
        if not self.golden_queries:
            raise ValueError(f"sample {self.id}: empty golden set")


@dataclass
class MetricConfig:
    soft_threshold: float = 0.8
    metric_store: WordVectors | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.soft_threshold <= 1.0:
            raise ValueError("soft_threshold must be in (0, 1]")


@dataclass
class SampleResult:
    id: str
    prediction: str
    hard: int
    soft: int
    similarity: float
    failed: bool = False
    prediction_oov: bool = False


@dataclass
class MetricReport:
    n: int
    hard_accuracy: float
    soft_accuracy: float
    avg_similarity: float
    per_sample: list[SampleResult] = field(default_factory=list)
    failures: int = 0
    oov_predictions: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "hard_accuracy": self.hard_accuracy,
            "soft_accuracy": self.soft_accuracy,
            "avg_w2v_similarity": self.avg_similarity,
            "failures": self.failures,
            "oov_predictions": self.oov_predictions,
            "per_sample": [
                {
                    "id": r.id,
                    "prediction": r.prediction,
                    "hard": r.hard,
                    "soft": r.soft,
                    "similarity": r.similarity,
                    "failed": r.failed,
                }
                for r in self.per_sample
            ],
        }


def load_eval_dataset(path: str | Path) -> list[EvalSample]:
    """JSON Lines: {"id": ..., "ad_text": ..., "golden_queries": [...]}."""
    path = Path(path)
    samples: list[EvalSample] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                samples.append(
                    EvalSample(
                        id=str(obj["id"]),
                        ad_text=str(obj["ad_text"]),
                        golden_queries=[str(q) for q in obj["golden_queries"]],
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad eval sample") from exc
    if not samples:
        raise ValueError(f"{path}: empty dataset")
    return samples


def hard_accuracy(prediction: str, golden: list[str]) -> int:
    return 1 if prediction in golden else 0


def _best_similarity(prediction: str, golden: list[str], store: WordVectors | None) -> tuple[float, bool]:
    """Max metric cosine over the golden set, plus an OOV flag.

    Exact matches score 1.0 regardless of store coverage. An OOV
    prediction (or absent store) falls back to 1.0/0.0 on exact match.
    Multi-word golden queries embed by word-mean; golden entries that are
    fully OOV are skipped.
    """
    exact = prediction in golden
    if exact:
        return 1.0, False
    if store is None:
        return 0.0, True
    pred_vec = embed_phrase(store, prediction)
    if pred_vec is None:
        return 0.0, True
    best = None
    for query in golden:
        q_vec = embed_phrase(store, query)
        if q_vec is None:
            continue
        sim = cosine(pred_vec, q_vec)
        best = sim if best is None else max(best, sim)
    if best is None:
        return 0.0, True
    return best, False


def w2v_similarity(prediction: str, golden: list[str], config: MetricConfig) -> float:
    sim, _ = _best_similarity(prediction, golden, config.metric_store)
    return sim


def soft_accuracy(prediction: str, golden: list[str], config: MetricConfig) -> int:
    """1 iff exact match or best metric cosine >= threshold. When the
    prediction is OOV in the metric store, soft degrades to hard.
    """
    if hard_accuracy(prediction, golden):
        return 1
    sim, oov = _best_similarity(prediction, golden, config.metric_store)
    if oov:
        return 0
    return 1 if sim >= config.soft_threshold else 0


def score_sample(sample: EvalSample, prediction: str, config: MetricConfig) -> SampleResult:
    prediction = " ".join(prediction.lower().split())
    hard = hard_accuracy(prediction, sample.golden_queries)
    sim, oov = _best_similarity(prediction, sample.golden_queries, config.metric_store)
    soft = 1 if hard or (not oov and sim >= config.soft_threshold) else 0
    return SampleResult(
        id=sample.id,
        prediction=prediction,
        hard=hard,
        soft=soft,
        similarity=sim,
        prediction_oov=oov,
    )


def evaluate(
    dataset: list[EvalSample],
    extractor: Callable[[str], str],
    config: MetricConfig,
    workers: int = 1,
) -> MetricReport:
    """Run the extractor over every sample and aggregate by arithmetic mean.

    Extractor failures count as total misses (all three metrics zero) and
    never abort the run. Results merge in dataset order, so reports are
    identical for any worker count.
    """
    if not dataset:
        raise ValueError("empty dataset")

    def run_one(sample: EvalSample) -> SampleResult:
        try:
            prediction = extractor(sample.ad_text)
        except Exception:
            return SampleResult(
                id=sample.id, prediction="", hard=0, soft=0, similarity=0.0, failed=True
            )
        return score_sample(sample, prediction, config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, dataset))
    else:
        results = [run_one(s) for s in dataset]

    n = len(results)
    return MetricReport(
        n=n,
        hard_accuracy=sum(r.hard for r in results) / n,
        soft_accuracy=sum(r.soft for r in results) / n,
        avg_similarity=sum(r.similarity for r in results) / n,
        per_sample=results,
        failures=sum(1 for r in results if r.failed),
        oov_predictions=sum(1 for r in results if r.prediction_oov),
    )
