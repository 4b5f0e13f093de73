"""Synthetic fixture worlds: deterministic vector files, pools, categories,
and eval datasets for tests, demos, and benchmarks.

The demo world hand-places 32-d word vectors so that semantically related
words form tight cosine clusters (furniture/antique/vintage/chair/decor in
one, house/home/homes in another) while ad-level meaning vectors lean
toward the head word a human would bias to. The ablation world generates a
50-sample eval set where the golden query sits in the ad text for 60% of
samples and only in a neighbor image tag for the remaining 40%.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .embeddings import save_word_vectors, unit, WordVectors

DEMO_DIM = 32
METRIC_DIM = 16


def _sparse(dim: int, components: dict[int, float]) -> np.ndarray:
    vec = np.zeros(dim, dtype=np.float64)
    for idx, val in components.items():
        vec[idx] = val
    return vec


def _unit_sparse(dim: int, components: dict[int, float]) -> np.ndarray:
    return unit(_sparse(dim, components))


# ---------------------------------------------------------------- demo world

_DEMO_WORDS: dict[str, dict[int, float]] = {
    # furniture cluster: pairwise cosines >= 0.9 within {antique, vintage,
    # furniture}, decor and chair hang off furniture only
    "antique": {0: 1.0},
    "vintage": {0: 0.95, 1: 0.312},
    "furniture": {0: 0.95, 2: 0.312},
    "chair": {0: 0.874, 2: 0.28704, 3: 0.392},
    "decor": {0: 0.855, 2: 0.7168},
    "table": {0: 0.8645, 2: 0.28392, 19: 0.4146},
    "store": {9: 1.0},
    "online": {9: 0.7, 10: 0.714},
    "asian": {11: 1.0},
    "sale": {14: 1.0},
    "brand": {14: 0.8, 15: 0.6},
    "style": {15: 1.0},
    # house cluster: home is the only word within edge distance of house
    "house": {4: 1.0},
    "home": {4: 0.93, 5: 0.3676},
    "homes": {4: 0.95, 6: 0.312},
    "homeowners": {4: 0.88, 7: 0.475},
    "realtors": {4: 0.85, 6: 0.527},
    "sell": {16: 1.0},
    "need": {16: 0.6, 17: 0.8},
    "job": {18: 1.0},
    "foreclosure": {20: 1.0},
    "stop": {21: 1.0},
    "bank": {20: 0.62, 22: 0.7846},
}

AD_FURNITURE = "Online Store. Asian antique and vintage furniture"
AD_HOUSE = "Do you need to sell your house fast?"
AD_FORECLOSURE = "Bank Foreclosing? Stop Foreclosure Now!"
POOL_TEXT_FURNITURE = "Furniture and Decor Sale. Up to 70% Off Top Brands And Styles!"
POOL_TEXT_HOUSE = "Homeowners Could Sell Their Homes Fast. Local realtors get the job done."

_DEMO_SENTENCES: dict[str, dict[int, float]] = {
    # ad meaning leans to 'antique' (dim 0) but sits near the whole cluster
    AD_FURNITURE: {0: 0.98, 1: 0.1, 2: 0.1, 13: 0.14},
    AD_HOUSE: {4: 0.52, 16: 0.82, 17: 0.24},
    AD_FORECLOSURE: {20: 0.9, 21: 0.33, 22: 0.28},
    POOL_TEXT_FURNITURE: {0: 0.92, 1: 0.2, 2: 0.2},
    POOL_TEXT_HOUSE: {4: 0.9, 5: 0.3, 6: 0.3},
}

_DEMO_CATEGORIES: dict[str, dict[int, float]] = {
    # the furniture category points between the furniture word and the
    # cluster so category bias separates furniture from antique
    "furniture": {0: 0.75, 2: 0.55},
    "real estate": {4: 0.85, 5: 0.15, 6: 0.35},
    "travel": {24: 1.0},
    "finance": {20: 0.6, 23: 0.8},
    "legal services": {25: 1.0},
    "fashion": {26: 1.0},
}

_DEMO_METRIC: dict[str, dict[int, float]] = {
    "furniture": {0: 1.0},
    "wooden": {0: 0.8, 1: 0.6},
    "antique": {0: 0.7, 2: 0.714},
    "vintage": {0: 0.68, 3: 0.7332},
    "house": {3: 0.0, 4: 1.0},
    "home": {4: 0.85, 5: 0.5268},
    "sell": {6: 1.0},
    "selling": {6: 0.6, 7: 0.8},
    "stress": {8: 1.0},
    "eviction": {8: 0.85, 9: 0.5268},
    "bills": {8: 0.8, 10: 0.6},
    "foreclosure": {8: 0.75, 11: 0.6614},
    "sale": {12: 1.0},
    "decor": {0: 0.72, 13: 0.694},
}

_DEMO_DF = {
    "furniture": 40, "antique": 8, "vintage": 12, "store": 150, "asian": 30,
    "house": 60, "sell": 90, "need": 400, "home": 80, "decor": 25, "sale": 300,
    "chair": 35, "stop": 120, "foreclosure": 5, "bank": 70, "job": 110,
    "table": 45, "brand": 130, "style": 95,
}

_DEMO_EVAL = [
    {"id": "ad-001", "ad_text": AD_FURNITURE, "golden_queries": ["furniture", "wooden furniture"]},
    {"id": "ad-002", "ad_text": AD_HOUSE, "golden_queries": ["home selling", "house"]},
    {"id": "ad-003", "ad_text": AD_FORECLOSURE, "golden_queries": ["stress", "eviction", "bills"]},
]


def _write_word_file(path: Path, table: dict[str, dict[int, float]], dim: int) -> None:
    store = WordVectors(
        dim=dim,
        vectors={w: _unit_sparse(dim, comps) for w, comps in table.items()},
    )
    save_word_vectors(store, path)


def _write_sentence_file(path: Path, table: dict[str, dict[int, float]], dim: int) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for key, comps in table.items():
            vec = _unit_sparse(dim, comps)
            fh.write(json.dumps({"key": key, "vector": [float(x) for x in vec]}) + "\n")


def write_demo_world(out_dir: str | Path) -> dict[str, Path]:
    """Materialize the furniture/house demo fixtures; returns the file map."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "word_vectors": out / "word_vectors.txt",
        "sentence_vectors": out / "sentence_vectors.jsonl",
        "categories": out / "categories.txt",
        "category_vectors": out / "category_vectors.jsonl",
        "pool": out / "pool.jsonl",
        "metric_vectors": out / "metric_vectors.txt",
        "df_stats": out / "df_stats.json",
        "eval": out / "eval.jsonl",
    }
    _write_word_file(paths["word_vectors"], _DEMO_WORDS, DEMO_DIM)

    sentence_table = dict(_DEMO_SENTENCES)
    sentence_table.update(_DEMO_CATEGORIES)  # category phrases resolve via the sidecar
    _write_sentence_file(paths["sentence_vectors"], sentence_table, DEMO_DIM)

    paths["categories"].write_text(
        "# flattened ad taxonomy (demo subset)\n"
        + "\n".join(_DEMO_CATEGORIES) + "\n",
        encoding="utf-8",
    )
    _write_sentence_file(paths["category_vectors"], _DEMO_CATEGORIES, DEMO_DIM)

    with paths["pool"].open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({
            "id": "pool-furniture",
            "text": POOL_TEXT_FURNITURE,
            "image_tags": [{"tag": "furniture", "confidence": 0.9}],
        }) + "\n")
        fh.write(json.dumps({
            "id": "pool-house",
            "text": POOL_TEXT_HOUSE,
            "image_tags": [{"tag": "house", "confidence": 0.96},
                           {"tag": "home", "confidence": 0.91}],
        }) + "\n")

    _write_word_file(paths["metric_vectors"], _DEMO_METRIC, METRIC_DIM)

    paths["df_stats"].write_text(
        json.dumps({"total_docs": 1000, "df": _DEMO_DF}, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    with paths["eval"].open("w", encoding="utf-8") as fh:
        for sample in _DEMO_EVAL:
            fh.write(json.dumps(sample) + "\n")
    return paths


# ------------------------------------------------------------ ablation world

_TOPICS = [
    # (category phrase, query word, in-text word, neighbor words, synonym)
    ("travel", "vacation", "resort", ("flight", "trip"), "vacations"),
    ("fitness", "workout", "gym", ("exercise", "training"), "workouts"),
    ("cooking", "recipe", "kitchen", ("chef", "meal"), "recipes"),
    ("gardening", "garden", "plant", ("flower", "lawn"), "gardens"),
    ("cars", "car", "engine", ("garage", "vehicle"), "cars"),
    ("finance", "investment", "savings", ("bank", "loan"), "investments"),
    ("fashion", "dress", "clothing", ("outfit", "jewelry"), "dresses"),
    ("education", "course", "student", ("classroom", "school"), "courses"),
    ("pets", "dog", "puppy", ("grooming", "leash"), "dogs"),
    ("music", "guitar", "concert", ("band", "song"), "guitars"),
]

_STAR_WORDS = ("sale", "offer", "deal", "discount", "price")

ABLATION_DIM = 40
ABLATION_METRIC_DIM = 26


def _topic_axes(i: int) -> tuple[int, int, int]:
    return 3 * i, 3 * i + 1, 3 * i + 2


def _ablation_word_table() -> dict[str, dict[int, float]]:
    table: dict[str, dict[int, float]] = {}
    for i, (_cat, q, r1, (r2, r3), _syn) in enumerate(_TOPICS):
        a, b, c = _topic_axes(i)
        table[q] = {a: 1.0}
        table[r1] = {a: 0.93, b: 0.3676}          # edge to q (cos 0.93)
        table[r2] = {a: 0.75, c: 0.6614}          # tag-filter range, no edge
        table[r3] = {a: 0.72, b: 0.45, c: 0.5286}
    hub = 30
    table[_STAR_WORDS[0]] = {hub: 1.0}
    for k, leaf in enumerate(_STAR_WORDS[1:], start=1):
        table[leaf] = {hub: 0.92, hub + k: 0.392}  # star: leaves see only the hub
    return table


def _ablation_metric_table() -> dict[str, dict[int, float]]:
    table: dict[str, dict[int, float]] = {}
    for i, (_cat, q, r1, _others, syn) in enumerate(_TOPICS):
        g, h = 2 * i, 2 * i + 1
        table[q] = {g: 1.0}
        table[syn] = {g: 0.9, h: 0.436}            # counts as a soft match
        table[r1] = {g: 0.7, h: -0.714}            # close, but below 0.8
    for k, word in enumerate(_STAR_WORDS):
        table[word] = {20 + k: 1.0}
    return table


def write_ablation_world(
    out_dir: str | Path, n_samples: int = 50, seed: int = 7
) -> dict[str, Path]:
    """Generate the seeded ablation eval world.

    Sample mix: 10% trivial ads (query is the first word), 50% ads that
    contain the query amid a distractor star, 40% ads where the query is
    reachable only through a neighbor's image tag.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.RandomState(seed)

    n_easy = max(1, round(n_samples * 0.1))
    n_intext = max(1, round(n_samples * 0.5))
    n_intag = n_samples - n_easy - n_intext
    kinds = ["easy"] * n_easy + ["intext"] * n_intext + ["intag"] * n_intag
    rng.shuffle(kinds)

    sentence_table: dict[str, dict[int, float]] = {}
    samples = []
    for idx, kind in enumerate(kinds):
        i = int(rng.randint(len(_TOPICS)))
        cat, q, r1, _others, syn = _TOPICS[i]
        a, b, _c = _topic_axes(i)
        if kind == "easy":
            text = f"{q.capitalize()} and {r1} today"
        else:
            star = list(_STAR_WORDS[:4])
            rng.shuffle(star)
            star_part = " ".join(star)
            if kind == "intext":
                text = f"Big {star_part} for {q} {r1}"
            else:
                text = f"Big {star_part} for {r1}"
        theta = math.radians(2.0 + 7.0 * float(rng.rand()))  # within the q/r1 wedge
        sentence_table[text] = {a: math.cos(theta), b: math.sin(theta)}
        samples.append({"id": f"sample-{idx:03d}", "ad_text": text,
                        "golden_queries": [q, syn], "kind": kind})

    paths = {
        "word_vectors": out / "word_vectors.txt",
        "sentence_vectors": out / "sentence_vectors.jsonl",
        "categories": out / "categories.txt",
        "category_vectors": out / "category_vectors.jsonl",
        "pool": out / "pool.jsonl",
        "metric_vectors": out / "metric_vectors.txt",
        "eval": out / "eval.jsonl",
    }
    _write_word_file(paths["word_vectors"], _ablation_word_table(), ABLATION_DIM)
    _write_sentence_file(paths["sentence_vectors"], sentence_table, ABLATION_DIM)

    cat_table = {}
    for i, (cat, _q, _r1, _others, _syn) in enumerate(_TOPICS):
        a, b, _c = _topic_axes(i)
        cat_table[cat] = {a: math.cos(math.radians(5.0)), b: math.sin(math.radians(5.0))}
    paths["categories"].write_text("\n".join(t[0] for t in _TOPICS) + "\n", encoding="utf-8")
    _write_sentence_file(paths["category_vectors"], cat_table, ABLATION_DIM)

    with paths["pool"].open("w", encoding="utf-8") as fh:
        for i, (cat, q, _r1, (r2, r3), _syn) in enumerate(_TOPICS):
            a, b, _c = _topic_axes(i)
            vec = _unit_sparse(ABLATION_DIM, {a: math.cos(math.radians(4.0)),
                                              b: math.sin(math.radians(4.0))})
            fh.write(json.dumps({
                "id": f"pool-{cat}",
                "text": f"Best {r2} deals on {r3}",
                "image_tags": [{"tag": q, "confidence": 0.9}],
                "vector": [float(x) for x in vec],
            }) + "\n")

    _write_word_file(paths["metric_vectors"], _ablation_metric_table(), ABLATION_METRIC_DIM)

    with paths["eval"].open("w", encoding="utf-8") as fh:
        for sample in samples:
            record = {k: sample[k] for k in ("id", "ad_text", "golden_queries")}
            fh.write(json.dumps(record) + "\n")
    (out / "kinds.json").write_text(
        json.dumps({s["id"]: s["kind"] for s in samples}, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return paths


# -------------------------------------------------------------- latency pool

def write_latency_pool(path: str | Path, n_ads: int = 20000, seed: int = 11) -> Path:
    """Large random pool (inline vectors, demo dimension) for the latency budget."""
    path = Path(path)
    rng = np.random.RandomState(seed)
    tags = ["chair", "table", "sale", "job", "bank"]
    with path.open("w", encoding="utf-8") as fh:
        for i in range(n_ads):
            vec = rng.randn(DEMO_DIM)
            vec = vec / np.linalg.norm(vec)
            fh.write(json.dumps({
                "id": f"bulk-{i:05d}",
                "text": f"synthetic listing {i}",
                "image_tags": [{"tag": tags[i % len(tags)], "confidence": 0.8}],
                "vector": [round(float(x), 6) for x in vec],
            }) + "\n")
        # keep the demo neighbor so extraction still finds a meaningful match
        furn = _unit_sparse(DEMO_DIM, _DEMO_SENTENCES[POOL_TEXT_FURNITURE])
        fh.write(json.dumps({
            "id": "pool-furniture",
            "text": POOL_TEXT_FURNITURE,
            "image_tags": [{"tag": "furniture", "confidence": 0.9}],
            "vector": [float(x) for x in furn],
        }) + "\n")
    return path
